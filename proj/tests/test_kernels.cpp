#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vf/kernels.hpp"

using namespace vf;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("active variant is one of the two implementations") {
    const std::string& v = kern::active_variant();
    CHECK((v == "scalar" || v == "avx2"));
}

TEST_CASE("scalar dot matches a long-double reference") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 129u}) {
        auto x = random_vec(rng, n), y = random_vec(rng, n);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            ref += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
        double got = kern::scalar::dot(x.data(), y.data(), n);
        CHECK(std::abs(got - static_cast<double>(ref)) <=
              1e-12 * std::max(1.0, std::abs(static_cast<double>(ref))));
    }
}

TEST_CASE("scalar axpy, scale and relu semantics") {
    std::vector<double> x = {1.0, -2.0, 3.0};
    std::vector<double> y = {0.5, 0.5, 0.5};
    kern::scalar::axpy(2.0, x.data(), y.data(), 3);
    CHECK(y == std::vector<double>{2.5, -3.5, 6.5});
    kern::scalar::scale(y.data(), -1.0, 3);
    CHECK(y == std::vector<double>{-2.5, 3.5, -6.5});
    kern::scalar::relu(y.data(), 3);
    CHECK(y == std::vector<double>{0.0, 3.5, 0.0});
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
    if (!__builtin_cpu_supports("avx2")) {
        MESSAGE("avx2 not available on this CPU; skipping equivalence checks");
        return;
    }
    std::mt19937_64 rng(42);
    for (std::size_t n = 0; n <= 67; ++n) {
        for (int trial = 0; trial < 4; ++trial) {
            auto x = random_vec(rng, n), y = random_vec(rng, n);
            CHECK(kern::avx2::dot(x.data(), y.data(), n) ==
                  kern::scalar::dot(x.data(), y.data(), n));

            auto y1 = y, y2 = y;
            double a = random_vec(rng, 1)[0];
            kern::scalar::axpy(a, x.data(), y1.data(), n);
            kern::avx2::axpy(a, x.data(), y2.data(), n);
            CHECK(y1 == y2);

            auto s1 = x, s2 = x;
            kern::scalar::scale(s1.data(), a, n);
            kern::avx2::scale(s2.data(), a, n);
            CHECK(s1 == s2);

            auto r1 = x, r2 = x;
            kern::scalar::relu(r1.data(), n);
            kern::avx2::relu(r2.data(), n);
            CHECK(r1 == r2);
        }
    }
}
#endif

TEST_CASE("dispatched kernels agree with the scalar reference bit-for-bit") {
    std::mt19937_64 rng(9);
    for (std::size_t n : {0u, 1u, 5u, 16u, 33u, 100u}) {
        auto x = random_vec(rng, n), y = random_vec(rng, n);
        CHECK(kern::dot(x.data(), y.data(), n) == kern::scalar::dot(x.data(), y.data(), n));
        auto y1 = y, y2 = y;
        kern::axpy(1.5, x.data(), y1.data(), n);
        kern::scalar::axpy(1.5, x.data(), y2.data(), n);
        CHECK(y1 == y2);
    }
}
