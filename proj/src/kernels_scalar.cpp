#include "vf/kernels.hpp"

namespace vf::kern::scalar {

// Four interleaved partial sums; the AVX2 variant accumulates the same
// lanes, so the two implementations round identically.
double dot(const double* x, const double* y, std::size_t n) {
    double p[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) p[i & 3] += x[i] * y[i];
    return (p[0] + p[1]) + (p[2] + p[3]);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void relu(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] < 0.0) x[i] = 0.0;
}

}  // namespace vf::kern::scalar
