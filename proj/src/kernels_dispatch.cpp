#include "vf/kernels.hpp"

namespace vf::kern {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const bool use_avx2 = cpu_has_avx2();

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
const dot_fn dot = use_avx2 ? avx2::dot : scalar::dot;
const axpy_fn axpy = use_avx2 ? avx2::axpy : scalar::axpy;
const scale_fn scale = use_avx2 ? avx2::scale : scalar::scale;
const relu_fn relu = use_avx2 ? avx2::relu : scalar::relu;
#else
const dot_fn dot = scalar::dot;
const axpy_fn axpy = scalar::axpy;
const scale_fn scale = scalar::scale;
const relu_fn relu = scalar::relu;
#endif

const std::string& active_variant() {
    static const std::string name = use_avx2 ? "avx2" : "scalar";
    return name;
}

}  // namespace vf::kern
