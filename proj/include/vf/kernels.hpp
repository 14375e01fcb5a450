#pragma once

#include <cstddef>
#include <string>

// Numeric inner loops of the entailment network. Every kernel has a scalar
// reference implementation and an AVX2 variant; dispatch is decided once at
// startup from CPUID. The AVX2 variants keep the scalar accumulation order
// so both paths produce bit-identical results.

namespace vf::kern {

using dot_fn = double (*)(const double*, const double*, std::size_t);
using axpy_fn = void (*)(double, const double*, double*, std::size_t);
using scale_fn = void (*)(double*, double, std::size_t);
using relu_fn = void (*)(double*, std::size_t);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);  // y += a*x
void scale(double* x, double a, std::size_t n);
void relu(double* x, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double a, std::size_t n);
void relu(double* x, std::size_t n);
}  // namespace avx2
#endif

// Active variants, chosen at load time.
extern const dot_fn dot;
extern const axpy_fn axpy;
extern const scale_fn scale;
extern const relu_fn relu;

// "avx2" or "scalar"
const std::string& active_variant();

}  // namespace vf::kern
