#pragma once

// Dense double-precision kernels used by the estimators' inner loops.
//
// Every kernel has a portable scalar reference in `kernels::scalar`; SIMD
// variants (`kernels::avx2` on x86-64, `kernels::neon` on AArch64) are built
// when the target supports them and picked at runtime by CPU detection. The
// top-level functions forward through the active table.
//
// Elementwise kernels (axpy, scale) are bit-identical across ISAs.
// Reductions (dot, sum, gemv, gemv_t) use lane-parallel accumulators in the
// SIMD variants, so they agree with the scalar reference only to rounding.
//
// Setting DAML_FORCE_SCALAR=1 in the environment pins the scalar table.

#include <cstddef>
#include <span>
#include <string_view>

namespace daml::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  // y = A x, A is rows x cols row-major.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = A^T x, A is rows x cols row-major.
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#if defined(DAML_HAVE_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

#if defined(DAML_HAVE_NEON)
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace neon
#endif

bool isa_supported(Isa isa);
const KernelTable& table_for(Isa isa);

Isa active_isa();
const KernelTable& active();
// Throws ValidationError if the ISA is not supported on this machine/build.
void force_isa(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }

}  // namespace daml::kernels
