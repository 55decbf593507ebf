#pragma once

#include <cstddef>

namespace zygo::kernels {

// Data-parallel inner loops behind the set-iteration and set-distance code.
// Every kernel ships as a scalar reference plus an AVX2 variant; the variant
// is picked once at runtime (CPU probe, overridable via force_isa or the
// ZYGO_SIMD environment variable). Variants are bit-identical to the scalar
// reference: per-element arithmetic keeps the same operation order and FMA
// contraction is disabled project-wide.

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

// ISA selected for dispatch (resolves the environment override on first use).
Isa active_isa();

// Forces dispatch to the given ISA. Returns false (and changes nothing) when
// the CPU cannot run it.
bool force_isa(Isa isa);

bool cpu_has_avx2();

// out = (x + 1) * (cos_a - i sin_a) * inv_rho, elementwise over SoA arrays.
void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im);

// max over a of (min over b of squared distance), planar points.
double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb);

// Same reduction for 3-component points.
double directed_max_min_sq3(const double* ax, const double* ay, const double* az, std::size_t na,
                            const double* bx, const double* by, const double* bz, std::size_t nb);

namespace scalar {
void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im);
double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb);
double directed_max_min_sq3(const double* ax, const double* ay, const double* az, std::size_t na,
                            const double* bx, const double* by, const double* bz, std::size_t nb);
}  // namespace scalar

#if defined(ZYGO_HAVE_AVX2)
namespace avx2 {
void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im);
double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb);
double directed_max_min_sq3(const double* ax, const double* ay, const double* az, std::size_t na,
                            const double* bx, const double* by, const double* bz, std::size_t nb);
}  // namespace avx2
#endif

}  // namespace zygo::kernels
