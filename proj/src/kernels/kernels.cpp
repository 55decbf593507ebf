#include "zygo/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

namespace zygo::kernels {

namespace scalar {

void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im) {
  for (std::size_t i = 0; i < n; ++i) {
    double re = in_re[i] + 1.0;
    double im = in_im[i];
    out_re[i] = (re * cos_a + im * sin_a) * inv_rho;
    out_im[i] = (im * cos_a - re * sin_a) * inv_rho;
  }
}

double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb) {
  double best = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double m = std::numeric_limits<double>::infinity();
    double px = ax[i], py = ay[i];
    for (std::size_t j = 0; j < nb; ++j) {
      double dx = px - bx[j];
      double dy = py - by[j];
      double d = dx * dx + dy * dy;
      if (d < m) m = d;
    }
    if (m > best) best = m;
  }
  return best;
}

double directed_max_min_sq3(const double* ax, const double* ay, const double* az, std::size_t na,
                            const double* bx, const double* by, const double* bz, std::size_t nb) {
  double best = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double m = std::numeric_limits<double>::infinity();
    double px = ax[i], py = ay[i], pz = az[i];
    for (std::size_t j = 0; j < nb; ++j) {
      double dx = px - bx[j];
      double dy = py - by[j];
      double dz = pz - bz[j];
      double d = dx * dx + dy * dy + dz * dz;
      if (d < m) m = d;
    }
    if (m > best) best = m;
  }
  return best;
}

}  // namespace scalar

namespace {

struct Dispatch {
  decltype(&scalar::apply_map_batch) apply_map_batch = &scalar::apply_map_batch;
  decltype(&scalar::directed_max_min_sq2) directed_max_min_sq2 = &scalar::directed_max_min_sq2;
  decltype(&scalar::directed_max_min_sq3) directed_max_min_sq3 = &scalar::directed_max_min_sq3;
  Isa isa = Isa::Scalar;
};

bool apply_isa(Dispatch& d, Isa isa) {
#if defined(ZYGO_HAVE_AVX2)
  if (isa == Isa::Avx2 && cpu_has_avx2()) {
    d.apply_map_batch = &avx2::apply_map_batch;
    d.directed_max_min_sq2 = &avx2::directed_max_min_sq2;
    d.directed_max_min_sq3 = &avx2::directed_max_min_sq3;
    d.isa = Isa::Avx2;
    return true;
  }
#endif
  if (isa == Isa::Scalar) {
    d = Dispatch{};
    return true;
  }
  return false;
}

Dispatch make_default() {
  Dispatch d;
  Isa wanted = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  if (const char* env = std::getenv("ZYGO_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) wanted = Isa::Scalar;
    else if (std::strcmp(env, "avx2") == 0) wanted = Isa::Avx2;
  }
  if (!apply_isa(d, wanted)) apply_isa(d, Isa::Scalar);
  return d;
}

Dispatch& dispatch() {
  static Dispatch d = make_default();
  return d;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(ZYGO_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa active_isa() { return dispatch().isa; }

bool force_isa(Isa isa) { return apply_isa(dispatch(), isa); }

void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im) {
  dispatch().apply_map_batch(in_re, in_im, n, cos_a, sin_a, inv_rho, out_re, out_im);
}

double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb) {
  return dispatch().directed_max_min_sq2(ax, ay, na, bx, by, nb);
}

double directed_max_min_sq3(const double* ax, const double* ay, const double* az, std::size_t na,
                            const double* bx, const double* by, const double* bz, std::size_t nb) {
  return dispatch().directed_max_min_sq3(ax, ay, az, na, bx, by, bz, nb);
}

}  // namespace zygo::kernels
