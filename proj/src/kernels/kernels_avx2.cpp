// AVX2 kernel variants. Compiled with -mavx2 in its own translation unit;
// only reached after the runtime CPU probe in kernels.cpp.

#include "zygo/kernels.hpp"

#if defined(ZYGO_HAVE_AVX2)

#include <immintrin.h>

#include <limits>

namespace zygo::kernels::avx2 {

void apply_map_batch(const double* in_re, const double* in_im, std::size_t n,
                     double cos_a, double sin_a, double inv_rho,
                     double* out_re, double* out_im) {
  const __m256d vc = _mm256_set1_pd(cos_a);
  const __m256d vs = _mm256_set1_pd(sin_a);
  const __m256d vr = _mm256_set1_pd(inv_rho);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d re = _mm256_add_pd(_mm256_loadu_pd(in_re + i), one);
    __m256d im = _mm256_loadu_pd(in_im + i);
    __m256d orr = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(re, vc), _mm256_mul_pd(im, vs)), vr);
    __m256d oim = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(im, vc), _mm256_mul_pd(re, vs)), vr);
    _mm256_storeu_pd(out_re + i, orr);
    _mm256_storeu_pd(out_im + i, oim);
  }
  if (i < n) scalar::apply_map_batch(in_re + i, in_im + i, n - i, cos_a, sin_a, inv_rho, out_re + i, out_im + i);
}

namespace {

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_min_pd(lo, hi);
  m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

}  // namespace

double directed_max_min_sq2(const double* ax, const double* ay, std::size_t na,
                            const double* bx, const double* by, std::size_t nb) {
  double best = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d px = _mm256_set1_pd(ax[i]);
    const __m256d py = _mm256_set1_pd(ay[i]);
    __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      __m256d dx = _mm256_sub_pd(px, _mm256_loadu_pd(bx + j));
      __m256d dy = _mm256_sub_pd(py, _mm256_loadu_pd(by + j));
      __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      vmin = _mm256_min_pd(vmin, d);
    }
    double m = hmin(vmin);
    for (; j < nb; ++j) {
      double dx = ax[i] - bx[j];
      double dy = ay[i] - by[j];
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
    const __m256d px = _mm256_set1_pd(ax[i]);
    const __m256d py = _mm256_set1_pd(ay[i]);
    const __m256d pz = _mm256_set1_pd(az[i]);
    __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      __m256d dx = _mm256_sub_pd(px, _mm256_loadu_pd(bx + j));
      __m256d dy = _mm256_sub_pd(py, _mm256_loadu_pd(by + j));
      __m256d dz = _mm256_sub_pd(pz, _mm256_loadu_pd(bz + j));
      __m256d d = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                _mm256_mul_pd(dz, dz));
      vmin = _mm256_min_pd(vmin, d);
    }
    double m = hmin(vmin);
    for (; j < nb; ++j) {
      double dx = ax[i] - bx[j];
      double dy = ay[i] - by[j];
      double dz = az[i] - bz[j];
      double d = dx * dx + dy * dy + dz * dz;
      if (d < m) m = d;
    }
    if (m > best) best = m;
  }
  return best;
}

}  // namespace zygo::kernels::avx2

#endif  // ZYGO_HAVE_AVX2
