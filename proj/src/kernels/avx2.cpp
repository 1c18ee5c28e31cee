// Compiled with -mavx2 only; callers reach this through the dispatch table
// after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "inspecsim/kernels/kernels.hpp"

namespace inspecsim::kernels {
namespace {

constexpr std::size_t kLanes = BoxSoA::kLanes;

inline std::size_t store_mask(int bits, std::size_t base, std::size_t count, std::uint8_t* hit) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < kLanes && base + l < count; ++l) {
    hit[base + l] = static_cast<std::uint8_t>((bits >> l) & 1);
    n += hit[base + l];
  }
  return n;
}

std::size_t point_hits_avx2(const BoxSoA& boxes, const double p[3], double margin,
                            std::uint8_t* hit) {
  const __m256d m = _mm256_set1_pd(margin);
  const __m256d pv[3] = {_mm256_set1_pd(p[0]), _mm256_set1_pd(p[1]), _mm256_set1_pd(p[2])};
  std::size_t count = 0;
  for (std::size_t i = 0; i < boxes.size(); i += kLanes) {
    __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (int k = 0; k < 3; ++k) {
      const __m256d lo = _mm256_sub_pd(_mm256_loadu_pd(boxes.lo(k) + i), m);
      const __m256d hi = _mm256_add_pd(_mm256_loadu_pd(boxes.hi(k) + i), m);
      inside = _mm256_and_pd(inside, _mm256_cmp_pd(lo, pv[k], _CMP_LT_OQ));
      inside = _mm256_and_pd(inside, _mm256_cmp_pd(pv[k], hi, _CMP_LT_OQ));
    }
    count += store_mask(_mm256_movemask_pd(inside), i, boxes.size(), hit);
  }
  return count;
}

std::size_t segment_hits_avx2(const BoxSoA& boxes, const double a[3], const double b[3],
                              double margin, std::uint8_t* hit) {
  const double d[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  double inv[3];
  for (int k = 0; k < 3; ++k) inv[k] = d[k] != 0.0 ? 1.0 / d[k] : 0.0;

  const __m256d m = _mm256_set1_pd(margin);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t count = 0;
  for (std::size_t i = 0; i < boxes.size(); i += kLanes) {
    __m256d enter = _mm256_set1_pd(-INFINITY);
    __m256d exit = _mm256_set1_pd(INFINITY);
    __m256d ok = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (int k = 0; k < 3; ++k) {
      const __m256d lo = _mm256_sub_pd(_mm256_loadu_pd(boxes.lo(k) + i), m);
      const __m256d hi = _mm256_add_pd(_mm256_loadu_pd(boxes.hi(k) + i), m);
      const __m256d ak = _mm256_set1_pd(a[k]);
      if (d[k] == 0.0) {
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(lo, ak, _CMP_LT_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(ak, hi, _CMP_LT_OQ));
      } else {
        const __m256d iv = _mm256_set1_pd(inv[k]);
        const __m256d t1 = _mm256_mul_pd(_mm256_sub_pd(lo, ak), iv);
        const __m256d t2 = _mm256_mul_pd(_mm256_sub_pd(hi, ak), iv);
        enter = _mm256_max_pd(enter, _mm256_min_pd(t1, t2));
        exit = _mm256_min_pd(exit, _mm256_max_pd(t1, t2));
      }
    }
    __m256d h = _mm256_and_pd(ok, _mm256_cmp_pd(enter, exit, _CMP_LT_OQ));
    h = _mm256_and_pd(h, _mm256_cmp_pd(enter, one, _CMP_LT_OQ));
    h = _mm256_and_pd(h, _mm256_cmp_pd(exit, zero, _CMP_GT_OQ));
    count += store_mask(_mm256_movemask_pd(h), i, boxes.size(), hit);
  }
  return count;
}

void distance_matrix_avx2(const PointSoA& pts, double* out) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d xi = _mm256_set1_pd(pts.x[i]);
    const __m256d yi = _mm256_set1_pd(pts.y[i]);
    const __m256d zi = _mm256_set1_pd(pts.z[i]);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
      const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&pts.x[j]), xi);
      const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&pts.y[j]), yi);
      const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&pts.z[j]), zi);
      const __m256d sq = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      _mm256_storeu_pd(out + i * n + j, _mm256_sqrt_pd(_mm256_add_pd(sq, _mm256_mul_pd(dz, dz))));
    }
    for (; j < n; ++j) {
      const double dx = pts.x[j] - pts.x[i];
      const double dy = pts.y[j] - pts.y[i];
      const double dz = pts.z[j] - pts.z[i];
      const double sq = dx * dx + dy * dy;
      out[i * n + j] = std::sqrt(sq + dz * dz);
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{point_hits_avx2, segment_hits_avx2, distance_matrix_avx2};
  return table;
}

}  // namespace inspecsim::kernels
