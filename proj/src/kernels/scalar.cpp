#include <algorithm>
#include <cmath>

#include "inspecsim/kernels/kernels.hpp"

namespace inspecsim::kernels {
namespace {

std::size_t point_hits_scalar(const BoxSoA& boxes, const double p[3], double margin,
                              std::uint8_t* hit) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    bool inside = true;
    for (int k = 0; k < 3; ++k) {
      const double lo = boxes.lo(k)[i] - margin;
      const double hi = boxes.hi(k)[i] + margin;
      inside = inside && (lo < p[k]) && (p[k] < hi);
    }
    hit[i] = inside ? 1 : 0;
    count += hit[i];
  }
  return count;
}

std::size_t segment_hits_scalar(const BoxSoA& boxes, const double a[3], const double b[3],
                                double margin, std::uint8_t* hit) {
  const double d[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  double inv[3];
  for (int k = 0; k < 3; ++k) inv[k] = d[k] != 0.0 ? 1.0 / d[k] : 0.0;

  std::size_t count = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    double enter = -INFINITY;
    double exit = INFINITY;
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      const double lo = boxes.lo(k)[i] - margin;
      const double hi = boxes.hi(k)[i] + margin;
      if (d[k] == 0.0) {
        ok = ok && (lo < a[k]) && (a[k] < hi);
      } else {
        const double t1 = (lo - a[k]) * inv[k];
        const double t2 = (hi - a[k]) * inv[k];
        enter = std::max(enter, std::min(t1, t2));
        exit = std::min(exit, std::max(t1, t2));
      }
    }
    const bool h = ok && enter < exit && enter < 1.0 && exit > 0.0;
    hit[i] = h ? 1 : 0;
    count += hit[i];
  }
  return count;
}

void distance_matrix_scalar(const PointSoA& pts, double* out) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts.x[j] - pts.x[i];
      const double dy = pts.y[j] - pts.y[i];
      const double dz = pts.z[j] - pts.z[i];
      const double sq = dx * dx + dy * dy;
      out[i * n + j] = std::sqrt(sq + dz * dz);
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{point_hits_scalar, segment_hits_scalar, distance_matrix_scalar};
  return table;
}

}  // namespace inspecsim::kernels
