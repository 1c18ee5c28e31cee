#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "inspecsim/kernels/kernels.hpp"

namespace inspecsim::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

void BoxSoA::push_back(const double min_corner[3], const double max_corner[3]) {
  // Overwrite the first padding slot if there is one, else grow by a lane block.
  if (count_ == padded_size()) {
    for (int k = 0; k < 3; ++k) {
      lo_[k].resize(count_ + kLanes, INFINITY);
      hi_[k].resize(count_ + kLanes, -INFINITY);
    }
  }
  for (int k = 0; k < 3; ++k) {
    lo_[k][count_] = min_corner[k];
    hi_[k][count_] = max_corner[k];
  }
  ++count_;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(INSPECSIM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* forced = std::getenv("INSPECSIM_ISA"); forced && std::strcmp(forced, "scalar") == 0)
    return Isa::Scalar;
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

const KernelTable& table_for(Isa isa) {
#if defined(INSPECSIM_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2_table();
#endif
  (void)isa;
  return scalar_table();
}

namespace {

struct Selection {
  std::atomic<Isa> isa{detect_isa()};
};

Selection& selection() {
  static Selection s;
  return s;
}

}  // namespace

const KernelTable& active() { return table_for(selection().isa.load(std::memory_order_relaxed)); }

Isa active_isa() { return selection().isa.load(std::memory_order_relaxed); }

bool select_isa(Isa isa) {
  if (!isa_available(isa)) return false;
  selection().isa.store(isa, std::memory_order_relaxed);
  return true;
}

std::size_t point_hits(const BoxSoA& boxes, const double p[3], double margin,
                       std::span<std::uint8_t> hit) {
  return active().point_hits(boxes, p, margin, hit.data());
}

std::size_t segment_hits(const BoxSoA& boxes, const double a[3], const double b[3],
                         double margin, std::span<std::uint8_t> hit) {
  return active().segment_hits(boxes, a, b, margin, hit.data());
}

std::vector<double> distance_matrix(const PointSoA& pts) {
  std::vector<double> out(pts.size() * pts.size());
  active().distance_matrix(pts, out.data());
  return out;
}

}  // namespace inspecsim::kernels
