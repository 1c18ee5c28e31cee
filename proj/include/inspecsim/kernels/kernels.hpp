#pragma once

// Batch geometry and distance kernels. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant selected at runtime. The
// variants perform the same IEEE operations in the same order, so results are
// bit-identical; the equivalence suite enforces this.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace inspecsim::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Axis-aligned boxes in structure-of-arrays layout, padded to a multiple of
/// kLanes with empty boxes (min = +inf, max = -inf) that never report hits.
class BoxSoA {
 public:
  static constexpr std::size_t kLanes = 4;

  BoxSoA() = default;
  void push_back(const double min_corner[3], const double max_corner[3]);

  std::size_t size() const { return count_; }
  std::size_t padded_size() const { return lo_[0].size(); }

  const double* lo(int axis) const { return lo_[axis].data(); }
  const double* hi(int axis) const { return hi_[axis].data(); }

 private:
  std::size_t count_ = 0;
  std::vector<double> lo_[3];
  std::vector<double> hi_[3];
};

/// Point in structure-of-arrays layout for the distance kernel.
struct PointSoA {
  std::vector<double> x, y, z;
  std::size_t size() const { return x.size(); }
};

/// Signature table for one ISA.
struct KernelTable {
  // hit[i] = 1 iff p lies strictly inside box i inflated by margin.
  std::size_t (*point_hits)(const BoxSoA& boxes, const double p[3], double margin,
                            std::uint8_t* hit);
  // hit[i] = 1 iff the closed segment a-b meets the open box i inflated by
  // margin (slab method). Negative margins shrink the box.
  std::size_t (*segment_hits)(const BoxSoA& boxes, const double a[3], const double b[3],
                              double margin, std::uint8_t* hit);
  // out is row-major n x n Euclidean distances.
  void (*distance_matrix)(const PointSoA& pts, double* out);
};

const KernelTable& scalar_table();
#if defined(INSPECSIM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

/// True when the running CPU supports the ISA and it was compiled in.
bool isa_available(Isa isa);

/// Best available ISA; INSPECSIM_ISA=scalar in the environment forces the
/// scalar reference.
Isa detect_isa();

/// Currently selected table. Initialized from detect_isa() on first use.
const KernelTable& active();
Isa active_isa();

/// Overrides the active ISA. Returns false (and leaves the selection unchanged)
/// if the ISA is not available.
bool select_isa(Isa isa);

const KernelTable& table_for(Isa isa);

// Convenience wrappers over the active table.
std::size_t point_hits(const BoxSoA& boxes, const double p[3], double margin,
                       std::span<std::uint8_t> hit);
std::size_t segment_hits(const BoxSoA& boxes, const double a[3], const double b[3],
                         double margin, std::span<std::uint8_t> hit);
std::vector<double> distance_matrix(const PointSoA& pts);

}  // namespace inspecsim::kernels
