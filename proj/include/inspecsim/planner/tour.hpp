#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "inspecsim/planner/path.hpp"

namespace inspecsim {

/// Symmetric n x n edge costs, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

inline constexpr double kCollisionPenalty = 10.0;

/// Euclidean distances; edges whose straight segment violates the world's
/// safety margin cost kCollisionPenalty times their length.
CostMatrix penalized_costs(std::span<const Waypoint4D> points, const WorldModel& world);

using Tour = std::vector<std::size_t>;

/// Cost of visiting `order` without returning to the start.
double open_tour_cost(const Tour& order, const CostMatrix& cost);

/// Index of the point closest to the world origin (lowest index on ties).
std::size_t closest_to_origin(std::span<const Waypoint4D> points);

Tour nearest_neighbor_tour(const CostMatrix& cost, std::size_t start);

/// Applies improving 2-opt reversals (first element fixed, open end) until
/// no single reversal lowers the cost. Returns the number of moves applied.
std::size_t two_opt(Tour& order, const CostMatrix& cost);

/// Exact open-tour optimum with a fixed start (Held-Karp dynamic program).
Tour exact_open_tour(const CostMatrix& cost, std::size_t start);

/// Tours up to this many points are solved exactly.
inline constexpr std::size_t kExactTourLimit = 10;

/// Open tour starting at the viewpoint closest to the origin. Small instances
/// are solved exactly; larger ones use nearest neighbor followed by 2-opt.
/// The result never costs more than the nearest-neighbor tour.
Tour plan_tour(std::span<const Waypoint4D> viewpoints, const WorldModel& world);

}  // namespace inspecsim
