#include "inspecsim/planner/tour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inspecsim/kernels/kernels.hpp"

namespace inspecsim {

CostMatrix penalized_costs(std::span<const Waypoint4D> points, const WorldModel& world) {
  const std::size_t n = points.size();
  kernels::PointSoA soa;
  soa.x.reserve(n);
  soa.y.reserve(n);
  soa.z.reserve(n);
  for (const Waypoint4D& w : points) {
    soa.x.push_back(w.x);
    soa.y.push_back(w.y);
    soa.z.push_back(w.z);
  }
  std::vector<double> d = kernels::distance_matrix(soa);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double c = d[i * n + j];
      if (!world.segment_clear(points[i].position(), points[j].position())) c *= kCollisionPenalty;
      d[i * n + j] = c;
      d[j * n + i] = c;
    }
  }
  return CostMatrix(n, std::move(d));
}

double open_tour_cost(const Tour& order, const CostMatrix& cost) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += cost(order[i - 1], order[i]);
  return total;
}

std::size_t closest_to_origin(std::span<const Waypoint4D> points) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i].position().squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Tour nearest_neighbor_tour(const CostMatrix& cost, std::size_t start) {
  const std::size_t n = cost.size();
  Tour order;
  order.reserve(n);
  std::vector<bool> used(n, false);
  std::size_t cur = start;
  used[cur] = true;
  order.push_back(cur);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && cost(cur, j) < best) {
        best = cost(cur, j);
        next = j;
      }
    }
    used[next] = true;
    order.push_back(next);
    cur = next;
  }
  return order;
}

std::size_t two_opt(Tour& order, const CostMatrix& cost) {
  constexpr double kMinGain = 1e-12;
  const std::size_t n = order.size();
  std::size_t moves = 0;
  bool improved = n >= 3;
  while (improved) {
    improved = false;
    // Reverse order[i..j]; order[0] stays put.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t a = order[i - 1], b = order[i], c = order[j];
        double delta = cost(a, c) - cost(a, b);
        if (j + 1 < n) {
          const std::size_t d = order[j + 1];
          delta += cost(b, d) - cost(c, d);
        }
        if (delta < -kMinGain) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          ++moves;
          improved = true;
        }
      }
    }
  }
  return moves;
}

Tour exact_open_tour(const CostMatrix& cost, std::size_t start) {
  const std::size_t n = cost.size();
  if (n <= 2) {
    Tour t{start};
    for (std::size_t i = 0; i < n; ++i)
      if (i != start) t.push_back(i);
    return t;
  }
  // Nodes other than start, re-indexed 0..m-1.
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (i != start) nodes.push_back(i);
  const std::size_t m = nodes.size();
  const std::size_t full = (std::size_t{1} << m);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(full * m, inf);
  std::vector<std::size_t> parent(full * m, m);
  for (std::size_t k = 0; k < m; ++k) best[(std::size_t{1} << k) * m + k] = cost(start, nodes[k]);
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (std::size_t last = 0; last < m; ++last) {
      if (!(mask & (std::size_t{1} << last))) continue;
      const double here = best[mask * m + last];
      if (here == inf) continue;
      for (std::size_t next = 0; next < m; ++next) {
        if (mask & (std::size_t{1} << next)) continue;
        const std::size_t nmask = mask | (std::size_t{1} << next);
        const double c = here + cost(nodes[last], nodes[next]);
        if (c < best[nmask * m + next]) {
          best[nmask * m + next] = c;
          parent[nmask * m + next] = last;
        }
      }
    }
  }
  std::size_t last = 0;
  for (std::size_t k = 1; k < m; ++k)
    if (best[(full - 1) * m + k] < best[(full - 1) * m + last]) last = k;
  Tour rev;
  std::size_t mask = full - 1;
  while (last != m) {
    rev.push_back(nodes[last]);
    const std::size_t p = parent[mask * m + last];
    mask &= ~(std::size_t{1} << last);
    last = p;
  }
  Tour order{start};
  order.insert(order.end(), rev.rbegin(), rev.rend());
  return order;
}

Tour plan_tour(std::span<const Waypoint4D> viewpoints, const WorldModel& world) {
  if (viewpoints.empty()) throw Error(ErrorCode::InvalidInput, "plan_tour: no viewpoints");
  const CostMatrix cost = penalized_costs(viewpoints, world);
  const std::size_t start = closest_to_origin(viewpoints);
  Tour nn = nearest_neighbor_tour(cost, start);
  if (viewpoints.size() <= kExactTourLimit) {
    Tour exact = exact_open_tour(cost, start);
    return open_tour_cost(nn, cost) < open_tour_cost(exact, cost) ? nn : exact;
  }
  two_opt(nn, cost);
  return nn;
}

}  // namespace inspecsim
