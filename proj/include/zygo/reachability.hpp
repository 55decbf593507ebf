#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zygo/finger.hpp"
#include "zygo/types.hpp"

namespace zygo {

inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

struct PointCloud2 {
  std::vector<Complex> points;
  // Provenance, -1 when not produced by an iteration.
  int depth = -1;
  int resolution = -1;
};

// One contraction f_v(x) = (x+1) e^{-i omega v} / rho of the iterated system.
struct MapParams {
  double v;
  double rho;
  double omega;
};

// Canonical order: sort by (re, im), drop exact duplicates.
void sort_and_dedup(std::vector<Complex>& points);

// Union of the images of `cloud` under every map, deduplicated.
PointCloud2 hutchinson_step(std::span<const MapParams> maps, const PointCloud2& cloud);

// Reachable set of the extremal junction after `depth` phalanx choices,
// computed by iterating the map system from {0} and applying the e^{-i theta0}
// prefactor. `resolution` materializes interval control sets.
PointCloud2 reachable_set(const FingerSpec& spec, int depth, int resolution,
                          std::size_t point_budget = kDefaultPointBudget);

// Oracle route: direct enumeration of all control tuples through the junction
// recurrence. Kept free of the map-iteration code path.
PointCloud2 reachable_set_bruteforce(const FingerSpec& spec, int depth, int resolution,
                                     std::size_t point_budget = kDefaultPointBudget);

double hausdorff_distance(const PointCloud2& a, const PointCloud2& b);

struct AttractorApprox {
  PointCloud2 cloud;
  int depth = 0;
  double successive_gap = 0.0;   // Hausdorff distance between the last two iterates
  double certified_bound = 0.0;  // successive_gap / (rho - 1), distance bound to the attractor
  bool converged = false;
};

// Iterates until successive_gap * rho / (rho - 1) <= tol, or until the depth
// cap / point budget stops refinement (flagged unconverged, not an error).
AttractorApprox attractor_approx(const FingerSpec& spec, int resolution, double tol,
                                 int depth_cap = 64,
                                 std::size_t point_budget = kDefaultPointBudget);

// Engine form over an arbitrary map system (contraction factor taken as the
// weakest map's 1/rho).
AttractorApprox attractor_approx(std::span<const MapParams> maps, double tol, int depth_cap = 64,
                                 std::size_t point_budget = kDefaultPointBudget);

}  // namespace zygo
