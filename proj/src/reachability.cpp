#include "zygo/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zygo/kernels.hpp"

namespace zygo {

namespace {

void split_soa(const std::vector<Complex>& pts, std::vector<double>& re, std::vector<double>& im) {
  re.resize(pts.size());
  im.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    re[i] = pts[i].real();
    im[i] = pts[i].imag();
  }
}

std::vector<MapParams> maps_for(const FingerSpec& spec, int resolution) {
  // Chirality folds into the map rotation sense.
  std::vector<MapParams> maps;
  for (double v : spec.control_set.materialize(resolution)) {
    maps.push_back({v, spec.rho, spec.chirality * spec.omega});
  }
  return maps;
}

void check_budget(std::size_t next_size, std::size_t budget, const char* what) {
  if (next_size > budget) {
    throw ResourceError(std::string(what) + " would produce " + std::to_string(next_size) +
                        " points, exceeding the point budget of " + std::to_string(budget));
  }
}

}  // namespace

void sort_and_dedup(std::vector<Complex>& points) {
  std::sort(points.begin(), points.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
}

PointCloud2 hutchinson_step(std::span<const MapParams> maps, const PointCloud2& cloud) {
  if (maps.empty()) throw ArgumentError("hutchinson step needs at least one map");
  if (cloud.points.empty()) throw ArgumentError("hutchinson step needs a non-empty cloud");

  std::vector<double> in_re, in_im;
  split_soa(cloud.points, in_re, in_im);
  const std::size_t n = cloud.points.size();

  std::vector<double> out_re(n), out_im(n);
  PointCloud2 out;
  out.points.reserve(maps.size() * n);
  for (const MapParams& m : maps) {
    kernels::apply_map_batch(in_re.data(), in_im.data(), n, std::cos(m.omega * m.v),
                             std::sin(m.omega * m.v), 1.0 / m.rho, out_re.data(), out_im.data());
    for (std::size_t i = 0; i < n; ++i) out.points.emplace_back(out_re[i], out_im[i]);
  }
  sort_and_dedup(out.points);
  return out;
}

PointCloud2 reachable_set(const FingerSpec& spec, int depth, int resolution,
                          std::size_t point_budget) {
  spec.validate();
  if (depth < 0) throw ArgumentError("depth must be >= 0");
  auto maps = maps_for(spec, resolution);

  PointCloud2 cloud;
  cloud.points = {Complex(0.0, 0.0)};
  for (int k = 0; k < depth; ++k) {
    check_budget(maps.size() * cloud.points.size(), point_budget, "reachable-set iteration");
    cloud = hutchinson_step(maps, cloud);
  }
  if (spec.theta0 != 0.0) {
    Complex prefactor(std::cos(spec.theta0), -std::sin(spec.theta0));
    for (Complex& p : cloud.points) p *= prefactor;
    sort_and_dedup(cloud.points);
  }
  cloud.depth = depth;
  cloud.resolution = static_cast<int>(maps.size());
  return cloud;
}

PointCloud2 reachable_set_bruteforce(const FingerSpec& spec, int depth, int resolution,
                                     std::size_t point_budget) {
  spec.validate();
  if (depth < 0) throw ArgumentError("depth must be >= 0");
  auto values = spec.control_set.materialize(resolution);
  const std::size_t m = values.size();

  double nominal = std::pow(static_cast<double>(m), depth);
  if (nominal > static_cast<double>(point_budget)) {
    throw ResourceError("brute-force enumeration of " + std::to_string(m) + "^" +
                        std::to_string(depth) + " tuples exceeds the point budget of " +
                        std::to_string(point_budget));
  }

  PointCloud2 out;
  out.depth = depth;
  out.resolution = static_cast<int>(m);
  std::vector<std::size_t> idx(static_cast<std::size_t>(depth), 0);
  while (true) {
    Complex x(0.0, 0.0);
    double acc = 0.0;
    double scale = 1.0;
    for (int k = 0; k < depth; ++k) {
      acc += values[idx[static_cast<std::size_t>(k)]];
      scale /= spec.rho;
      double angle = spec.theta0 + spec.chirality * spec.omega * acc;
      x += scale * Complex(std::cos(angle), -std::sin(angle));
    }
    out.points.push_back(x);
    // odometer increment over the m^depth tuples
    int pos = depth - 1;
    while (pos >= 0) {
      if (++idx[static_cast<std::size_t>(pos)] < m) break;
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  sort_and_dedup(out.points);
  return out;
}

double hausdorff_distance(const PointCloud2& a, const PointCloud2& b) {
  if (a.points.empty() || b.points.empty())
    throw ArgumentError("hausdorff distance needs non-empty clouds");
  std::vector<double> are, aim, bre, bim;
  split_soa(a.points, are, aim);
  split_soa(b.points, bre, bim);
  double d_ab = kernels::directed_max_min_sq2(are.data(), aim.data(), are.size(), bre.data(),
                                              bim.data(), bre.size());
  double d_ba = kernels::directed_max_min_sq2(bre.data(), bim.data(), bre.size(), are.data(),
                                              aim.data(), are.size());
  return std::sqrt(std::max(d_ab, d_ba));
}

AttractorApprox attractor_approx(std::span<const MapParams> maps, double tol, int depth_cap,
                                 std::size_t point_budget) {
  if (maps.empty()) throw ArgumentError("attractor approximation needs at least one map");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be > 0");
  double contraction = 0.0;
  for (const MapParams& m : maps) {
    if (!(m.rho > 1.0)) throw ArgumentError("every map needs rho > 1");
    contraction = std::max(contraction, 1.0 / m.rho);
  }

  AttractorApprox res;
  PointCloud2 prev;
  prev.points = {Complex(0.0, 0.0)};

  for (int k = 1; k <= depth_cap; ++k) {
    if (maps.size() * prev.points.size() > point_budget) break;  // refinement stops, not an error
    PointCloud2 next = hutchinson_step(maps, prev);
    res.successive_gap = hausdorff_distance(next, prev);
    res.depth = k;
    prev = std::move(next);
    if (res.successive_gap / (1.0 - contraction) <= tol) {
      res.converged = true;
      break;
    }
  }
  res.certified_bound = res.successive_gap * contraction / (1.0 - contraction);
  prev.depth = res.depth;
  prev.resolution = static_cast<int>(maps.size());
  res.cloud = std::move(prev);
  return res;
}

AttractorApprox attractor_approx(const FingerSpec& spec, int resolution, double tol, int depth_cap,
                                 std::size_t point_budget) {
  spec.validate();
  auto maps = maps_for(spec, resolution);
  return attractor_approx(std::span<const MapParams>(maps), tol, depth_cap, point_budget);
}

}  // namespace zygo
