#pragma once

#include <array>
#include <vector>

#include "zygo/finger.hpp"
#include "zygo/reachability.hpp"
#include "zygo/types.hpp"

namespace zygo {

// Four planar fingers sharing the origin junction, each living in a vertical
// plane through the z-axis at angle plane_angles[i] from the xz-plane.
struct FootSpec {
  std::array<FingerSpec, 4> fingers;
  std::array<double, 4> plane_angles{};  // |angle| < pi/2

  // 1-based accessors matching the toe numbering used throughout.
  const FingerSpec& finger(int index) const;
  FingerSpec& finger(int index);
  double plane_angle(int index) const;

  void validate() const;
};

// Zygodactyl arrangement: toes 1,3 forward (theta0 = 0), toes 2,4 backward
// (theta0 = pi, mirrored rotation sense); plane angles +pi/12 for toes 1,2 and
// -pi/12 for toes 3,4; golden-mean scaling; phalanx counts 2,3,4,5.
FootSpec default_parrot_foot();

struct PointCloud3 {
  std::vector<Vec3> points;
};

// x + i z  ->  (x cos angle, x sin angle, z): place the plane copy of C into
// 3-space, rotated about the z-axis.
Vec3 embed_point(Complex p, double plane_angle);
PointCloud3 embed_finger(const PointCloud2& cloud, double plane_angle);

// Reachable set of the toe's extremal junction, embedded in 3-space.
PointCloud3 foot_reachable(const FootSpec& foot, int finger_index, int depth, int resolution,
                           std::size_t point_budget = kDefaultPointBudget);

// Embedded junction chains for one control sequence per toe.
std::array<std::vector<Vec3>, 4> foot_pose(const FootSpec& foot,
                                           const std::array<ControlSequence, 4>& seqs);

}  // namespace zygo
