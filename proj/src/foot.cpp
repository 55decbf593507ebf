#include "zygo/foot.hpp"

#include <cmath>
#include <string>

namespace zygo {

const FingerSpec& FootSpec::finger(int index) const {
  if (index < 1 || index > 4) throw ArgumentError("finger index must be in 1..4");
  return fingers[static_cast<std::size_t>(index - 1)];
}

FingerSpec& FootSpec::finger(int index) {
  if (index < 1 || index > 4) throw ArgumentError("finger index must be in 1..4");
  return fingers[static_cast<std::size_t>(index - 1)];
}

double FootSpec::plane_angle(int index) const {
  if (index < 1 || index > 4) throw ArgumentError("finger index must be in 1..4");
  return plane_angles[static_cast<std::size_t>(index - 1)];
}

void FootSpec::validate() const {
  for (const FingerSpec& f : fingers) f.validate();
  for (double a : plane_angles) {
    if (!(std::abs(a) < kPi / 2.0)) throw ArgumentError("plane angles must satisfy |angle| < pi/2");
  }
}

FootSpec default_parrot_foot() {
  FootSpec foot;
  const int counts[4] = {2, 3, 4, 5};
  const bool forward[4] = {true, false, true, false};
  const double planes[4] = {kPi / 12.0, kPi / 12.0, -kPi / 12.0, -kPi / 12.0};
  for (int i = 0; i < 4; ++i) {
    FingerSpec f;
    f.rho = kGoldenMean;
    f.omega = kPi / 6.0;
    f.theta0 = forward[i] ? 0.0 : kPi;
    f.chirality = forward[i] ? +1 : -1;
    f.phalanx_count = counts[i];
    f.control_set = ControlSet::interval();
    foot.fingers[static_cast<std::size_t>(i)] = f;
    foot.plane_angles[static_cast<std::size_t>(i)] = planes[i];
  }
  return foot;
}

Vec3 embed_point(Complex p, double plane_angle) {
  return {p.real() * std::cos(plane_angle), p.real() * std::sin(plane_angle), p.imag()};
}

PointCloud3 embed_finger(const PointCloud2& cloud, double plane_angle) {
  PointCloud3 out;
  out.points.reserve(cloud.points.size());
  for (const Complex& p : cloud.points) out.points.push_back(embed_point(p, plane_angle));
  return out;
}

PointCloud3 foot_reachable(const FootSpec& foot, int finger_index, int depth, int resolution,
                           std::size_t point_budget) {
  const FingerSpec& f = foot.finger(finger_index);
  if (depth > f.phalanx_count)
    throw ArgumentError("depth " + std::to_string(depth) + " exceeds the phalanx count " +
                        std::to_string(f.phalanx_count));
  return embed_finger(reachable_set(f, depth, resolution, point_budget),
                      foot.plane_angle(finger_index));
}

std::array<std::vector<Vec3>, 4> foot_pose(const FootSpec& foot,
                                           const std::array<ControlSequence, 4>& seqs) {
  std::array<std::vector<Vec3>, 4> out;
  for (int i = 0; i < 4; ++i) {
    auto planar = junction_positions(foot.fingers[static_cast<std::size_t>(i)],
                                     seqs[static_cast<std::size_t>(i)]);
    auto& chain = out[static_cast<std::size_t>(i)];
    chain.reserve(planar.size());
    for (const Complex& p : planar)
      chain.push_back(embed_point(p, foot.plane_angles[static_cast<std::size_t>(i)]));
  }
  return out;
}

}  // namespace zygo
