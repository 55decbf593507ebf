#pragma once

#include <array>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "zygo/foot.hpp"
#include "zygo/perch.hpp"
#include "zygo/types.hpp"

namespace zygo {

struct SphereObstacle {
  Vec3 center;
  double radius = 1.0;
};

// Infinite cylinder, axis parallel to the y-axis. Convex, like the sphere.
struct CylinderObstacle {
  CylinderBranch branch;
};

using ObstacleShape = std::variant<SphereObstacle, CylinderObstacle>;

// Signed clearance between a segment and the obstacle surface; <= 0 on touch
// or overlap.
double segment_obstacle_distance(const Vec3& a, const Vec3& b, const ObstacleShape& obstacle);

// Contraction profile v : [0, T] -> [0, 1], continuous, non-decreasing,
// v(0) = 0, stored as piecewise-linear samples.
class TlmProfile {
 public:
  static TlmProfile linear(double engagement_time, double v_end = 1.0);
  static TlmProfile from_samples(double engagement_time,
                                 std::vector<std::pair<double, double>> samples);

  double engagement_time() const { return engagement_time_; }
  double value(double t) const;  // t clamped into [0, T]

 private:
  TlmProfile() = default;
  double engagement_time_ = 1.0;
  std::vector<std::pair<double, double>> samples_;
};

enum class TlmMode { Free, Engaged, Locked };

const char* mode_name(TlmMode mode);

struct HybridState {
  double time = 0.0;
  TlmMode mode = TlmMode::Free;
  double engaged_elapsed = 0.0;
  std::array<std::vector<double>, 4> controls;  // per-toe, one entry per phalanx
};

HybridState initial_state(const FootSpec& foot);

// time -> per-toe control vectors, each entry in [0,1].
using FreeControlFn = std::function<std::array<std::vector<double>, 4>(double)>;

// Embedded first-phalanx segment of one toe (the base of the foot).
std::pair<Vec3, Vec3> first_phalanx_segment(const FootSpec& foot, int toe,
                                            const HybridState& state);

// True when any first phalanx touches or penetrates the obstacle.
bool guard(const FootSpec& foot, const HybridState& state, const ObstacleShape& obstacle);

// Junctions under the uniform engaged control v on every phalanx.
std::vector<Complex> engaged_positions(const FingerSpec& spec, double v);

struct TlmEvent {
  enum class Kind { Engaged, Locked, Discontinuity, GuardViolation };
  Kind kind;
  double time = 0.0;
  int step = 0;
  double magnitude = 0.0;  // talon jump for Discontinuity, 0 otherwise
};

const char* event_name(TlmEvent::Kind kind);

// One fixed step of the hybrid machine. Free: controls follow free_controls,
// then the guard fires the engagement (with bisection-refined event time).
// Engaged: every control tracks v(elapsed) until elapsed reaches T, then
// Locked. Locked is absorbing; only time advances.
HybridState step(const FootSpec& foot, const HybridState& state, double dt,
                 const FreeControlFn& free_controls, const TlmProfile& profile,
                 const ObstacleShape& obstacle, std::vector<TlmEvent>* events = nullptr,
                 int step_index = 0);

struct Scenario {
  double duration = 1.0;
  double dt = 0.01;
  FreeControlFn free_controls;
  TlmProfile profile = TlmProfile::linear(1.0);
  ObstacleShape obstacle;
};

struct Snapshot {
  double time = 0.0;
  TlmMode mode = TlmMode::Free;
  std::array<std::vector<double>, 4> controls;
  std::array<Vec3, 4> talons;  // extremal junctions
};

struct Trajectory {
  std::vector<Snapshot> snapshots;  // includes the initial state
  std::vector<TlmEvent> events;
};

// Snapshot equality ignoring the time stamp (post-lock rows differ only there).
bool same_pose(const Snapshot& a, const Snapshot& b);

std::array<Vec3, 4> talon_positions(const FootSpec& foot, const HybridState& state);

Trajectory simulate(const FootSpec& foot, const Scenario& scenario);

// Free-control helpers for scenarios.
FreeControlFn constant_controls(const FootSpec& foot, double value = 0.0);
// Ramps every control of `toe` (1..4, or 0 for all toes) at `rate` per second,
// clamped to [0,1]; other toes stay at zero.
FreeControlFn ramp_controls(const FootSpec& foot, int toe, double rate);

}  // namespace zygo
