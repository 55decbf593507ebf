#include "zygo/tlm.hpp"

#include <algorithm>
#include <cmath>

namespace zygo {

namespace {

double point_segment_distance2d(double px, double py, double ax, double ay, double bx, double by) {
  double abx = bx - ax, aby = by - ay;
  double len2 = abx * abx + aby * aby;
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp(((px - ax) * abx + (py - ay) * aby) / len2, 0.0, 1.0);
  double cx = ax + s * abx, cy = ay + s * aby;
  return std::hypot(px - cx, py - cy);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = dot(ab, ab);
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

}  // namespace

double segment_obstacle_distance(const Vec3& a, const Vec3& b, const ObstacleShape& obstacle) {
  if (const auto* sphere = std::get_if<SphereObstacle>(&obstacle)) {
    return point_segment_distance(sphere->center, a, b) - sphere->radius;
  }
  const auto& cyl = std::get<CylinderObstacle>(obstacle).branch;
  // axis parallel to y: clearance lives in the xz-projection
  return point_segment_distance2d(cyl.axis_x, cyl.axis_z, a.x, a.z, b.x, b.z) - cyl.radius;
}

TlmProfile TlmProfile::linear(double engagement_time, double v_end) {
  return from_samples(engagement_time, {{0.0, 0.0}, {engagement_time, v_end}});
}

TlmProfile TlmProfile::from_samples(double engagement_time,
                                    std::vector<std::pair<double, double>> samples) {
  if (!(engagement_time > 0.0)) throw ArgumentError("engagement time must be > 0");
  if (samples.size() < 2) throw ArgumentError("profile needs at least two samples");
  if (samples.front().first != 0.0 || samples.front().second != 0.0)
    throw ArgumentError("profile must start at v(0) = 0");
  if (samples.back().first != engagement_time)
    throw ArgumentError("last profile sample must sit at t = T");
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (!(samples[i].first < samples[i + 1].first))
      throw ArgumentError("profile sample times must be strictly increasing");
    if (samples[i].second > samples[i + 1].second)
      throw ArgumentError("profile must be non-decreasing");
  }
  if (samples.back().second > 1.0) throw ArgumentError("profile values must stay within [0, 1]");
  TlmProfile p;
  p.engagement_time_ = engagement_time;
  p.samples_ = std::move(samples);
  return p;
}

double TlmProfile::value(double t) const {
  t = std::clamp(t, 0.0, engagement_time_);
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const std::pair<double, double>& s) { return v < s.first; });
  if (it == samples_.begin()) return samples_.front().second;
  if (it == samples_.end()) return samples_.back().second;
  auto lo = *(it - 1);
  auto hi = *it;
  double f = (t - lo.first) / (hi.first - lo.first);
  return lo.second + f * (hi.second - lo.second);
}

const char* mode_name(TlmMode mode) {
  switch (mode) {
    case TlmMode::Free: return "free";
    case TlmMode::Engaged: return "engaged";
    case TlmMode::Locked: return "locked";
  }
  return "?";
}

const char* event_name(TlmEvent::Kind kind) {
  switch (kind) {
    case TlmEvent::Kind::Engaged: return "engaged";
    case TlmEvent::Kind::Locked: return "locked";
    case TlmEvent::Kind::Discontinuity: return "discontinuity";
    case TlmEvent::Kind::GuardViolation: return "guard_violation";
  }
  return "?";
}

HybridState initial_state(const FootSpec& foot) {
  foot.validate();
  HybridState s;
  for (int i = 0; i < 4; ++i)
    s.controls[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(foot.fingers[static_cast<std::size_t>(i)].phalanx_count), 0.0);
  return s;
}

std::pair<Vec3, Vec3> first_phalanx_segment(const FootSpec& foot, int toe,
                                            const HybridState& state) {
  const FingerSpec& f = foot.finger(toe);
  double v1 = state.controls[static_cast<std::size_t>(toe - 1)].at(0);
  double angle = f.theta0 + f.chirality * f.omega * v1;
  Complex tip = (1.0 / f.rho) * Complex(std::cos(angle), -std::sin(angle));
  return {Vec3{0.0, 0.0, 0.0}, embed_point(tip, foot.plane_angle(toe))};
}

bool guard(const FootSpec& foot, const HybridState& state, const ObstacleShape& obstacle) {
  for (int toe = 1; toe <= 4; ++toe) {
    auto [a, b] = first_phalanx_segment(foot, toe, state);
    if (segment_obstacle_distance(a, b, obstacle) <= 0.0) return true;
  }
  return false;
}

std::vector<Complex> engaged_positions(const FingerSpec& spec, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("engaged control must lie in [0, 1]");
  return junction_positions(spec, ControlSequence(static_cast<std::size_t>(spec.phalanx_count), v));
}

std::array<Vec3, 4> talon_positions(const FootSpec& foot, const HybridState& state) {
  std::array<Vec3, 4> out;
  for (int i = 0; i < 4; ++i) {
    auto xs = junction_positions(foot.fingers[static_cast<std::size_t>(i)],
                                 state.controls[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = embed_point(xs.back(), foot.plane_angles[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

void set_uniform_controls(const FootSpec& foot, HybridState& state, double v) {
  for (int i = 0; i < 4; ++i)
    state.controls[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(foot.fingers[static_cast<std::size_t>(i)].phalanx_count), v);
}

void validate_controls(const FootSpec& foot, const std::array<std::vector<double>, 4>& controls) {
  for (int i = 0; i < 4; ++i) {
    const auto& c = controls[static_cast<std::size_t>(i)];
    if (c.size() != static_cast<std::size_t>(foot.fingers[static_cast<std::size_t>(i)].phalanx_count))
      throw ArgumentError("free controls must supply one value per phalanx");
    for (double v : c) {
      if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("free controls must lie in [0, 1]");
    }
  }
}

double max_talon_jump(const FootSpec& foot, const HybridState& before, const HybridState& after) {
  auto a = talon_positions(foot, before);
  auto b = talon_positions(foot, after);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, norm(b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]));
  return worst;
}

// Bisects the guard crossing inside (t_lo, t_hi] down to dt * 1e-6.
double refine_event_time(const FootSpec& foot, const FreeControlFn& free_controls,
                         const ObstacleShape& obstacle, const HybridState& proto, double t_lo,
                         double t_hi) {
  HybridState probe = proto;
  auto touched = [&](double t) {
    probe.controls = free_controls(t);
    return guard(foot, probe, obstacle);
  };
  if (touched(t_lo)) return t_lo;
  double tol = (t_hi - t_lo) * 1e-6;
  while (t_hi - t_lo > tol) {
    double mid = 0.5 * (t_lo + t_hi);
    if (touched(mid))
      t_hi = mid;
    else
      t_lo = mid;
  }
  return t_hi;
}

}  // namespace

HybridState step(const FootSpec& foot, const HybridState& state, double dt,
                 const FreeControlFn& free_controls, const TlmProfile& profile,
                 const ObstacleShape& obstacle, std::vector<TlmEvent>* events, int step_index) {
  if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
  HybridState next = state;
  next.time = state.time + dt;

  switch (state.mode) {
    case TlmMode::Free: {
      next.controls = free_controls(next.time);
      validate_controls(foot, next.controls);
      if (guard(foot, next, obstacle)) {
        double event_time = refine_event_time(foot, free_controls, obstacle, next, state.time, next.time);
        HybridState before_reset = next;
        next.mode = TlmMode::Engaged;
        next.engaged_elapsed = 0.0;
        set_uniform_controls(foot, next, profile.value(0.0));
        if (events) {
          events->push_back({TlmEvent::Kind::Engaged, event_time, step_index, 0.0});
          double jump = max_talon_jump(foot, before_reset, next);
          if (jump > 1e-9)
            events->push_back({TlmEvent::Kind::Discontinuity, next.time, step_index, jump});
        }
      }
      break;
    }
    case TlmMode::Engaged: {
      next.engaged_elapsed = state.engaged_elapsed + dt;
      double T = profile.engagement_time();
      // accumulated dt rounds a hair below k*dt; do not miss the lock step
      bool lock = next.engaged_elapsed >= T - dt * 1e-9;
      set_uniform_controls(foot, next, lock ? profile.value(T)
                                            : profile.value(std::min(next.engaged_elapsed, T)));
      if (events && !guard(foot, next, obstacle))
        events->push_back({TlmEvent::Kind::GuardViolation, next.time, step_index, 0.0});
      if (lock) {
        next.mode = TlmMode::Locked;
        next.engaged_elapsed = T;
        if (events) events->push_back({TlmEvent::Kind::Locked, next.time, step_index, 0.0});
      }
      break;
    }
    case TlmMode::Locked:
      break;  // absorbing: only time advances
  }
  return next;
}

bool same_pose(const Snapshot& a, const Snapshot& b) {
  return a.mode == b.mode && a.controls == b.controls &&
         std::equal(a.talons.begin(), a.talons.end(), b.talons.begin(),
                    [](const Vec3& p, const Vec3& q) { return p.x == q.x && p.y == q.y && p.z == q.z; });
}

Trajectory simulate(const FootSpec& foot, const Scenario& scenario) {
  foot.validate();
  if (!(scenario.duration > 0.0)) throw ArgumentError("duration must be > 0");
  if (!(scenario.dt > 0.0)) throw ArgumentError("dt must be > 0");
  if (!scenario.free_controls) throw ArgumentError("scenario needs a free-control function");

  HybridState state = initial_state(foot);
  state.controls = scenario.free_controls(0.0);
  validate_controls(foot, state.controls);

  Trajectory traj;
  auto snapshot = [&](const HybridState& s) {
    traj.snapshots.push_back({s.time, s.mode, s.controls, talon_positions(foot, s)});
  };
  snapshot(state);

  int steps = static_cast<int>(std::ceil(scenario.duration / scenario.dt - 1e-12));
  for (int i = 1; i <= steps; ++i) {
    state = step(foot, state, scenario.dt, scenario.free_controls, scenario.profile,
                 scenario.obstacle, &traj.events, i);
    snapshot(state);
  }
  return traj;
}

FreeControlFn constant_controls(const FootSpec& foot, double value) {
  std::array<std::vector<double>, 4> controls;
  for (int i = 0; i < 4; ++i)
    controls[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(foot.fingers[static_cast<std::size_t>(i)].phalanx_count), value);
  return [controls](double) { return controls; };
}

FreeControlFn ramp_controls(const FootSpec& foot, int toe, double rate) {
  std::array<std::size_t, 4> counts;
  for (int i = 0; i < 4; ++i)
    counts[static_cast<std::size_t>(i)] =
        static_cast<std::size_t>(foot.fingers[static_cast<std::size_t>(i)].phalanx_count);
  return [counts, toe, rate](double t) {
    std::array<std::vector<double>, 4> controls;
    double v = std::clamp(rate * t, 0.0, 1.0);
    for (int i = 0; i < 4; ++i) {
      bool active = toe == 0 || toe == i + 1;
      controls[static_cast<std::size_t>(i)].assign(counts[static_cast<std::size_t>(i)],
                                                   active ? v : 0.0);
    }
    return controls;
  };
}

}  // namespace zygo
