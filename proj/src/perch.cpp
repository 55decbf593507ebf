#include "zygo/perch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zygo/newton.hpp"

namespace zygo {

namespace {

constexpr double kRangeSlack = 1e-9;

double wrap_angle(double theta) {
  double two_pi = 2.0 * kPi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

double semi_axis_for(double radius, double plane_angle, EllipseMode mode) {
  double c = std::cos(plane_angle);
  return mode == EllipseMode::Paper ? radius * c : radius / c;
}

bool t_in_range(double t) { return t >= -kRangeSlack && t <= 1.0 + kRangeSlack; }

double cross_im(Complex a, Complex b) {
  // Im(a * conj(b))
  return a.imag() * b.real() - a.real() * b.imag();
}

}  // namespace

EllipseSection EllipseSection::from_branch(const CylinderBranch& branch, double plane_angle,
                                           EllipseMode mode) {
  if (!(branch.radius > 0.0)) throw ArgumentError("branch radius must be > 0");
  if (!(std::abs(plane_angle) < kPi / 2.0)) throw ArgumentError("plane angle must satisfy |angle| < pi/2");
  EllipseSection e;
  // in-plane point where the axis pierces the finger plane
  e.center = Complex(branch.axis_x / std::cos(plane_angle), branch.axis_z);
  e.semi_axis_a = semi_axis_for(branch.radius, plane_angle, mode);
  e.semi_axis_b = branch.radius;
  e.plane_angle = plane_angle;
  e.mode = mode;
  return e;
}

Complex ellipse_point(const EllipseSection& e, double theta) {
  return e.center + Complex(e.semi_axis_a * std::cos(theta), e.semi_axis_b * std::sin(theta));
}

Complex ellipse_tangent(const EllipseSection& e, double theta) {
  return {-e.semi_axis_a * std::sin(theta), e.semi_axis_b * std::cos(theta)};
}

PhalanxLine phalanx_line(const FingerSpec& spec, const ControlSequence& seq, int k) {
  PhalanxSegment seg = phalanx_segment(spec, seq, k);
  return {seg.a, seg.direction};
}

std::array<double, 3> tangency_residual(const PhalanxLine& line, const EllipseSection& e, double t,
                                        double theta) {
  Complex p = line.base + t * line.direction;
  Complex g = ellipse_point(e, theta);
  Complex tg = ellipse_tangent(e, theta);
  return {p.real() - g.real(), p.imag() - g.imag(), cross_im(line.direction, tg)};
}

std::array<double, 3> tangency_residual(const FingerSpec& spec, const ControlSequence& seq, int k,
                                        const EllipseSection& e, double t, double theta) {
  return tangency_residual(phalanx_line(spec, seq, k), e, t, theta);
}

namespace {

// Residual and Jacobian of the per-finger tangency block. Unknown layout:
// (t, theta) and optionally (c_z, r) columns for the joint problem.
struct TangencyBlock {
  PhalanxLine line;
  double plane_angle;
  EllipseMode mode;
  double axis_in_plane_x;  // in-plane horizontal center coordinate (fixed)

  void residual(double t, double theta, double c_z, double r, double* out) const {
    double a = semi_axis_for(r, plane_angle, mode);
    Complex center(axis_in_plane_x, c_z);
    Complex g = center + Complex(a * std::cos(theta), r * std::sin(theta));
    Complex tg(-a * std::sin(theta), r * std::cos(theta));
    Complex p = line.base + t * line.direction;
    out[0] = p.real() - g.real();
    out[1] = p.imag() - g.imag();
    out[2] = cross_im(line.direction, tg);
  }

  // Columns: t, theta, c_z, r (row-major stride given by the caller).
  void jacobian(double t, double theta, double r, double* row0, double* row1, double* row2,
                int col_t, int col_theta, int col_cz, int col_r) const {
    (void)t;
    double dadr = mode == EllipseMode::Paper ? std::cos(plane_angle) : 1.0 / std::cos(plane_angle);
    double a = dadr * r;
    double ct = std::cos(theta), st = std::sin(theta);
    Complex tg(-a * st, r * ct);
    Complex d2g(-a * ct, -r * st);          // d tangent / d theta
    Complex dg_dr(-dadr * st, ct);          // d tangent / d r
    Complex g_dtheta = tg;                  // d point / d theta
    Complex g_dr(dadr * ct, st);            // d point / d r

    row0[col_t] = line.direction.real();
    row1[col_t] = line.direction.imag();
    row2[col_t] = 0.0;

    row0[col_theta] = -g_dtheta.real();
    row1[col_theta] = -g_dtheta.imag();
    row2[col_theta] = cross_im(line.direction, d2g);

    if (col_cz >= 0) {
      row0[col_cz] = 0.0;
      row1[col_cz] = -1.0;
      row2[col_cz] = 0.0;
      row0[col_r] = -g_dr.real();
      row1[col_r] = -g_dr.imag();
      row2[col_r] = cross_im(line.direction, dg_dr);
    }
  }
};

double norm3(const std::array<double, 3>& r) {
  return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

TangencySolution refine_tangency(const PhalanxLine& line, const EllipseSection& e, double t0,
                                 double theta0, const PerchOptions& opts) {
  auto residual_fn = [&](const double* x, double* r) {
    auto res = tangency_residual(line, e, x[0], x[1]);
    r[0] = res[0];
    r[1] = res[1];
    r[2] = res[2];
  };
  TangencyBlock block{line, e.plane_angle, e.mode, e.center.real()};
  auto jacobian_fn = [&](const double* x, double* jac) {
    block.jacobian(x[0], x[1], e.semi_axis_b, jac, jac + 2, jac + 4, 0, 1, -1, -1);
  };
  NewtonOptions nopts;
  nopts.tolerance = opts.tangency_tol;
  nopts.max_iterations = opts.max_iterations;
  NewtonResult res = damped_newton(3, 2, residual_fn, jacobian_fn, {t0, theta0}, nopts);

  TangencySolution sol;
  sol.t = res.x[0];
  sol.theta = wrap_angle(res.x[1]);
  sol.residual_norm = res.residual_norm;
  sol.converged = res.converged;
  sol.t_in_range = t_in_range(sol.t);
  return sol;
}

bool better_tangency(const TangencySolution& a, const TangencySolution& b) {
  if (a.converged != b.converged) return a.converged;
  return a.residual_norm < b.residual_norm;
}

}  // namespace

TangencySolution solve_tangency(const PhalanxLine& line, const EllipseSection& e,
                                std::optional<std::pair<double, double>> initial,
                                const PerchOptions& opts) {
  if (initial) return refine_tangency(line, e, initial->first, initial->second, opts);

  // coarse scan, then refine the most promising starts
  struct Start {
    double score, t, theta;
  };
  std::vector<Start> starts;
  starts.reserve(static_cast<std::size_t>(opts.t_grid) * opts.theta_grid);
  for (int i = 0; i < opts.t_grid; ++i) {
    double t = opts.t_grid == 1 ? 0.5 : static_cast<double>(i) / (opts.t_grid - 1);
    for (int j = 0; j < opts.theta_grid; ++j) {
      double theta = 2.0 * kPi * j / opts.theta_grid;
      starts.push_back({norm3(tangency_residual(line, e, t, theta)), t, theta});
    }
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Start& a, const Start& b) { return a.score < b.score; });
  std::size_t tries = std::min<std::size_t>(starts.size(), 8);

  TangencySolution best;
  for (std::size_t i = 0; i < tries; ++i) {
    TangencySolution cand = refine_tangency(line, e, starts[i].t, starts[i].theta, opts);
    if (better_tangency(cand, best)) best = cand;
  }
  return best;
}

TangencySolution solve_tangency(const FingerSpec& spec, const ControlSequence& seq, int k,
                                const EllipseSection& e,
                                std::optional<std::pair<double, double>> initial,
                                const PerchOptions& opts) {
  return solve_tangency(phalanx_line(spec, seq, k), e, initial, opts);
}

namespace {

struct JointSystem {
  TangencyBlock fwd, bwd;

  void residual(const double* u, double* r) const {
    fwd.residual(u[0], u[1], u[4], u[5], r);
    bwd.residual(u[2], u[3], u[4], u[5], r + 3);
  }

  void jacobian(const double* u, double* jac) const {
    std::fill(jac, jac + 36, 0.0);
    fwd.jacobian(u[0], u[1], u[5], jac, jac + 6, jac + 12, 0, 1, 4, 5);
    bwd.jacobian(u[2], u[3], u[5], jac + 18, jac + 24, jac + 30, 2, 3, 4, 5);
  }
};

struct JointCandidate {
  std::array<double, 6> u;
  double residual_norm;
};

bool feasible_joint(const JointCandidate& c, const JointSystem& sys, double min_radius) {
  double r = c.u[5];
  if (!(r >= min_radius)) return false;
  if (!t_in_range(c.u[0]) || !t_in_range(c.u[2])) return false;
  // a tangent vector collapsing to zero makes the parallelism rows vacuous
  double a = semi_axis_for(r, sys.fwd.plane_angle, sys.fwd.mode);
  if (std::min(std::abs(a), std::abs(r)) < 1e-9) return false;
  return true;
}

JointCandidate run_joint_newton(const JointSystem& sys, const std::array<double, 6>& u0,
                                const PerchOptions& opts) {
  auto residual_fn = [&](const double* x, double* r) { sys.residual(x, r); };
  auto jacobian_fn = [&](const double* x, double* j) { sys.jacobian(x, j); };
  NewtonOptions nopts;
  nopts.tolerance = opts.tangency_tol;
  nopts.max_iterations = opts.max_iterations;
  NewtonResult res = damped_newton(6, 6, residual_fn, jacobian_fn,
                                   std::vector<double>(u0.begin(), u0.end()), nopts);
  JointCandidate c;
  std::copy(res.x.begin(), res.x.end(), c.u.begin());
  c.residual_norm = res.residual_norm;
  return c;
}

BranchSolution pack_branch_solution(const JointSystem& sys, const PhalanxLine& fwd,
                                    const PhalanxLine& bwd, const JointCandidate& c,
                                    double plane_angle, EllipseMode mode,
                                    const PerchOptions& opts, bool feasible) {
  BranchSolution out;
  out.cylinder.radius = c.u[5];
  out.cylinder.axis_x = 0.0;
  out.cylinder.axis_z = c.u[4];
  out.residual_norm = c.residual_norm;

  EllipseSection e;
  e.center = Complex(sys.fwd.axis_in_plane_x, c.u[4]);
  e.semi_axis_a = semi_axis_for(c.u[5], plane_angle, mode);
  e.semi_axis_b = c.u[5];
  e.plane_angle = plane_angle;
  e.mode = mode;

  auto fill = [&](const PhalanxLine& line, double t, double theta, TangencySolution& sol) {
    sol.t = t;
    sol.theta = wrap_angle(theta);
    sol.residual_norm = norm3(tangency_residual(line, e, t, theta));
    sol.converged = sol.residual_norm <= opts.tangency_tol;
    sol.t_in_range = t_in_range(t);
  };
  fill(fwd, c.u[0], c.u[1], out.tangency_fwd);
  fill(bwd, c.u[2], c.u[3], out.tangency_bwd);

  out.dir_fwd = fwd.direction;
  out.dir_bwd = bwd.direction;
  out.converged = feasible && c.residual_norm <= opts.tangency_tol;
  out.grasping = out.converged && grasp_condition(out.dir_fwd, out.dir_bwd, opts.grasp_strictness);
  return out;
}

}  // namespace

BranchSolution solve_branch_lines(const PhalanxLine& fwd, const PhalanxLine& bwd,
                                  double plane_angle, EllipseMode mode,
                                  std::optional<BranchGuess> initial, const PerchOptions& opts) {
  if (!(std::abs(plane_angle) < kPi / 2.0)) throw ArgumentError("plane angle must satisfy |angle| < pi/2");
  JointSystem sys;
  sys.fwd = {fwd, plane_angle, mode, 0.0};
  sys.bwd = {bwd, plane_angle, mode, 0.0};

  if (initial) {
    JointCandidate c = run_joint_newton(
        sys, {initial->t_fwd, initial->theta_fwd, initial->t_bwd, initial->theta_bwd, initial->c_z,
              initial->r},
        opts);
    bool ok = c.residual_norm <= opts.tangency_tol && feasible_joint(c, sys, opts.min_radius);
    return pack_branch_solution(sys, fwd, bwd, c, plane_angle, mode, opts, ok);
  }

  const double dadr = mode == EllipseMode::Paper ? std::cos(plane_angle) : 1.0 / std::cos(plane_angle);
  JointCandidate best{};
  best.residual_norm = std::numeric_limits<double>::infinity();
  bool have_feasible = false;
  JointCandidate best_any{};
  best_any.residual_norm = std::numeric_limits<double>::infinity();

  for (int it_f = 0; it_f < opts.t_grid; ++it_f) {
    double tf0 = opts.t_grid == 1 ? 0.5 : static_cast<double>(it_f) / (opts.t_grid - 1);
    for (int jf = 0; jf < opts.theta_grid; ++jf) {
      double thf0 = 2.0 * kPi * jf / opts.theta_grid;
      // seed center height and radius from the forward incidence equations
      Complex p = fwd.base + tf0 * fwd.direction;
      double r0 = 0.5;
      double ct = std::cos(thf0);
      if (std::abs(ct) > 1e-6) {
        double cand = p.real() / (dadr * ct);
        if (cand > 0.01 && cand < 10.0) r0 = cand;
      }
      double cz0 = p.imag() - r0 * std::sin(thf0);
      for (int ib = 0; ib < opts.t_grid; ib += 2) {
        double tb0 = opts.t_grid == 1 ? 0.5 : static_cast<double>(ib) / (opts.t_grid - 1);
        for (int jb = 0; jb < opts.theta_grid; jb += 2) {
          double thb0 = 2.0 * kPi * jb / opts.theta_grid;
          JointCandidate c = run_joint_newton(sys, {tf0, thf0, tb0, thb0, cz0, r0}, opts);
          if (!(c.residual_norm <= opts.tangency_tol)) continue;
          if (c.residual_norm < best_any.residual_norm) best_any = c;
          if (!feasible_joint(c, sys, opts.min_radius)) continue;
          // smallest residual wins; treat residuals within tolerance as ties
          // and prefer the smaller radius
          bool take = false;
          if (!have_feasible) {
            take = true;
          } else if (c.u[5] < best.u[5] - 1e-12) {
            take = true;
          }
          if (take) {
            best = c;
            have_feasible = true;
          }
        }
      }
    }
  }

  if (have_feasible) return pack_branch_solution(sys, fwd, bwd, best, plane_angle, mode, opts, true);
  return pack_branch_solution(sys, fwd, bwd, best_any, plane_angle, mode, opts, false);
}

BranchSolution solve_branch(const FingerProblem& fwd, const FingerProblem& bwd, double plane_angle,
                            EllipseMode mode, std::optional<BranchGuess> initial,
                            const PerchOptions& opts) {
  PhalanxLine lf = phalanx_line(fwd.spec, fwd.seq, fwd.k);
  PhalanxLine lb = phalanx_line(bwd.spec, bwd.seq, bwd.k);
  BranchSolution sol = solve_branch_lines(lf, lb, plane_angle, mode, initial, opts);
  sol.k_fwd = fwd.k;
  sol.k_bwd = bwd.k;
  sol.controls_fwd = fwd.seq;
  sol.controls_bwd = bwd.seq;
  return sol;
}

bool grasp_condition(Complex dir_fwd, Complex dir_bwd, double strictness) {
  if (dir_fwd == Complex(0.0, 0.0) || dir_bwd == Complex(0.0, 0.0))
    throw ArgumentError("grasp condition needs nonzero directions");
  double dot = dir_fwd.real() * dir_bwd.real() + dir_fwd.imag() * dir_bwd.imag();
  return dot < -strictness;
}

namespace {

struct GridCandidate {
  ControlSequence seq;
  int k;
  TangencySolution sol;
  Complex direction;
};

std::vector<GridCandidate> tangency_candidates(const FingerSpec& spec, const EllipseSection& e,
                                               const PerchOptions& opts, int grid_resolution) {
  auto values = spec.control_set.materialize(grid_resolution);
  const std::size_t m = values.size();
  const int K = spec.phalanx_count;

  std::vector<GridCandidate> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(K), 0);
  ControlSequence seq(static_cast<std::size_t>(K));
  while (true) {
    for (int i = 0; i < K; ++i) seq[static_cast<std::size_t>(i)] = values[idx[static_cast<std::size_t>(i)]];
    for (int k = 1; k <= K; ++k) {
      TangencySolution sol = solve_tangency(spec, seq, k, e, {}, opts);
      // t in [0,1] is part of the tangency system's domain
      if (sol.residual_norm <= opts.search_tol && sol.t_in_range) {
        out.push_back({seq, k, sol, phalanx_direction(spec, seq, k)});
      }
    }
    int pos = K - 1;
    while (pos >= 0) {
      if (++idx[static_cast<std::size_t>(pos)] < m) break;
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

}  // namespace

std::vector<BranchSolution> search_grasp(const FingerSpec& fwd_spec, const FingerSpec& bwd_spec,
                                         double plane_angle, EllipseMode mode,
                                         const CylinderBranch& branch, int grid_resolution,
                                         std::size_t budget, const PerchOptions& opts) {
  fwd_spec.validate();
  bwd_spec.validate();
  auto values_f = fwd_spec.control_set.materialize(grid_resolution);
  auto values_b = bwd_spec.control_set.materialize(grid_resolution);
  double combos = std::pow(static_cast<double>(values_f.size()), fwd_spec.phalanx_count) *
                  std::pow(static_cast<double>(values_b.size()), bwd_spec.phalanx_count);
  if (combos > static_cast<double>(budget)) {
    throw ResourceError("control grid of " + std::to_string(static_cast<long long>(combos)) +
                        " pairs exceeds the search budget of " + std::to_string(budget));
  }

  EllipseSection e = EllipseSection::from_branch(branch, plane_angle, mode);
  auto fwd_cands = tangency_candidates(fwd_spec, e, opts, grid_resolution);
  auto bwd_cands = tangency_candidates(bwd_spec, e, opts, grid_resolution);

  std::vector<BranchSolution> out;
  for (const GridCandidate& cf : fwd_cands) {
    for (const GridCandidate& cb : bwd_cands) {
      double rn = std::hypot(cf.sol.residual_norm, cb.sol.residual_norm);
      if (rn > opts.search_tol) continue;
      BranchSolution s;
      s.cylinder = branch;
      s.tangency_fwd = cf.sol;
      s.tangency_bwd = cb.sol;
      s.k_fwd = cf.k;
      s.k_bwd = cb.k;
      s.controls_fwd = cf.seq;
      s.controls_bwd = cb.seq;
      s.dir_fwd = cf.direction;
      s.dir_bwd = cb.direction;
      s.residual_norm = rn;
      s.converged = cf.sol.t_in_range && cb.sol.t_in_range;
      s.grasping = s.converged && grasp_condition(s.dir_fwd, s.dir_bwd, opts.grasp_strictness);
      out.push_back(std::move(s));
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const BranchSolution& a, const BranchSolution& b) {
    if (a.residual_norm != b.residual_norm) return a.residual_norm < b.residual_norm;
    if (a.controls_fwd != b.controls_fwd) return a.controls_fwd < b.controls_fwd;
    if (a.controls_bwd != b.controls_bwd) return a.controls_bwd < b.controls_bwd;
    if (a.k_fwd != b.k_fwd) return a.k_fwd < b.k_fwd;
    return a.k_bwd < b.k_bwd;
  });
  return out;
}

}  // namespace zygo
