#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "zygo/finger.hpp"
#include "zygo/types.hpp"

namespace zygo {

// Branch model: a cylinder with axis parallel to the y-axis through
// (axis_x, 0, axis_z).
struct CylinderBranch {
  double radius = 1.0;
  double axis_x = 0.0;
  double axis_z = 0.0;
};

// In-plane semi-axis convention for the cylinder section. Paper squashes the
// horizontal semi-axis to r cos(angle); Geometric carries the true slanted-cut
// section r / cos(angle). They coincide at plane angle 0.
enum class EllipseMode { Paper, Geometric };

struct EllipseSection {
  Complex center;
  double semi_axis_a = 1.0;  // in-plane horizontal
  double semi_axis_b = 1.0;  // = branch radius
  double plane_angle = 0.0;
  EllipseMode mode = EllipseMode::Paper;

  static EllipseSection from_branch(const CylinderBranch& branch, double plane_angle,
                                    EllipseMode mode);
};

Complex ellipse_point(const EllipseSection& e, double theta);
Complex ellipse_tangent(const EllipseSection& e, double theta);

// phi(t) = base + t * direction; base is the junction before the phalanx.
struct PhalanxLine {
  Complex base;
  Complex direction;
};

PhalanxLine phalanx_line(const FingerSpec& spec, const ControlSequence& seq, int k);

// (incidence re, incidence im, parallelism). The parallelism component is the
// cross product Im(direction * conj(ellipse tangent)), zero exactly when the
// phalanx direction is parallel (mod pi) to the section tangent.
std::array<double, 3> tangency_residual(const PhalanxLine& line, const EllipseSection& e, double t,
                                        double theta);
std::array<double, 3> tangency_residual(const FingerSpec& spec, const ControlSequence& seq, int k,
                                        const EllipseSection& e, double t, double theta);

struct TangencySolution {
  double t = 0.0;
  double theta = 0.0;  // normalized into [0, 2pi)
  double residual_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool t_in_range = false;  // t in [0,1] up to 1e-9 slack
};

struct PerchOptions {
  double tangency_tol = 1e-10;  // single tangency / joint Newton target
  double search_tol = 1e-8;     // least-squares acceptance for grid search
  int max_iterations = 100;
  int t_grid = 8;
  int theta_grid = 16;
  double min_radius = 1e-6;  // rejects collapse-to-point branch solutions
  double grasp_strictness = 0.0;
};

// Tangency of one fixed phalanx against a fixed section: 3 equations in
// (t, theta), damped Gauss-Newton, multistart over a coarse grid scan unless
// an initial guess is supplied. Non-convergence is a result, not an error.
TangencySolution solve_tangency(const FingerSpec& spec, const ControlSequence& seq, int k,
                                const EllipseSection& e,
                                std::optional<std::pair<double, double>> initial = {},
                                const PerchOptions& opts = {});
TangencySolution solve_tangency(const PhalanxLine& line, const EllipseSection& e,
                                std::optional<std::pair<double, double>> initial = {},
                                const PerchOptions& opts = {});

struct FingerProblem {
  FingerSpec spec;
  ControlSequence seq;
  int k = 1;  // candidate tangent phalanx
};

struct BranchSolution {
  CylinderBranch cylinder;
  TangencySolution tangency_fwd;
  TangencySolution tangency_bwd;
  int k_fwd = 0;
  int k_bwd = 0;
  ControlSequence controls_fwd;
  ControlSequence controls_bwd;
  Complex dir_fwd;  // tangent phalanx directions, for the grasp test
  Complex dir_bwd;
  double residual_norm = std::numeric_limits<double>::infinity();
  bool converged = false;  // residuals at tolerance, radius positive, both t in [0,1]
  bool grasping = false;
};

struct BranchGuess {
  double t_fwd, theta_fwd, t_bwd, theta_bwd, c_z, r;
};

// Joint problem: both phalanxes tangent to one section with unknown center
// height and radius. 6 equations, 6 unknowns (t, theta per finger + c_z, r),
// damped Newton with grid multistart; among feasible converged solutions the
// smallest residual wins, ties broken by smallest radius.
BranchSolution solve_branch(const FingerProblem& fwd, const FingerProblem& bwd, double plane_angle,
                            EllipseMode mode, std::optional<BranchGuess> initial = {},
                            const PerchOptions& opts = {});
BranchSolution solve_branch_lines(const PhalanxLine& fwd, const PhalanxLine& bwd,
                                  double plane_angle, EllipseMode mode,
                                  std::optional<BranchGuess> initial = {},
                                  const PerchOptions& opts = {});

// Strictly negative scalar product of the two tangent phalanx directions.
bool grasp_condition(Complex dir_fwd, Complex dir_bwd, double strictness = 0.0);

// Exhaustive control-grid search against a fixed branch: every control pair
// and phalanx-index pair whose joint least-squares tangency residual passes
// search_tol, with stability (t in range) and grasping flags. Sorted by
// (residual, controls, phalanx indices); deterministic.
std::vector<BranchSolution> search_grasp(const FingerSpec& fwd_spec, const FingerSpec& bwd_spec,
                                         double plane_angle, EllipseMode mode,
                                         const CylinderBranch& branch, int grid_resolution,
                                         std::size_t budget = 10'000'000,
                                         const PerchOptions& opts = {});

}  // namespace zygo
