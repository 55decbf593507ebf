#pragma once

#include <functional>
#include <vector>

namespace zygo {

struct NewtonOptions {
  double tolerance = 1e-10;      // residual 2-norm target
  int max_iterations = 100;
  double min_damping = 9.5367431640625e-07;  // 2^-20, line-search floor
};

struct NewtonResult {
  std::vector<double> x;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

// residual(x, r): writes m residual components. jacobian(x, J): writes the
// m x n Jacobian row-major.
using ResidualFn = std::function<void(const double*, double*)>;
using JacobianFn = std::function<void(const double*, double*)>;

// In-place LU solve with partial pivoting; A is n x n row-major and gets
// destroyed, b becomes the solution. Returns false on a vanishing pivot.
bool solve_linear(int n, double* a, double* b);

// Damped (Gauss-)Newton on m equations in n unknowns, m >= n. Square systems
// take LU steps; rectangular or singular ones fall back to regularized normal
// equations. Step lengths halve until the residual norm decreases.
// Non-convergence is reported, never thrown.
NewtonResult damped_newton(int m, int n, const ResidualFn& residual, const JacobianFn& jacobian,
                           const std::vector<double>& x0, const NewtonOptions& opts = {});

}  // namespace zygo
