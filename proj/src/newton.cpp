#include "zygo/newton.hpp"

#include <cmath>
#include <cstring>

namespace zygo {

namespace {

double norm2(const double* v, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

// delta = -solve(J^T J + lambda I, J^T r)
bool normal_equation_step(int m, int n, const double* jac, const double* res, double lambda,
                          double* delta) {
  std::vector<double> jtj(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> jtr(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    const double* row = jac + static_cast<std::size_t>(i) * n;
    for (int a = 0; a < n; ++a) {
      jtr[static_cast<std::size_t>(a)] += row[a] * res[i];
      for (int b = 0; b < n; ++b) jtj[static_cast<std::size_t>(a) * n + b] += row[a] * row[b];
    }
  }
  double scale = 0.0;
  for (int a = 0; a < n; ++a) scale = std::max(scale, jtj[static_cast<std::size_t>(a) * n + a]);
  double reg = lambda * (scale > 0.0 ? scale : 1.0);
  for (int a = 0; a < n; ++a) jtj[static_cast<std::size_t>(a) * n + a] += reg;
  for (int a = 0; a < n; ++a) delta[a] = -jtr[static_cast<std::size_t>(a)];
  return solve_linear(n, jtj.data(), delta);
}

}  // namespace

bool solve_linear(int n, double* a, double* b) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
    for (int row = col + 1; row < n; ++row) {
      double cand = std::abs(a[static_cast<std::size_t>(row) * n + col]);
      if (cand > best) {
        best = cand;
        pivot = row;
      }
    }
    if (!(best > 1e-300)) return false;
    if (pivot != col) {
      for (int j = col; j < n; ++j)
        std::swap(a[static_cast<std::size_t>(col) * n + j], a[static_cast<std::size_t>(pivot) * n + j]);
      std::swap(b[col], b[pivot]);
    }
    double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
    for (int row = col + 1; row < n; ++row) {
      double f = a[static_cast<std::size_t>(row) * n + col] * inv;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j)
        a[static_cast<std::size_t>(row) * n + j] -= f * a[static_cast<std::size_t>(col) * n + j];
      b[row] -= f * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int j = row + 1; j < n; ++j) s -= a[static_cast<std::size_t>(row) * n + j] * b[j];
    b[row] = s / a[static_cast<std::size_t>(row) * n + row];
  }
  return true;
}

NewtonResult damped_newton(int m, int n, const ResidualFn& residual, const JacobianFn& jacobian,
                           const std::vector<double>& x0, const NewtonOptions& opts) {
  NewtonResult out;
  out.x = x0;
  std::vector<double> res(static_cast<std::size_t>(m));
  std::vector<double> jac(static_cast<std::size_t>(m) * n);
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<double> trial(static_cast<std::size_t>(n));
  std::vector<double> trial_res(static_cast<std::size_t>(m));

  residual(out.x.data(), res.data());
  double rn = norm2(res.data(), m);

  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    if (rn <= opts.tolerance || !std::isfinite(rn)) break;
    jacobian(out.x.data(), jac.data());

    bool have_step = false;
    if (m == n) {
      std::vector<double> lu(jac);
      for (int i = 0; i < n; ++i) delta[static_cast<std::size_t>(i)] = -res[static_cast<std::size_t>(i)];
      have_step = solve_linear(n, lu.data(), delta.data());
      if (have_step) {
        for (double d : delta) {
          if (!std::isfinite(d)) have_step = false;
        }
      }
    }
    if (!have_step) {
      // singular or rectangular: regularized Gauss-Newton step
      if (!normal_equation_step(m, n, jac.data(), res.data(), 1e-12, delta.data())) break;
      bool finite = true;
      for (double d : delta) {
        if (!std::isfinite(d)) finite = false;
      }
      if (!finite) break;
    }

    double lambda = 1.0;
    bool improved = false;
    while (lambda >= opts.min_damping) {
      for (int i = 0; i < n; ++i) trial[static_cast<std::size_t>(i)] = out.x[static_cast<std::size_t>(i)] + lambda * delta[static_cast<std::size_t>(i)];
      residual(trial.data(), trial_res.data());
      double trial_rn = norm2(trial_res.data(), m);
      if (std::isfinite(trial_rn) && trial_rn < rn) {
        out.x = trial;
        res = trial_res;
        rn = trial_rn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;  // stalled; report whatever we reached
  }

  out.residual_norm = rn;
  out.converged = std::isfinite(rn) && rn <= opts.tolerance;
  return out;
}

}  // namespace zygo
