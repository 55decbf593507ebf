#pragma once

#include <vector>

#include "zygo/types.hpp"

namespace zygo {

// Rotation-control value set. Either an explicit finite list of levels in
// [0,1] (strictly increasing, endpoints 0 and 1) or the interval [0,1]
// carried as a descriptor with a sampling resolution.
class ControlSet {
 public:
  static ControlSet levels(std::vector<double> values);
  static ControlSet interval(int resolution = 2);

  bool is_interval() const { return interval_; }
  int resolution() const { return resolution_; }

  // Concrete sample values. For the interval form, `resolution_override > 0`
  // replaces the stored resolution; finite sets ignore it.
  std::vector<double> materialize(int resolution_override = 0) const;

 private:
  ControlSet() = default;
  bool interval_ = true;
  int resolution_ = 2;
  std::vector<double> values_;
};

struct FingerSpec {
  double rho = kGoldenMean;   // scaling factor, > 1
  double omega = kPi / 6.0;   // greatest phalanx rotation, in (0, 2pi) \ {pi}
  double theta0 = 0.0;        // initial orientation of the first phalanx, radians
  int chirality = +1;         // rotation sense, +1 or -1
  int phalanx_count = 1;      // K >= 1
  ControlSet control_set = ControlSet::interval();

  void validate() const;  // throws ArgumentError on any broken invariant
};

using ControlSequence = std::vector<double>;

// Throws ArgumentError unless seq has exactly K entries, all in [0,1].
void validate_sequence(const FingerSpec& spec, const ControlSequence& seq);

// Junction positions x_0..x_K of the planar finger:
//   x_0 = 0,  x_k = x_{k-1} + (1/rho^k) exp(-i (theta0 + chi omega sum_{n<=k} v_n))
std::vector<Complex> junction_positions(const FingerSpec& spec, const ControlSequence& seq);

// Direction vector of the k-th phalanx (length 1/rho^k), 1 <= k <= K.
Complex phalanx_direction(const FingerSpec& spec, const ControlSequence& seq, int k);

struct PhalanxSegment {
  Complex a;          // junction x_{k-1}
  Complex b;          // junction x_k
  Complex direction;  // b - a
};

PhalanxSegment phalanx_segment(const FingerSpec& spec, const ControlSequence& seq, int k);

// One IFS map: f_v(x) = (x + 1) e^{-i omega v} / rho.
Complex apply_map(double v, double rho, double omega, Complex x);

}  // namespace zygo
