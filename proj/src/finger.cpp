#include "zygo/finger.hpp"

#include <algorithm>
#include <cmath>

namespace zygo {

ControlSet ControlSet::levels(std::vector<double> values) {
  if (values.size() < 2) throw ArgumentError("control set needs at least 2 levels");
  if (values.front() != 0.0) throw ArgumentError("control set must start at 0");
  if (values.back() != 1.0) throw ArgumentError("control set must end at 1");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i] < values[i + 1])) throw ArgumentError("control set levels must be strictly increasing");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ArgumentError("control set levels must be finite");
  }
  ControlSet s;
  s.interval_ = false;
  s.values_ = std::move(values);
  return s;
}

ControlSet ControlSet::interval(int resolution) {
  if (resolution < 2) throw ArgumentError("interval control set resolution must be >= 2");
  ControlSet s;
  s.interval_ = true;
  s.resolution_ = resolution;
  return s;
}

std::vector<double> ControlSet::materialize(int resolution_override) const {
  if (!interval_) return values_;
  int m = resolution_override > 0 ? resolution_override : resolution_;
  if (m < 2) throw ArgumentError("interval control set resolution must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] = static_cast<double>(j) / (m - 1);
  return out;
}

void FingerSpec::validate() const {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw ArgumentError("rho must be finite and > 1");
  if (!(omega > 0.0) || !(omega < 2.0 * kPi) || omega == kPi)
    throw ArgumentError("omega must lie in (0, 2pi) and differ from pi");
  if (!std::isfinite(theta0)) throw ArgumentError("theta0 must be finite");
  if (chirality != 1 && chirality != -1) throw ArgumentError("chirality must be +1 or -1");
  if (phalanx_count < 1) throw ArgumentError("phalanx count must be >= 1");
}

void validate_sequence(const FingerSpec& spec, const ControlSequence& seq) {
  if (seq.size() != static_cast<std::size_t>(spec.phalanx_count))
    throw ArgumentError("control sequence length must equal the phalanx count");
  for (double v : seq) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("control values must lie in [0, 1]");
  }
}

std::vector<Complex> junction_positions(const FingerSpec& spec, const ControlSequence& seq) {
  spec.validate();
  validate_sequence(spec, seq);
  std::vector<Complex> xs;
  xs.reserve(seq.size() + 1);
  xs.emplace_back(0.0, 0.0);
  double acc = 0.0;
  double scale = 1.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    acc += seq[k];
    scale /= spec.rho;
    double angle = spec.theta0 + spec.chirality * spec.omega * acc;
    xs.push_back(xs.back() + scale * Complex(std::cos(angle), -std::sin(angle)));
  }
  return xs;
}

Complex phalanx_direction(const FingerSpec& spec, const ControlSequence& seq, int k) {
  spec.validate();
  validate_sequence(spec, seq);
  if (k < 1 || k > spec.phalanx_count) throw ArgumentError("phalanx index out of range");
  double acc = 0.0;
  for (int n = 0; n < k; ++n) acc += seq[static_cast<std::size_t>(n)];
  double angle = spec.theta0 + spec.chirality * spec.omega * acc;
  double scale = std::pow(spec.rho, -k);
  return scale * Complex(std::cos(angle), -std::sin(angle));
}

PhalanxSegment phalanx_segment(const FingerSpec& spec, const ControlSequence& seq, int k) {
  auto xs = junction_positions(spec, seq);
  if (k < 1 || k > spec.phalanx_count) throw ArgumentError("phalanx index out of range");
  PhalanxSegment seg;
  seg.a = xs[static_cast<std::size_t>(k - 1)];
  seg.b = xs[static_cast<std::size_t>(k)];
  seg.direction = seg.b - seg.a;
  return seg;
}

Complex apply_map(double v, double rho, double omega, Complex x) {
  double c = std::cos(omega * v);
  double s = std::sin(omega * v);
  double inv_rho = 1.0 / rho;
  double re = x.real() + 1.0;
  double im = x.imag();
  return {(re * c + im * s) * inv_rho, (im * c - re * s) * inv_rho};
}

}  // namespace zygo
