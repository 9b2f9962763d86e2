#pragma once
// Scalar time-dependent coefficients for Hamiltonian terms and channel rates.

#include <memory>
#include <utility>
#include <vector>

namespace rodeo {

class CoefficientFn {
 public:
  CoefficientFn() : CoefficientFn(constant(0.0)) {}

  static CoefficientFn constant(double c);
  // offset + amplitude * sin(omega * t + phase)
  static CoefficientFn sinusoid(double amplitude, double omega, double phase, double offset);
  // amplitude * tanh(slope * t)
  static CoefficientFn tanh_ramp(double amplitude, double slope);
  // coeffs[0] + coeffs[1] t + coeffs[2] t^2 + ...
  static CoefficientFn polynomial(std::vector<double> coeffs);
  // Linear interpolation through (t, v) samples sorted by t; constant
  // extrapolation outside the sampled range.
  static CoefficientFn piecewise_linear(std::vector<std::pair<double, double>> samples);

  double operator()(double t) const;

 private:
  struct Impl;
  explicit CoefficientFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace rodeo
