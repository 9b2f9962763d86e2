#include "rodeo/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rodeo {

struct CoefficientFn::Impl {
  enum class Kind { kConstant, kSinusoid, kTanhRamp, kPolynomial, kPiecewiseLinear };
  Kind kind = Kind::kConstant;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  std::vector<double> coeffs;
  std::vector<std::pair<double, double>> samples;
};

CoefficientFn CoefficientFn::constant(double c) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kConstant;
  impl->a = c;
  return CoefficientFn(std::move(impl));
}

CoefficientFn CoefficientFn::sinusoid(double amplitude, double omega, double phase,
                                      double offset) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kSinusoid;
  impl->a = amplitude;
  impl->b = omega;
  impl->c = phase;
  impl->d = offset;
  return CoefficientFn(std::move(impl));
}

CoefficientFn CoefficientFn::tanh_ramp(double amplitude, double slope) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kTanhRamp;
  impl->a = amplitude;
  impl->b = slope;
  return CoefficientFn(std::move(impl));
}

CoefficientFn CoefficientFn::polynomial(std::vector<double> coeffs) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kPolynomial;
  impl->coeffs = std::move(coeffs);
  return CoefficientFn(std::move(impl));
}

CoefficientFn CoefficientFn::piecewise_linear(
    std::vector<std::pair<double, double>> samples) {
  if (samples.empty())
    throw std::invalid_argument("piecewise_linear: at least one sample required");
  if (!std::is_sorted(samples.begin(), samples.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; }))
    throw std::invalid_argument("piecewise_linear: samples must be sorted by time");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kPiecewiseLinear;
  impl->samples = std::move(samples);
  return CoefficientFn(std::move(impl));
}

double CoefficientFn::operator()(double t) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Impl::Kind::kConstant:
      return im.a;
    case Impl::Kind::kSinusoid:
      return im.d + im.a * std::sin(im.b * t + im.c);
    case Impl::Kind::kTanhRamp:
      return im.a * std::tanh(im.b * t);
    case Impl::Kind::kPolynomial: {
      double v = 0.0;
      for (auto it = im.coeffs.rbegin(); it != im.coeffs.rend(); ++it) v = v * t + *it;
      return v;
    }
    case Impl::Kind::kPiecewiseLinear: {
      const auto& s = im.samples;
      if (t <= s.front().first) return s.front().second;
      if (t >= s.back().first) return s.back().second;
      auto hi = std::upper_bound(
          s.begin(), s.end(), t,
          [](double x, const auto& sample) { return x < sample.first; });
      auto lo = hi - 1;
      double w = (t - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

}  // namespace rodeo
