#include "rodeo/observables.hpp"

#include <cmath>
#include <limits>

#include "rodeo/errors.hpp"

namespace rodeo {

std::array<double, 3> bloch(const CMatrix& rho) {
  if (rho.dim() != 2)
    throw DimensionUnsupported("bloch components are defined for qubits only");
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
          rho(0, 0).real() - rho(1, 1).real()};
}

double expectation(const CMatrix& rho, const CMatrix& op) {
  if (rho.dim() != op.dim())
    throw DimensionMismatch("expectation: dimension mismatch");
  cplx tr = 0.0;
  const int d = rho.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) tr += op(i, j) * rho(j, i);
  return tr.real();
}

BlochSeries bloch_series(const DensityTrajectory& traj) {
  BlochSeries s;
  s.times = traj.times;
  const std::size_t n = traj.states.size();
  s.x.reserve(n);
  s.y.reserve(n);
  s.z.reserve(n);
  for (const auto& rho : traj.states) {
    auto b = bloch(rho);
    s.x.push_back(b[0]);
    s.y.push_back(b[1]);
    s.z.push_back(b[2]);
  }
  s.se_x.assign(n, 0.0);
  s.se_y.assign(n, 0.0);
  s.se_z.assign(n, 0.0);
  return s;
}

BlochSeries bloch_series(const EnsembleResult& ens) {
  if (ens.dim != 2)
    throw DimensionUnsupported("bloch components are defined for qubits only");
  BlochSeries s;
  s.times = ens.times;
  const std::size_t n = ens.mean.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto b = bloch(ens.mean[k]);
    s.x.push_back(b[0]);
    s.y.push_back(b[1]);
    s.z.push_back(b[2]);
    // Entries are flattened row-major, so (0,1) sits at 1 and (0,0) at 0.
    s.se_x.push_back(2.0 * ens.se_re[k][1]);
    s.se_y.push_back(2.0 * ens.se_im[k][1]);
    s.se_z.push_back(2.0 * ens.se_re[k][0]);
  }
  return s;
}

CompareReport compare(const BlochSeries& a, const BlochSeries& b, double abs_floor,
                      double z_tol) {
  if (a.times.size() != b.times.size())
    throw GridMismatch("compare: series have different lengths");
  for (std::size_t k = 0; k < a.times.size(); ++k)
    if (a.times[k] != b.times[k])
      throw GridMismatch("compare: series on different time grids");

  CompareReport rep;
  rep.n_points = a.times.size();
  rep.min_margin = std::numeric_limits<double>::infinity();
  const char comp_name[3] = {'x', 'y', 'z'};
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double av[3] = {a.x[k], a.y[k], a.z[k]};
    const double bv[3] = {b.x[k], b.y[k], b.z[k]};
    const double sa[3] = {a.se_x[k], a.se_y[k], a.se_z[k]};
    const double sb[3] = {b.se_x[k], b.se_y[k], b.se_z[k]};
    bool point_ok = true;
    for (int c = 0; c < 3; ++c) {
      double dev = std::abs(av[c] - bv[c]);
      double bound = z_tol * std::sqrt(sa[c] * sa[c] + sb[c] * sb[c]);
      if (bound < abs_floor) bound = abs_floor;
      if (dev > rep.max_dev) {
        rep.max_dev = dev;
        rep.max_dev_time = a.times[k];
        rep.max_dev_component = comp_name[c];
      }
      double margin = bound - dev;
      if (margin < rep.min_margin) rep.min_margin = margin;
      if (dev > bound) point_ok = false;
    }
    if (!point_ok) ++rep.n_failures;
  }
  rep.pass = rep.n_failures == 0;
  return rep;
}

}  // namespace rodeo
