#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rodeo/complex_linalg.hpp"
#include "rodeo/ensemble_stats.hpp"
#include "rodeo/exact.hpp"

namespace rodeo {

// Bloch components of a qubit density matrix: x = 2 Re rho01,
// y = -2 Im rho01, z = rho00 - rho11. Throws DimensionUnsupported for d != 2.
std::array<double, 3> bloch(const CMatrix& rho);

double expectation(const CMatrix& rho, const CMatrix& op);

struct BlochSeries {
  std::vector<double> times;
  std::vector<double> x, y, z;
  std::vector<double> se_x, se_y, se_z;  // zero for exact trajectories
};

BlochSeries bloch_series(const DensityTrajectory& traj);
BlochSeries bloch_series(const EnsembleResult& ens);

struct CompareReport {
  bool pass = true;
  std::size_t n_points = 0;
  long n_failures = 0;   // grid points where some component missed its bound
  double max_dev = 0.0;  // largest |a - b| over all points and components
  double max_dev_time = 0.0;
  char max_dev_component = 'x';
  double min_margin = 0.0;  // smallest (bound - deviation); negative on failure
};

// Pointwise comparison: |a - b| must stay within
// max(z_tol * sqrt(se_a^2 + se_b^2), abs_floor) for every component.
// Throws GridMismatch unless the time grids agree exactly.
CompareReport compare(const BlochSeries& a, const BlochSeries& b, double abs_floor,
                      double z_tol);

}  // namespace rodeo
