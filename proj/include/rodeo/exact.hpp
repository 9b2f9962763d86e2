#pragma once
// Deterministic density-matrix reference: fixed-step RK4 on the master
// equation, a propagator-level Choi spectrum series, and a minimum-eigenvalue
// positivity monitor.

#include <optional>
#include <vector>

#include "rodeo/complex_linalg.hpp"
#include "rodeo/master_equation.hpp"

namespace rodeo {

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
};

struct PositivityMonitor {
  std::vector<double> times;
  std::vector<double> mu;            // min eigenvalue of rho(t)
  std::vector<CVector> eigenvectors; // corresponding eigenvector
  std::optional<double> first_violation_time;  // first t with mu < -tol
};

struct ChoiSpectrumSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> spectra;  // ascending eigenvalues, d^2 each
  std::vector<double> min_eigenvalue;
  std::optional<double> first_negative_time;
};

// Fixed-step RK4 from rho0 over the grid t_k = k*dt, k = 0..round(t_max/dt).
// Throws StepTooLarge if trace or Hermiticity drift exceeds the policy bound.
DensityTrajectory evolve_exact(const MasterEquation& me, const CMatrix& rho0,
                               double dt, double t_max);

// Evolves the full propagator and records the spectrum of the (normalized)
// Choi matrix at every grid point. Complete positivity of the map at time t
// is equivalent to the spectrum being non-negative.
ChoiSpectrumSeries propagator_choi(const MasterEquation& me, double dt, double t_max);

PositivityMonitor positivity_monitor(const DensityTrajectory& traj);

}  // namespace rodeo
