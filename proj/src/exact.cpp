#include "rodeo/exact.hpp"

#include <cmath>
#include <string>

#include "rodeo/eig.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/numeric_policy.hpp"

namespace rodeo {

namespace {

long step_count(double dt, double t_max) {
  if (!(dt > 0.0)) throw StepTooLarge("evolve_exact: dt must be positive", 0.0);
  if (!(t_max > 0.0)) throw StepTooLarge("evolve_exact: t_max must be positive", 0.0);
  long n = std::lround(t_max / dt);
  if (n < 1) n = 1;
  return n;
}

// One RK4 step applied to every matrix in `states` simultaneously (they all
// obey the same linear equation).
class Rk4Stepper {
 public:
  Rk4Stepper(const MasterEquation& me, int d) : me_(me), k1_(d), k2_(d), k3_(d), k4_(d), tmp_(d) {}

  void step(CMatrix& x, double t, double dt) {
    apply_generator_raw(me_, t, x, k1_);
    tmp_ = x;
    tmp_.axpy(0.5 * dt, k1_);
    apply_generator_raw(me_, t + 0.5 * dt, tmp_, k2_);
    tmp_ = x;
    tmp_.axpy(0.5 * dt, k2_);
    apply_generator_raw(me_, t + 0.5 * dt, tmp_, k3_);
    tmp_ = x;
    tmp_.axpy(dt, k3_);
    apply_generator_raw(me_, t + dt, tmp_, k4_);

    x.axpy(dt / 6.0, k1_);
    x.axpy(dt / 3.0, k2_);
    x.axpy(dt / 3.0, k3_);
    x.axpy(dt / 6.0, k4_);
  }

 private:
  const MasterEquation& me_;
  CMatrix k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

DensityTrajectory evolve_exact(const MasterEquation& me, const CMatrix& rho0,
                               double dt, double t_max) {
  const int d = me.dim();
  if (rho0.dim() != d) throw DimensionMismatch("evolve_exact: state dimension mismatch");
  const long n_steps = step_count(dt, t_max);
  const double drift_tol = numeric_policy().trace_drift_tol;

  DensityTrajectory traj;
  traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);

  CMatrix rho = rho0;
  Rk4Stepper stepper(me, d);
  for (long k = 0; k <= n_steps; ++k) {
    double t = static_cast<double>(k) * dt;
    double trace_err = std::abs(rho.trace() - cplx(1.0));
    double herm_err = rho.hermiticity_error();
    if (trace_err > drift_tol || herm_err > drift_tol)
      throw StepTooLarge("evolve_exact: trace/Hermiticity drift " +
                             std::to_string(std::max(trace_err, herm_err)) +
                             " exceeds bound at t = " + std::to_string(t) +
                             "; reduce dt",
                         t);
    traj.times.push_back(t);
    traj.states.push_back(rho);
    if (k < n_steps) stepper.step(rho, t, dt);
  }
  return traj;
}

ChoiSpectrumSeries propagator_choi(const MasterEquation& me, double dt, double t_max) {
  const int d = me.dim();
  const long n_steps = step_count(dt, t_max);

  // Propagate every matrix unit E_ij; columns of the propagator.
  std::vector<CMatrix> basis_states;
  basis_states.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix e(d);
      e(i, j) = 1.0;
      basis_states.push_back(e);
    }

  ChoiSpectrumSeries series;
  Rk4Stepper stepper(me, d);
  CMatrix choi(d * d);
  for (long k = 0; k <= n_steps; ++k) {
    double t = static_cast<double>(k) * dt;

    // C[(r,i),(c,j)] = Lambda[E_ij](r,c) / d, normalized so trace(C) = 1
    // while the map is trace preserving.
    choi.set_zero();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const CMatrix& lam = basis_states[static_cast<std::size_t>(i) * d + j];
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c)
            choi(r * d + i, c * d + j) = lam(r, c) / static_cast<double>(d);
      }
    choi.hermitize();
    SpectralDecomposition sd = hermitian_eig(choi, 1e-8);

    series.times.push_back(t);
    series.spectra.push_back(sd.eigenvalues);
    double mn = sd.eigenvalues.front();
    series.min_eigenvalue.push_back(mn);
    if (!series.first_negative_time && mn < -numeric_policy().mu_violation_tol)
      series.first_negative_time = t;

    if (k < n_steps)
      for (auto& x : basis_states) stepper.step(x, t, dt);
  }
  return series;
}

PositivityMonitor positivity_monitor(const DensityTrajectory& traj) {
  PositivityMonitor mon;
  const double tol = numeric_policy().mu_violation_tol;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    SpectralDecomposition sd = hermitian_eig(traj.states[k], 1e-7);
    mon.times.push_back(traj.times[k]);
    mon.mu.push_back(sd.eigenvalues.front());
    mon.eigenvectors.push_back(sd.eigenvectors.front());
    if (!mon.first_violation_time && sd.eigenvalues.front() < -tol)
      mon.first_violation_time = traj.times[k];
  }
  return mon;
}

}  // namespace rodeo
