#pragma once
// Central numeric tolerances. Everything that decides "close enough" reads
// from here so the thresholds stay consistent across modules. Two profiles
// are provided; the CLI can switch them via RODEO_NUMERIC_POLICY.

namespace rodeo {

struct NumericPolicy {
  double atol = 1e-12;             // generic algebraic identities
  double herm_tol = 1e-10;         // Hermiticity acceptance for inputs
  double eig_recon_tol = 1e-10;    // spectral reconstruction bound
  double neg_rate_tol = 1e-12;     // tiny-negative clamp in the jump sampler
  double breakdown_rate_tol = 1e-9;  // |rate| below this never flags breakdown
  double match_tol = 1e-8;         // projective class matching (1 - fidelity)
  double self_jump_tol = 1e-10;    // 1 - |<phi|psi>|^2 below this: no-op jump
  double trace_drift_tol = 1e-8;   // exact integrator trace/Hermiticity drift
  double mu_violation_tol = 1e-9;  // min-eigenvalue monitor threshold
  double pdiv_tol = 1e-12;         // P-divisibility margin threshold

  static NumericPolicy defaults() { return NumericPolicy{}; }

  static NumericPolicy strict() {
    NumericPolicy p;
    p.atol = 1e-13;
    p.herm_tol = 1e-12;
    p.neg_rate_tol = 1e-13;
    p.breakdown_rate_tol = 1e-10;
    p.match_tol = 1e-10;
    p.trace_drift_tol = 1e-9;
    p.mu_violation_tol = 1e-10;
    return p;
  }
};

const NumericPolicy& numeric_policy();
void set_numeric_policy(const NumericPolicy& p);

}  // namespace rodeo
