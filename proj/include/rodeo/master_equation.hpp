#pragma once
// Time-dependent master equation in standard form:
//   d rho / dt = -i[H(t), rho]
//                + sum_a gamma_a(t) ( L_a rho L_a^dag - 1/2 {L_a^dag L_a, rho} ).
// Rates may be negative; the stochastic engines decide what to do with that.

#include <utility>
#include <vector>

#include "rodeo/coefficients.hpp"
#include "rodeo/complex_linalg.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

struct HamiltonianTerm {
  CoefficientFn coeff;
  CMatrix matrix;  // Hermitian
};

struct Channel {
  CoefficientFn rate;  // may go negative
  CMatrix op;          // constant jump operator L
  CMatrix op_dag_op;   // cached L^dag L
};

class MasterEquation {
 public:
  // Validates dimensions and Hermiticity of every Hamiltonian term.
  MasterEquation(int dim, std::vector<HamiltonianTerm> hamiltonian,
                 std::vector<std::pair<CoefficientFn, CMatrix>> channels);

  int dim() const { return dim_; }
  const std::vector<HamiltonianTerm>& hamiltonian() const { return hamiltonian_; }
  const std::vector<Channel>& channels() const { return channels_; }

  // H(t) = sum_k c_k(t) H_k
  void hamiltonian_at(double t, CMatrix& out) const;
  CMatrix hamiltonian_at(double t) const;

  // Gamma(t) = sum_a gamma_a(t) L_a^dag L_a
  void gamma_total_at(double t, CMatrix& out) const;

 private:
  int dim_;
  std::vector<HamiltonianTerm> hamiltonian_;
  std::vector<Channel> channels_;
};

// Full generator applied to a linear operator X; no state validation. The
// exact propagator uses this on non-state matrices (e.g. matrix units).
void apply_generator_raw(const MasterEquation& me, double t, const CMatrix& x,
                         CMatrix& out);

// Generator applied to a density matrix. Validates dimension, Hermiticity
// and unit trace of rho.
CMatrix generator_apply(const MasterEquation& me, double t, const CMatrix& rho);

// J_t[rho] = sum_a gamma_a(t) L_a rho L_a^dag
CMatrix jump_part(const MasterEquation& me, double t, const CMatrix& rho);

// K_t = H(t) - i/2 Gamma(t); the generator splits as
// d rho/dt = -i (K_t rho - rho K_t^dag) + J_t[rho].
CMatrix drift_hamiltonian(const MasterEquation& me, double t);

struct PDivisibilityResult {
  bool divisible = true;
  // For the Pauli check: pairwise rate sums (gx+gy, gy+gz, gx+gz).
  // For the sampled check: worst value found (in `worst`).
  std::vector<double> margins;
  double worst = 0.0;
};

// Closed-form check for the qubit Pauli channel family.
PDivisibilityResult pauli_p_divisibility(double gx, double gy, double gz);

// Randomized check of sum_j gamma_j(t) |<phi_mu| L_j |phi_mu'>|^2 >= 0 over
// Haar-random orthonormal bases (plus a dense deterministic scan of qubit
// bases when dim == 2). May miss violations, never invents one.
PDivisibilityResult p_divisibility_sampled(const MasterEquation& me, double t,
                                           int n_samples, RngStream& rng);

// Pauli and ladder operators.
CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();
CMatrix sigma_plus();
CMatrix sigma_minus();

}  // namespace rodeo
