#pragma once
// State-dependent rate operator
//   R_psi = sum_a gamma_a (L_a|psi><psi|L_a^dag) + 1/2 (|psi><Phi| + |Phi><psi|)
// with a pluggable choice of Phi = Phi(psi, t). Its spectral decomposition
// supplies the jump targets and (possibly negative) jump rates; the matching
// non-Hermitian drift generator is
//   K_psi = H - i/2 Gamma - i/2 |Phi><psi|,   Kt_psi = K_psi + i/2 tr(R) * 1.
// Averaged over realizations the unraveling reproduces the master equation
// for every admissible Phi.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rodeo/complex_linalg.hpp"
#include "rodeo/eig.hpp"
#include "rodeo/master_equation.hpp"

namespace rodeo {

class TransformationStrategy {
 public:
  enum class Kind { kZero, kStateScaled, kTargetBasis, kCustom };
  using CustomFn = std::function<CVector(const CVector& psi, double t)>;

  TransformationStrategy() : kind_(Kind::kZero) {}

  // Phi = 0: plain jump unraveling.
  static TransformationStrategy zero();
  // Phi = c * psi; only Re(c) changes the rates, Im(c) shifts the drift.
  static TransformationStrategy state_scaled(cplx c);
  // Qubit-only: minimal-norm Phi that makes R_psi diagonal in the given
  // orthonormal basis {e0, e1}.
  static TransformationStrategy target_basis(CVector e0, CVector e1);
  // Arbitrary callback. Must be effect-free; receives (psi, t) only.
  static TransformationStrategy custom(CustomFn fn);

  Kind kind() const { return kind_; }
  cplx scale() const { return scale_; }

  // Phi for the given state. j_psi is the jump part applied to the projector
  // of psi (needed by the target-basis rule; other kinds ignore it).
  void phi(const CVector& psi, double t, const CMatrix& j_psi, CVector& out) const;

 private:
  Kind kind_;
  cplx scale_ = 0.0;
  CVector e0_, e1_;
  CustomFn fn_;
};

struct RateOperator {
  CMatrix matrix;
  SpectralDecomposition spectral;
  std::vector<double> lambda_plus;   // (|l| + l) / 2
  std::vector<double> lambda_minus;  // (|l| - l) / 2
  // Eigenvector projectively equal to psi: contributes to tr(R) but is never
  // sampled as an event and never enters reverse-jump bookkeeping.
  std::vector<std::uint8_t> self_jump;
  double trace = 0.0;
};

// Everything the engines need per step, with all buffers reused between
// calls. `psi` must be unit length.
struct RateOpContext {
  CMatrix j_psi;     // J applied to |psi><psi|
  CVector phi;
  CMatrix r;         // rate operator (Hermitian by construction)
  CMatrix evecs;     // eigenvector columns, ascending eigenvalue
  std::vector<double> evals;
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;
  std::vector<std::uint8_t> self_jump;
  double trace_r = 0.0;
  double trace_j = 0.0;

  CVector scratch;   // internal
  CMatrix eig_work;  // internal
};

void build_rate_context(const MasterEquation& me, double t, const CVector& psi,
                        const TransformationStrategy& strategy, RateOpContext& ctx);

// Validating wrapper around build_rate_context.
RateOperator build_rate_operator(const MasterEquation& me, double t, const CVector& psi,
                                 const TransformationStrategy& strategy);

struct EffectiveHamiltonians {
  CMatrix k;        // K_psi
  CMatrix k_tilde;  // K_psi + i/2 tr(R_psi) * 1
};

EffectiveHamiltonians effective_hamiltonian(const MasterEquation& me, double t,
                                            const CVector& psi,
                                            const TransformationStrategy& strategy);

// Minimal-norm Phi making <e0| R_psi |e1> vanish. Qubit only.
CVector target_basis_phi(const MasterEquation& me, double t, const CVector& psi,
                         const CVector& e0, const CVector& e1);

// lambda -> ((|l|+l)/2, (|l|-l)/2) per eigenvalue; exactly one of the pair is
// nonzero.
std::pair<std::vector<double>, std::vector<double>> split_rates(
    const std::vector<double>& eigenvalues);

}  // namespace rodeo
