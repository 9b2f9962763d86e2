#include "rodeo/rate_operator.hpp"

#include <cmath>
#include <string>

#include "rodeo/errors.hpp"
#include "rodeo/numeric_policy.hpp"

namespace rodeo {

TransformationStrategy TransformationStrategy::zero() { return TransformationStrategy(); }

TransformationStrategy TransformationStrategy::state_scaled(cplx c) {
  TransformationStrategy s;
  s.kind_ = Kind::kStateScaled;
  s.scale_ = c;
  return s;
}

TransformationStrategy TransformationStrategy::target_basis(CVector e0, CVector e1) {
  if (e0.size() != 2 || e1.size() != 2)
    throw DimensionUnsupported("target_basis: only dimension 2 is supported");
  const double tol = 1e-9;
  if (std::abs(vec_norm(e0) - 1.0) > tol || std::abs(vec_norm(e1) - 1.0) > tol ||
      std::abs(inner(e0, e1)) > tol)
    throw Error("target_basis: basis is not orthonormal");
  TransformationStrategy s;
  s.kind_ = Kind::kTargetBasis;
  s.e0_ = std::move(e0);
  s.e1_ = std::move(e1);
  return s;
}

TransformationStrategy TransformationStrategy::custom(CustomFn fn) {
  TransformationStrategy s;
  s.kind_ = Kind::kCustom;
  s.fn_ = std::move(fn);
  return s;
}

namespace {

// Minimal-norm solution of <e0| (J + 1/2(|psi><Phi| + |Phi><psi|)) |e1> = 0:
// with a = <e0|psi>, b = <e1|psi>, j = <e0|J|e1>,
//   Phi = -2 j b e0 - 2 conj(j) a e1.
void phi_target_basis(const CMatrix& j_psi, const CVector& psi, const CVector& e0,
                      const CVector& e1, CVector& out) {
  if (psi.size() != 2)
    throw DimensionUnsupported("target_basis: only dimension 2 is supported");
  cplx a = inner(e0, psi);
  cplx b = inner(e1, psi);
  cplx j = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      j += std::conj(e0[static_cast<std::size_t>(i)]) * j_psi(i, k) *
           e1[static_cast<std::size_t>(k)];
  cplx c0 = -2.0 * j * b;
  cplx c1 = -2.0 * std::conj(j) * a;
  out.assign(2, cplx(0.0));
  for (std::size_t i = 0; i < 2; ++i)
    out[i] = c0 * e0[i] + c1 * e1[i];
}

}  // namespace

void TransformationStrategy::phi(const CVector& psi, double t, const CMatrix& j_psi,
                                 CVector& out) const {
  switch (kind_) {
    case Kind::kZero:
      out.assign(psi.size(), cplx(0.0));
      return;
    case Kind::kStateScaled:
      out = psi;
      rodeo::scale(out, scale_);
      return;
    case Kind::kTargetBasis:
      phi_target_basis(j_psi, psi, e0_, e1_, out);
      return;
    case Kind::kCustom: {
      out = fn_(psi, t);
      if (out.size() != psi.size())
        throw DimensionMismatch("custom strategy: Phi dimension mismatch");
      if (!all_finite(out))
        throw NonFiniteStrategyOutput("custom strategy: Phi has non-finite entries");
      return;
    }
  }
}

void build_rate_context(const MasterEquation& me, double t, const CVector& psi,
                        const TransformationStrategy& strategy, RateOpContext& ctx) {
  const int d = me.dim();
  if (static_cast<int>(psi.size()) != d)
    throw DimensionMismatch("build_rate_context: state dimension mismatch");

  if (ctx.j_psi.dim() != d) {
    ctx.j_psi.resize(d);
    ctx.r.resize(d);
    ctx.evecs.resize(d);
    ctx.eig_work.resize(d);
  }

  // J_psi = sum_a gamma_a (L_a psi)(L_a psi)^dag
  ctx.j_psi.set_zero();
  ctx.trace_j = 0.0;
  for (const auto& c : me.channels()) {
    double g = c.rate(t);
    if (g == 0.0) continue;
    matvec_into(c.op, psi, ctx.scratch);
    ctx.j_psi.add_outer(g, ctx.scratch, ctx.scratch);
    ctx.trace_j += g * norm_sq(ctx.scratch);
  }

  strategy.phi(psi, t, ctx.j_psi, ctx.phi);

  ctx.r = ctx.j_psi;
  ctx.r.add_outer(0.5, psi, ctx.phi);
  ctx.r.add_outer(0.5, ctx.phi, psi);
  ctx.trace_r = ctx.trace_j + inner(ctx.phi, psi).real();

  ctx.eig_work = ctx.r;
  jacobi_hermitian(ctx.eig_work, ctx.evecs, ctx.evals);

  const std::size_t n = ctx.evals.size();
  ctx.lambda_plus.resize(n);
  ctx.lambda_minus.resize(n);
  ctx.self_jump.resize(n);
  const double self_tol = numeric_policy().self_jump_tol;
  for (std::size_t i = 0; i < n; ++i) {
    double l = ctx.evals[i];
    ctx.lambda_plus[i] = 0.5 * (std::abs(l) + l);
    ctx.lambda_minus[i] = 0.5 * (std::abs(l) - l);
    cplx ov = 0.0;
    for (int k = 0; k < d; ++k)
      ov += std::conj(ctx.evecs(k, static_cast<int>(i))) * psi[static_cast<std::size_t>(k)];
    ctx.self_jump[i] = std::norm(ov) > 1.0 - self_tol ? 1 : 0;
  }
}

namespace {

void check_state(const MasterEquation& me, const CVector& psi) {
  if (static_cast<int>(psi.size()) != me.dim())
    throw DimensionMismatch("state dimension does not match the master equation");
  if (std::abs(vec_norm(psi) - 1.0) > 1e-9)
    throw Error("state must be unit length (within 1e-9)");
}

}  // namespace

RateOperator build_rate_operator(const MasterEquation& me, double t, const CVector& psi,
                                 const TransformationStrategy& strategy) {
  check_state(me, psi);
  RateOpContext ctx;
  build_rate_context(me, t, psi, strategy, ctx);

  RateOperator op;
  op.matrix = ctx.r;
  op.spectral.eigenvalues = ctx.evals;
  const int d = me.dim();
  op.spectral.eigenvectors.assign(ctx.evals.size(), CVector(static_cast<std::size_t>(d)));
  for (std::size_t j = 0; j < ctx.evals.size(); ++j)
    for (int i = 0; i < d; ++i)
      op.spectral.eigenvectors[j][static_cast<std::size_t>(i)] = ctx.evecs(i, static_cast<int>(j));
  op.lambda_plus = ctx.lambda_plus;
  op.lambda_minus = ctx.lambda_minus;
  op.self_jump = ctx.self_jump;
  op.trace = ctx.trace_r;
  return op;
}

EffectiveHamiltonians effective_hamiltonian(const MasterEquation& me, double t,
                                            const CVector& psi,
                                            const TransformationStrategy& strategy) {
  check_state(me, psi);
  RateOpContext ctx;
  build_rate_context(me, t, psi, strategy, ctx);

  EffectiveHamiltonians eff;
  eff.k = me.hamiltonian_at(t);
  CMatrix gamma(me.dim());
  me.gamma_total_at(t, gamma);
  eff.k.axpy(cplx(0.0, -0.5), gamma);
  eff.k.add_outer(cplx(0.0, -0.5), ctx.phi, psi);
  eff.k_tilde = eff.k;
  eff.k_tilde.add_scaled_identity(cplx(0.0, 0.5) * ctx.trace_r);
  return eff;
}

CVector target_basis_phi(const MasterEquation& me, double t, const CVector& psi,
                         const CVector& e0, const CVector& e1) {
  if (me.dim() != 2)
    throw DimensionUnsupported("target_basis_phi: only dimension 2 is supported");
  check_state(me, psi);
  CMatrix j_psi = jump_part(me, t, projector(psi));
  CVector out;
  phi_target_basis(j_psi, psi, e0, e1, out);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> split_rates(
    const std::vector<double>& eigenvalues) {
  std::vector<double> plus(eigenvalues.size()), minus(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    double l = eigenvalues[i];
    plus[i] = 0.5 * (std::abs(l) + l);
    minus[i] = 0.5 * (std::abs(l) - l);
  }
  return {std::move(plus), std::move(minus)};
}

}  // namespace rodeo
