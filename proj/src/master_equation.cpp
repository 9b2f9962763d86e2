#include "rodeo/master_equation.hpp"

#include <cmath>
#include <string>

#include "rodeo/errors.hpp"
#include "rodeo/numeric_policy.hpp"

namespace rodeo {

MasterEquation::MasterEquation(int dim, std::vector<HamiltonianTerm> hamiltonian,
                               std::vector<std::pair<CoefficientFn, CMatrix>> channels)
    : dim_(dim), hamiltonian_(std::move(hamiltonian)) {
  if (dim_ < 2) throw DimensionMismatch("MasterEquation: dim must be >= 2");
  const double htol = numeric_policy().atol;
  for (std::size_t k = 0; k < hamiltonian_.size(); ++k) {
    const CMatrix& h = hamiltonian_[k].matrix;
    if (h.dim() != dim_)
      throw DimensionMismatch("MasterEquation: Hamiltonian term " + std::to_string(k) +
                              " has dimension " + std::to_string(h.dim()));
    if (h.hermiticity_error() > htol)
      throw NotHermitian("MasterEquation: Hamiltonian term " + std::to_string(k) +
                         " is not Hermitian");
  }
  channels_.reserve(channels.size());
  for (std::size_t a = 0; a < channels.size(); ++a) {
    CMatrix& l = channels[a].second;
    if (l.dim() != dim_)
      throw DimensionMismatch("MasterEquation: channel " + std::to_string(a) +
                              " operator has dimension " + std::to_string(l.dim()));
    Channel c;
    c.rate = std::move(channels[a].first);
    c.op_dag_op = l.adjoint() * l;
    c.op = std::move(l);
    channels_.push_back(std::move(c));
  }
}

void MasterEquation::hamiltonian_at(double t, CMatrix& out) const {
  if (out.dim() != dim_) out.resize(dim_);
  out.set_zero();
  for (const auto& term : hamiltonian_) out.axpy(term.coeff(t), term.matrix);
}

CMatrix MasterEquation::hamiltonian_at(double t) const {
  CMatrix h(dim_);
  hamiltonian_at(t, h);
  return h;
}

void MasterEquation::gamma_total_at(double t, CMatrix& out) const {
  if (out.dim() != dim_) out.resize(dim_);
  out.set_zero();
  for (const auto& c : channels_) out.axpy(c.rate(t), c.op_dag_op);
}

void apply_generator_raw(const MasterEquation& me, double t, const CMatrix& x,
                         CMatrix& out) {
  const int d = me.dim();
  if (x.dim() != d) throw DimensionMismatch("apply_generator_raw: dimension mismatch");
  if (out.dim() != d) out.resize(d);

  CMatrix h = me.hamiltonian_at(t);
  out = h * x;
  out -= x * h;
  out *= cplx(0.0, -1.0);  // -i [H, x]

  for (const auto& c : me.channels()) {
    double g = c.rate(t);
    if (g == 0.0) continue;
    CMatrix lx = c.op * x;
    CMatrix lxl = lx * c.op.adjoint();
    out.axpy(g, lxl);
    CMatrix anti = c.op_dag_op * x;
    anti += x * c.op_dag_op;
    out.axpy(-0.5 * g, anti);
  }
}

CMatrix generator_apply(const MasterEquation& me, double t, const CMatrix& rho) {
  if (rho.dim() != me.dim())
    throw DimensionMismatch("generator_apply: state dimension mismatch");
  const double state_tol = 1e-9;
  if (rho.hermiticity_error() > state_tol)
    throw NotHermitian("generator_apply: rho is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > state_tol)
    throw Error("generator_apply: rho trace differs from 1");
  CMatrix out(me.dim());
  apply_generator_raw(me, t, rho, out);
  return out;
}

CMatrix jump_part(const MasterEquation& me, double t, const CMatrix& rho) {
  if (rho.dim() != me.dim())
    throw DimensionMismatch("jump_part: state dimension mismatch");
  CMatrix out(me.dim());
  for (const auto& c : me.channels()) {
    double g = c.rate(t);
    if (g == 0.0) continue;
    CMatrix lxl = (c.op * rho) * c.op.adjoint();
    out.axpy(g, lxl);
  }
  return out;
}

CMatrix drift_hamiltonian(const MasterEquation& me, double t) {
  CMatrix k = me.hamiltonian_at(t);
  CMatrix gamma(me.dim());
  me.gamma_total_at(t, gamma);
  k.axpy(cplx(0.0, -0.5), gamma);
  return k;
}

PDivisibilityResult pauli_p_divisibility(double gx, double gy, double gz) {
  PDivisibilityResult r;
  r.margins = {gx + gy, gy + gz, gx + gz};
  r.worst = std::min({r.margins[0], r.margins[1], r.margins[2]});
  r.divisible = r.worst >= -numeric_policy().pdiv_tol;
  return r;
}

namespace {

// Minimum of sum_j gamma_j |<phi_mu| L_j |phi_mu'>|^2 over ordered pairs of
// distinct basis vectors.
double basis_worst(const std::vector<double>& rates, const std::vector<const CMatrix*>& ops,
                   const std::vector<CVector>& basis) {
  double worst = 0.0;
  bool first = true;
  const std::size_t d = basis.size();
  CVector tmp;
  for (std::size_t mu = 0; mu < d; ++mu) {
    for (std::size_t nu = 0; nu < d; ++nu) {
      if (mu == nu) continue;
      double v = 0.0;
      for (std::size_t j = 0; j < ops.size(); ++j) {
        matvec_into(*ops[j], basis[nu], tmp);
        v += rates[j] * std::norm(inner(basis[mu], tmp));
      }
      if (first || v < worst) {
        worst = v;
        first = false;
      }
    }
  }
  return worst;
}

// Haar-random orthonormal basis: Gaussian matrix, modified Gram-Schmidt.
std::vector<CVector> haar_basis(int d, RngStream& rng) {
  std::vector<CVector> cols(static_cast<std::size_t>(d),
                            CVector(static_cast<std::size_t>(d)));
  for (auto& col : cols)
    for (auto& z : col) z = cplx(rng.next_normal(), rng.next_normal());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx proj = inner(cols[k], cols[j]);
      for (std::size_t i = 0; i < cols[j].size(); ++i) cols[j][i] -= proj * cols[k][i];
    }
    normalize(cols[j]);
  }
  return cols;
}

}  // namespace

PDivisibilityResult p_divisibility_sampled(const MasterEquation& me, double t,
                                           int n_samples, RngStream& rng) {
  std::vector<double> rates;
  std::vector<const CMatrix*> ops;
  for (const auto& c : me.channels()) {
    rates.push_back(c.rate(t));
    ops.push_back(&c.op);
  }

  PDivisibilityResult r;
  bool first = true;
  auto consider = [&](const std::vector<CVector>& basis) {
    double v = basis_worst(rates, ops, basis);
    if (first || v < r.worst) {
      r.worst = v;
      first = false;
    }
  };

  if (me.dim() == 2) {
    // Dense scan over the (theta, phi) family; covers the coordinate bases.
    const int n_theta = 17, n_phi = 32;
    for (int it = 0; it <= n_theta - 1; ++it) {
      double theta = M_PI * it / (n_theta - 1);
      double ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
      for (int ip = 0; ip < n_phi; ++ip) {
        double phi = 2.0 * M_PI * ip / n_phi;
        cplx e(std::cos(phi), std::sin(phi));
        std::vector<CVector> basis = {
            {cplx(ch), e * sh},
            {-std::conj(e) * sh, cplx(ch)},
        };
        consider(basis);
      }
    }
  }
  for (int s = 0; s < n_samples; ++s) consider(haar_basis(me.dim(), rng));

  r.divisible = first || r.worst >= -numeric_policy().pdiv_tol;
  return r;
}

CMatrix sigma_x() { return CMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
CMatrix sigma_y() {
  return CMatrix{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}};
}
CMatrix sigma_z() { return CMatrix{{1.0, 0.0}, {0.0, -1.0}}; }
CMatrix sigma_plus() { return CMatrix{{0.0, 1.0}, {0.0, 0.0}}; }
CMatrix sigma_minus() { return CMatrix{{0.0, 0.0}, {1.0, 0.0}}; }

}  // namespace rodeo
