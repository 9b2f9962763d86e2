#include "rodeo/eig.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rodeo/numeric_policy.hpp"

namespace rodeo {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffdiagFactor = 1e-14;  // convergence: off(A) <= factor * ||A||_F

double offdiag_norm(const CMatrix& a) {
  double s = 0.0;
  int n = a.dim();
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) s += std::norm(a(p, q));
  return std::sqrt(2.0 * s);
}

void canonicalize_column(CMatrix& v, int j) {
  int n = v.dim();
  int k = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    double a = std::abs(v(i, j));
    if (a > best) {
      best = a;
      k = i;
    }
  }
  cplx ph = std::conj(v(k, j)) / best;
  for (int i = 0; i < n; ++i) v(i, j) *= ph;
  v(k, j) = best;  // kill the residual imaginary part exactly
}

// Lexicographic order on (re, im) entry pairs of two columns; used only to
// break exact eigenvalue ties deterministically.
bool column_lex_less(const CMatrix& v, int x, int y) {
  for (int i = 0; i < v.dim(); ++i) {
    const cplx& a = v(i, x);
    const cplx& b = v(i, y);
    if (a.real() != b.real()) return a.real() < b.real();
    if (a.imag() != b.imag()) return a.imag() < b.imag();
  }
  return false;
}

}  // namespace

void jacobi_hermitian(CMatrix& a, CMatrix& v, std::vector<double>& values) {
  const int n = a.dim();
  if (v.dim() != n) v.resize(n);
  v.set_zero();
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  const double thresh = kOffdiagFactor * a.frobenius_norm();

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_norm(a) <= thresh) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a(p, q);
        double r = std::abs(apq);
        if (r == 0.0) continue;
        cplx phase = apq / r;  // apq = r * phase

        // Rotation angle on the phase-reduced real 2x2 block
        // [[app, r], [r, aqq]].
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        double theta = (aqq - app) / (2.0 * r);
        double t;
        if (std::abs(theta) > 1e12) {
          t = 0.5 / theta;  // avoid overflow in theta^2
        } else {
          t = ((theta >= 0.0) ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        // Unitary on the (p,q) plane: G_pp = c, G_pq = s,
        // G_qp = -s*conj(phase), G_qq = c*conj(phase).
        cplx gqp = -s * std::conj(phase);
        cplx gqq = c * std::conj(phase);

        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          cplx akp = a(k, p);
          cplx akq = a(k, q);
          a(k, p) = c * akp + gqp * akq;
          a(k, q) = s * akp + gqq * akq;
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (int k = 0; k < n; ++k) {
          cplx vkp = v(k, p);
          cplx vkq = v(k, q);
          v(k, p) = c * vkp + gqp * vkq;
          v(k, q) = s * vkp + gqq * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && offdiag_norm(a) > thresh)
    throw NoConvergence("jacobi_hermitian: sweep budget exhausted");

  values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i).real();
  for (int j = 0; j < n; ++j) canonicalize_column(v, j);

  // Selection sort, ascending eigenvalue, exact ties by lexicographic column
  // comparison. In-place column swaps keep this allocation-free.
  for (int pos = 0; pos < n - 1; ++pos) {
    int best = pos;
    for (int j = pos + 1; j < n; ++j) {
      double lj = values[static_cast<std::size_t>(j)];
      double lb = values[static_cast<std::size_t>(best)];
      if (lj < lb || (lj == lb && column_lex_less(v, j, best))) best = j;
    }
    if (best != pos) {
      std::swap(values[static_cast<std::size_t>(pos)], values[static_cast<std::size_t>(best)]);
      for (int i = 0; i < n; ++i) {
        cplx tmp = v(i, pos);
        v(i, pos) = v(i, best);
        v(i, best) = tmp;
      }
    }
  }
}

SpectralDecomposition hermitian_eig(const CMatrix& a, double herm_tol) {
  if (a.dim() < 1) throw DimensionMismatch("hermitian_eig: empty matrix");
  double herr = a.hermiticity_error();
  if (herr > herm_tol)
    throw NotHermitian("hermitian_eig: Hermiticity error " + std::to_string(herr) +
                       " exceeds tolerance " + std::to_string(herm_tol));

  CMatrix work = a;
  work.hermitize();
  CMatrix vecs;
  std::vector<double> vals;
  jacobi_hermitian(work, vecs, vals);

  SpectralDecomposition sd;
  sd.eigenvalues = std::move(vals);
  int n = a.dim();
  sd.eigenvectors.assign(static_cast<std::size_t>(n), CVector(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      sd.eigenvectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = vecs(i, j);
  return sd;
}

SpectralDecomposition hermitian_eig(const CMatrix& a) {
  return hermitian_eig(a, numeric_policy().herm_tol);
}

CMatrix projector(const CVector& psi) {
  if (norm_sq(psi) == 0.0) throw ZeroVector("projector: zero vector");
  CMatrix p(static_cast<int>(psi.size()));
  p.add_outer(1.0, psi, psi);
  return p;
}

}  // namespace rodeo
