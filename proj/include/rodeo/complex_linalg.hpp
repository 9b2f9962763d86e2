#pragma once
// Dense complex vectors and matrices for small Hilbert-space dimensions.
// Header-only so the stochastic engines can inline the arithmetic.

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rodeo/errors.hpp"

namespace rodeo {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline double norm_sq(const CVector& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

inline double vec_norm(const CVector& v) { return std::sqrt(norm_sq(v)); }

// Conjugate-linear in the first argument.
inline cplx inner(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("inner: size mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// |<a|b>|^2 for unit vectors.
inline double fidelity(const CVector& a, const CVector& b) {
  return std::norm(inner(a, b));
}

inline void scale(CVector& v, cplx alpha) {
  for (auto& z : v) z *= alpha;
}

inline void normalize(CVector& v) {
  double n = vec_norm(v);
  if (n <= 0.0) throw ZeroVector("normalize: zero vector");
  for (auto& z : v) z /= n;
}

inline bool all_finite(const CVector& v) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline double max_abs(const CVector& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Rotate the global phase so the largest-magnitude component is real and
// positive. Ties pick the earliest index. Deterministic.
inline void canonicalize_phase(CVector& v) {
  std::size_t k = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      k = i;
    }
  }
  if (best <= 0.0) throw ZeroVector("canonicalize_phase: zero vector");
  cplx ph = std::conj(v[k]) / best;
  for (auto& z : v) z *= ph;
  v[k] = best;  // kill the residual imaginary part exactly
}

class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, cplx(0.0)) {}
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    n_ = static_cast<int>(rows.size());
    a_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != n_)
        throw DimensionMismatch("CMatrix: ragged initializer");
      for (const auto& z : r) a_.push_back(z);
    }
  }

  static CMatrix identity(int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return n_; }
  void resize(int n) {
    n_ = n;
    a_.assign(static_cast<std::size_t>(n) * n, cplx(0.0));
  }
  void set_zero() { std::fill(a_.begin(), a_.end(), cplx(0.0)); }

  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  const std::vector<cplx>& data() const { return a_; }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  CMatrix& operator*=(cplx alpha) {
    for (auto& z : a_) z *= alpha;
    return *this;
  }

  // this += alpha * o
  void axpy(cplx alpha, const CMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += alpha * o.a_[i];
  }

  // this += alpha * |u><v|
  void add_outer(cplx alpha, const CVector& u, const CVector& v) {
    if (static_cast<int>(u.size()) != n_ || static_cast<int>(v.size()) != n_)
      throw DimensionMismatch("add_outer: size mismatch");
    for (int i = 0; i < n_; ++i) {
      cplx ui = alpha * u[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_; ++j)
        (*this)(i, j) += ui * std::conj(v[static_cast<std::size_t>(j)]);
    }
  }

  void add_scaled_identity(cplx alpha) {
    for (int i = 0; i < n_; ++i) (*this)(i, i) += alpha;
  }

  cplx trace() const {
    cplx s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  bool all_finite() const {
    for (const auto& z : a_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

  CMatrix adjoint() const {
    CMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  // max_ij |A_ij - conj(A_ji)|
  double hermiticity_error() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

  // Replace by (A + A^dag)/2.
  void hermitize() {
    for (int i = 0; i < n_; ++i) {
      (*this)(i, i) = cplx((*this)(i, i).real(), 0.0);
      for (int j = i + 1; j < n_; ++j) {
        cplx m = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        (*this)(i, j) = m;
        (*this)(j, i) = std::conj(m);
      }
    }
  }

 private:
  void check_same(const CMatrix& o) const {
    if (o.n_ != n_) throw DimensionMismatch("CMatrix: dimension mismatch");
  }

  int n_ = 0;
  std::vector<cplx> a_;
};

inline CMatrix operator+(CMatrix a, const CMatrix& b) {
  a += b;
  return a;
}
inline CMatrix operator-(CMatrix a, const CMatrix& b) {
  a -= b;
  return a;
}
inline CMatrix operator*(cplx alpha, CMatrix a) {
  a *= alpha;
  return a;
}

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("matmul: dimension mismatch");
  int n = a.dim();
  CMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// y = A x
inline void matvec_into(const CMatrix& a, const CVector& x, CVector& y) {
  int n = a.dim();
  if (static_cast<int>(x.size()) != n) throw DimensionMismatch("matvec: size mismatch");
  y.assign(static_cast<std::size_t>(n), cplx(0.0));
  for (int i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
}

inline CVector operator*(const CMatrix& a, const CVector& x) {
  CVector y;
  matvec_into(a, x, y);
  return y;
}

// y += alpha * A x
inline void matvec_axpy(const CMatrix& a, const CVector& x, cplx alpha, CVector& y) {
  int n = a.dim();
  for (int i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] += alpha * s;
  }
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace rodeo
