#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracle.hpp"
#include "rodeo/complex_linalg.hpp"
#include "rodeo/eig.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/rng.hpp"

using rodeo::cplx;
using rodeo::CMatrix;
using rodeo::CVector;

namespace {

CMatrix random_matrix(rodeo::RngStream& rng, int n) {
  CMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(rng.next_normal(), rng.next_normal());
  return a;
}

CMatrix random_hermitian(rodeo::RngStream& rng, int n) {
  CMatrix a = random_matrix(rng, n);
  CMatrix h = a;
  h += a.adjoint();
  h *= 0.5;
  return h;
}

CVector random_vector(rodeo::RngStream& rng, int n) {
  CVector v(static_cast<std::size_t>(n));
  for (auto& x : v) x = cplx(rng.next_normal(), rng.next_normal());
  return v;
}

}  // namespace

TEST_CASE("inner product is conjugate linear in the first argument") {
  CVector a = {cplx(1.0, 2.0), cplx(0.0, -1.0)};
  CVector b = {cplx(3.0, 0.0), cplx(1.0, 1.0)};
  cplx expected = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  CHECK(std::abs(rodeo::inner(a, b) - expected) < 1e-15);
  CHECK(std::abs(rodeo::inner(a, a).imag()) < 1e-15);
  CHECK(rodeo::inner(a, a).real() == doctest::Approx(rodeo::norm_sq(a)));
}

TEST_CASE("normalize produces unit vectors and rejects zero input") {
  CVector v = {cplx(3.0, 0.0), cplx(0.0, 4.0)};
  rodeo::normalize(v);
  CHECK(rodeo::vec_norm(v) == doctest::Approx(1.0).epsilon(1e-14));
  CVector z = {cplx(0.0), cplx(0.0)};
  CHECK_THROWS_AS(rodeo::normalize(z), rodeo::ZeroVector);
}

TEST_CASE("matrix product matches the naive reference") {
  rodeo::RngStream rng(12, 0);
  for (int n : {2, 3, 5}) {
    CMatrix a = random_matrix(rng, n);
    CMatrix b = random_matrix(rng, n);
    CMatrix c = a * b;
    oracle::Mat ref = oracle::mul(oracle::from(a), oracle::from(b));
    CHECK(oracle::max_abs_diff(oracle::from(c), ref) < 1e-13);
  }
}

TEST_CASE("matvec and matvec_axpy match the naive reference") {
  rodeo::RngStream rng(13, 0);
  CMatrix a = random_matrix(rng, 4);
  CVector x = random_vector(rng, 4);
  CVector y = a * x;
  auto ref = oracle::matvec(oracle::from(a), x);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-13);

  CVector acc = random_vector(rng, 4);
  CVector expected = acc;
  cplx alpha(0.3, -0.7);
  for (int i = 0; i < 4; ++i) expected[i] += alpha * ref[i];
  rodeo::matvec_axpy(a, x, alpha, acc);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(acc[i] - expected[i]) < 1e-13);
}

TEST_CASE("add_outer adds a scaled outer product") {
  CMatrix m(2);
  CVector u = {cplx(1.0, 1.0), cplx(2.0, 0.0)};
  CVector v = {cplx(0.0, 1.0), cplx(1.0, -1.0)};
  cplx alpha(0.5, 0.25);
  m.add_outer(alpha, u, v);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(m(i, j) - alpha * u[i] * std::conj(v[j])) < 1e-15);
}

TEST_CASE("hermiticity_error and hermitize behave") {
  CMatrix m(2);
  m(0, 0) = 1.0;
  m(0, 1) = cplx(1.0, 2.0);
  m(1, 0) = cplx(1.0, -2.0);
  m(1, 1) = -3.0;
  CHECK(m.hermiticity_error() == doctest::Approx(0.0));
  m(1, 0) = cplx(1.0, -1.0);
  CHECK(m.hermiticity_error() == doctest::Approx(1.0));
  m.hermitize();
  CHECK(m.hermiticity_error() == doctest::Approx(0.0));
  CHECK(m(0, 1) == cplx(1.0, 1.5));
}

TEST_CASE("commutator of hermitian matrices is anti-hermitian") {
  rodeo::RngStream rng(14, 0);
  CMatrix a = random_hermitian(rng, 3);
  CMatrix b = random_hermitian(rng, 3);
  CMatrix c = rodeo::commutator(a, b);
  CMatrix cd = c.adjoint();
  cd += c;
  CHECK(cd.max_abs() < 1e-13);
}

TEST_CASE("canonicalize_phase makes the largest component real positive") {
  CVector v = {cplx(0.0, 0.5), cplx(0.0, -2.0)};
  double n_before = rodeo::vec_norm(v);
  rodeo::canonicalize_phase(v);
  CHECK(v[1].imag() == doctest::Approx(0.0));
  CHECK(v[1].real() > 0.0);
  CHECK(rodeo::vec_norm(v) == doctest::Approx(n_before));

  // Equal magnitudes: earliest index wins.
  CVector w = {cplx(0.0, 1.0), cplx(0.0, 1.0)};
  rodeo::canonicalize_phase(w);
  CHECK(w[0].real() == doctest::Approx(1.0));
  CHECK(std::abs(w[0].imag()) < 1e-15);
}

TEST_CASE("jacobi reproduces the closed-form spectrum of a 2x2 hermitian matrix") {
  CMatrix m(2);
  m(0, 0) = 1.0;
  m(0, 1) = cplx(0.3, -0.4);
  m(1, 0) = cplx(0.3, 0.4);
  m(1, 1) = -0.5;
  auto sd = rodeo::hermitian_eig(m);
  // (a+d)/2 +- sqrt((a-d)^2/4 + |z|^2)
  double mean = 0.25, radius = std::sqrt(2.25 / 4.0 + 0.25);
  REQUIRE(sd.eigenvalues.size() == 2);
  CHECK(sd.eigenvalues[0] == doctest::Approx(mean - radius).epsilon(1e-12));
  CHECK(sd.eigenvalues[1] == doctest::Approx(mean + radius).epsilon(1e-12));
}

TEST_CASE("jacobi reconstructs random hermitian matrices") {
  rodeo::RngStream rng(15, 0);
  for (int n : {2, 3, 4, 6}) {
    CMatrix a = random_hermitian(rng, n);
    auto sd = rodeo::hermitian_eig(a);

    // eigenvalues ascending
    for (std::size_t i = 1; i < sd.eigenvalues.size(); ++i)
      CHECK(sd.eigenvalues[i - 1] <= sd.eigenvalues[i]);

    // orthonormal eigenvectors
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx g = rodeo::inner(sd.eigenvectors[i], sd.eigenvectors[j]);
        CHECK(std::abs(g - (i == j ? cplx(1.0) : cplx(0.0))) < 1e-12);
      }

    // A = V L V^dag
    CMatrix rec(n);
    for (int i = 0; i < n; ++i)
      rec.add_outer(sd.eigenvalues[i], sd.eigenvectors[i], sd.eigenvectors[i]);
    CHECK(rodeo::max_abs_diff(rec, a) < 1e-12);

    // residual A v = lambda v
    for (int i = 0; i < n; ++i) {
      CVector av = a * sd.eigenvectors[i];
      for (int r = 0; r < n; ++r)
        CHECK(std::abs(av[r] - sd.eigenvalues[i] * sd.eigenvectors[i][r]) < 1e-12);
    }

    // phase convention holds for every eigenvector
    for (int i = 0; i < n; ++i) {
      const CVector& v = sd.eigenvectors[i];
      std::size_t big = 0;
      for (std::size_t r = 1; r < v.size(); ++r)
        if (std::abs(v[r]) > std::abs(v[big]) + 1e-15) big = r;
      CHECK(v[big].real() >= 0.0);
      CHECK(std::abs(v[big].imag()) < 1e-10);
    }
  }
}

TEST_CASE("jacobi output is bitwise deterministic") {
  rodeo::RngStream rng(16, 0);
  CMatrix a = random_hermitian(rng, 5);
  auto s1 = rodeo::hermitian_eig(a);
  auto s2 = rodeo::hermitian_eig(a);
  for (int i = 0; i < 5; ++i) {
    CHECK(s1.eigenvalues[i] == s2.eigenvalues[i]);
    for (int r = 0; r < 5; ++r) CHECK(s1.eigenvectors[i][r] == s2.eigenvectors[i][r]);
  }
}

TEST_CASE("jacobi handles degenerate spectra") {
  CMatrix m = CMatrix::identity(3);
  m *= 2.5;
  auto sd = rodeo::hermitian_eig(m);
  for (double v : sd.eigenvalues) CHECK(v == doctest::Approx(2.5));
  CMatrix rec(3);
  for (int i = 0; i < 3; ++i)
    rec.add_outer(sd.eigenvalues[i], sd.eigenvectors[i], sd.eigenvectors[i]);
  CHECK(rodeo::max_abs_diff(rec, m) < 1e-12);
}

TEST_CASE("hermitian_eig rejects a matrix that is visibly not hermitian") {
  CMatrix m(2);
  m(0, 1) = cplx(1.0, 0.0);
  m(1, 0) = cplx(0.0, 0.0);
  CHECK_THROWS_AS(rodeo::hermitian_eig(m), rodeo::NotHermitian);
}

TEST_CASE("projector builds |psi><psi|") {
  CVector v = {cplx(0.6, 0.0), cplx(0.0, 0.8)};
  CMatrix p = rodeo::projector(v);
  CHECK(std::abs(p(0, 0) - cplx(0.36)) < 1e-15);
  CHECK(std::abs(p(0, 1) - cplx(0.0, -0.48)) < 1e-15);
  CHECK(std::abs(p(1, 0) - cplx(0.0, 0.48)) < 1e-15);
  CHECK(std::abs(p(1, 1) - cplx(0.64)) < 1e-15);
  CVector z = {cplx(0.0), cplx(0.0)};
  CHECK_THROWS_AS(rodeo::projector(z), rodeo::ZeroVector);
}

TEST_CASE("trace and frobenius norm") {
  CMatrix m(2);
  m(0, 0) = cplx(1.0, 1.0);
  m(1, 1) = cplx(2.0, -3.0);
  m(0, 1) = cplx(0.0, 2.0);
  CHECK(std::abs(m.trace() - cplx(3.0, -2.0)) < 1e-15);
  CHECK(m.frobenius_norm() ==
        doctest::Approx(std::sqrt(2.0 + 13.0 + 4.0)).epsilon(1e-14));
}

TEST_CASE("fidelity is the squared overlap") {
  CVector a = {cplx(1.0), cplx(0.0)};
  CVector b = {cplx(std::sqrt(0.5)), cplx(std::sqrt(0.5))};
  CHECK(rodeo::fidelity(a, b) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rodeo::fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
}
