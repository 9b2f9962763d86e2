#pragma once
// Deterministic Hermitian eigensolver (cyclic Jacobi) and projectors.
// No external dependency so identical inputs give identical bytes out,
// which the reproducibility contract of the stochastic engines relies on.

#include <vector>

#include "rodeo/complex_linalg.hpp"

namespace rodeo {

struct SpectralDecomposition {
  std::vector<double> eigenvalues;   // ascending
  std::vector<CVector> eigenvectors; // orthonormal, phase-canonicalized
};

// Cyclic Jacobi on (A + A^dag)/2. Throws NotHermitian if the Hermiticity
// error of A exceeds herm_tol, NoConvergence if the fixed sweep budget is
// exhausted. Eigenvalues ascending; ties are broken by lexicographic
// comparison of the canonicalized eigenvectors.
SpectralDecomposition hermitian_eig(const CMatrix& a, double herm_tol);
SpectralDecomposition hermitian_eig(const CMatrix& a);

// Allocation-light core used by the hot loops: diagonalizes `work` in place
// (content destroyed), fills `vectors` with eigenvector columns and `values`
// with ascending eigenvalues. Caller guarantees Hermiticity.
void jacobi_hermitian(CMatrix& work, CMatrix& vectors, std::vector<double>& values);

// |psi><psi| without normalization; trace equals ||psi||^2.
CMatrix projector(const CVector& psi);

}  // namespace rodeo
