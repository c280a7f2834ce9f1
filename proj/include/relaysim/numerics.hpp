#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "relaysim/errors.hpp"

namespace relaysim {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

namespace numerics {

// Relative asymmetry (against max |entry|) below which a matrix is accepted
// as Hermitian and silently symmetrized. Covariances assembled from
// floating-point outer products drift by a few ulps.
inline constexpr double kHermitianTol = 1e-9;

// Power-iteration controls for principal_eigenpair.
inline constexpr double kEigenTol = 1e-12;
inline constexpr int kEigenMaxIters = 10000;

struct HermitianCheckReport {
    bool is_hermitian = false;
    double max_asymmetry = 0.0;  // max_ij |M(i,j) - conj(M(j,i))|
    bool is_positive_definite = false;
};

// Inspects M without modifying it. is_hermitian is judged against
// tol * max|M_ij|; positive definiteness is probed with a Cholesky pass on
// the symmetrized matrix.
HermitianCheckReport hermitian_check(const ComplexMatrix& m, double tol = kHermitianTol);

// Returns (M + M^H)/2. Throws NotHermitian if the asymmetry exceeds
// tol * max|M_ij|, and DimensionMismatch if M is not square.
ComplexMatrix symmetrized(const ComplexMatrix& m, double tol = kHermitianTol);

// Cholesky factor L (lower triangular) with L L^H = M. M must be Hermitian
// within tolerance and positive definite. Throws NotPositiveDefinite on a
// non-positive pivot.
ComplexMatrix cholesky(const ComplexMatrix& m);

// Solves M x = b for Hermitian positive definite M via Cholesky.
ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& b);
ComplexMatrix solve_hermitian(const ComplexMatrix& m, const ComplexMatrix& b);

// Triangular solves against a lower-triangular factor L:
//   forward_solve:  L X = B
//   adjoint_solve:  L^H X = B
ComplexMatrix forward_solve(const ComplexMatrix& lower, const ComplexMatrix& b);
ComplexMatrix adjoint_solve(const ComplexMatrix& lower, const ComplexMatrix& b);

// Principal eigenpair (largest eigenvalue and unit eigenvector) of a
// Hermitian PSD matrix, by power iteration with a Rayleigh-quotient
// convergence test (relative tolerance kEigenTol, at most kEigenMaxIters
// iterations). The eigenvector is phase-canonicalized. Throws NoConvergence
// when the leading eigenspace is (near-)degenerate.
std::pair<double, ComplexVector> principal_eigenpair(const ComplexMatrix& m);

// Elementwise product. Shapes must match exactly.
ComplexVector hadamard(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

// Rotates v by a global phase so its component of largest modulus (lowest
// index on ties) becomes real nonnegative. The zero vector is returned
// unchanged. Gain vectors and eigenvectors are only determined up to a
// global phase; this picks the reproducible representative.
ComplexVector canonical_phase(const ComplexVector& v);

}  // namespace numerics
}  // namespace relaysim
