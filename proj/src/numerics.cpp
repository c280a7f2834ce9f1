#include "relaysim/numerics.hpp"

#include <cmath>
#include <sstream>

namespace relaysim::numerics {

namespace {

double max_abs_entry(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream msg;
        msg << who << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw DimensionMismatch(msg.str());
    }
}

// Cholesky on an already-symmetrized matrix. Returns false on a
// non-positive pivot instead of throwing so hermitian_check can reuse it.
bool cholesky_in_place(const ComplexMatrix& m, ComplexMatrix& l) {
    const Eigen::Index n = m.rows();
    l = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = m(j, j).real() - l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0)) {
            return false;
        }
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            // sum_k L(i,k) conj(L(j,k))
            const Complex sum = (l.row(j).head(j).conjugate().cwiseProduct(l.row(i).head(j))).sum();
            l(i, j) = (m(i, j) - sum) / l(j, j);
        }
    }
    return true;
}

}  // namespace

HermitianCheckReport hermitian_check(const ComplexMatrix& m, double tol) {
    HermitianCheckReport report;
    if (m.rows() != m.cols()) {
        return report;  // non-square: trivially not Hermitian
    }
    report.max_asymmetry = (m - m.adjoint()).cwiseAbs().maxCoeff();
    report.is_hermitian = report.max_asymmetry <= tol * max_abs_entry(m);
    if (report.is_hermitian) {
        ComplexMatrix sym = 0.5 * (m + m.adjoint());
        ComplexMatrix l;
        report.is_positive_definite = cholesky_in_place(sym, l);
    }
    return report;
}

ComplexMatrix symmetrized(const ComplexMatrix& m, double tol) {
    require_square(m, "symmetrized");
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol * max_abs_entry(m)) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: max asymmetry " << asym;
        throw NotHermitian(msg.str());
    }
    return 0.5 * (m + m.adjoint());
}

ComplexMatrix cholesky(const ComplexMatrix& m) {
    ComplexMatrix sym = symmetrized(m);
    ComplexMatrix l;
    if (!cholesky_in_place(sym, l)) {
        throw NotPositiveDefinite("cholesky: non-positive pivot");
    }
    return l;
}

ComplexMatrix forward_solve(const ComplexMatrix& lower, const ComplexMatrix& b) {
    require_square(lower, "forward_solve");
    if (lower.rows() != b.rows()) {
        throw DimensionMismatch("forward_solve: right-hand side has wrong row count");
    }
    const Eigen::Index n = lower.rows();
    ComplexMatrix x(n, b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex sum = (lower.row(i).head(i).transpose().cwiseProduct(x.col(c).head(i))).sum();
            x(i, c) = (b(i, c) - sum) / lower(i, i);
        }
    }
    return x;
}

ComplexMatrix adjoint_solve(const ComplexMatrix& lower, const ComplexMatrix& b) {
    require_square(lower, "adjoint_solve");
    if (lower.rows() != b.rows()) {
        throw DimensionMismatch("adjoint_solve: right-hand side has wrong row count");
    }
    const Eigen::Index n = lower.rows();
    ComplexMatrix x(n, b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            Complex sum(0.0, 0.0);
            for (Eigen::Index k = i + 1; k < n; ++k) {
                sum += std::conj(lower(k, i)) * x(k, c);
            }
            x(i, c) = (b(i, c) - sum) / std::conj(lower(i, i));
        }
    }
    return x;
}

ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& b) {
    if (m.rows() != b.size()) {
        throw DimensionMismatch("solve_hermitian: vector length does not match matrix");
    }
    ComplexMatrix x = solve_hermitian(m, ComplexMatrix(b));
    return ComplexVector(x.col(0));
}

ComplexMatrix solve_hermitian(const ComplexMatrix& m, const ComplexMatrix& b) {
    ComplexMatrix l = cholesky(m);
    return adjoint_solve(l, forward_solve(l, b));
}

std::pair<double, ComplexVector> principal_eigenpair(const ComplexMatrix& m) {
    require_square(m, "principal_eigenpair");
    ComplexMatrix sym = symmetrized(m);
    const Eigen::Index n = sym.rows();
    if (n == 0) {
        throw DimensionMismatch("principal_eigenpair: empty matrix");
    }

    // Deterministic start with nonzero overlap against any fixed eigenbasis
    // direction is not guaranteed, so nudge with an index-dependent ramp.
    ComplexVector v = ComplexVector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) += Complex(0.25 * static_cast<double>(i + 1) / static_cast<double>(n),
                        0.125 * static_cast<double>(i) / static_cast<double>(n));
    }
    v.normalize();

    double prev = -1.0;
    ComplexVector mv = sym * v;
    for (int iter = 0; iter < kEigenMaxIters; ++iter) {
        const double lambda = std::real(v.dot(mv));  // Rayleigh quotient
        // Converged when the quotient has settled and the eigen-residual
        // meets the contract (the quotient alone converges much earlier).
        if (iter > 0 &&
            std::abs(lambda - prev) <= kEigenTol * std::max(std::abs(lambda), 1e-300) &&
            (mv - lambda * v).norm() <= 1e-10 * std::max(lambda, 1e-300)) {
            return {lambda, canonical_phase(v)};
        }
        prev = lambda;
        const double norm = mv.norm();
        if (norm == 0.0) {
            // v is in the null space; for PSD input the whole spectrum is 0.
            return {0.0, canonical_phase(v)};
        }
        v = mv / norm;
        mv = sym * v;
    }
    throw NoConvergence("principal_eigenpair: power iteration hit the iteration cap");
}

ComplexVector hadamard(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("hadamard: vector lengths differ");
    }
    return a.cwiseProduct(b);
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("hadamard: matrix shapes differ");
    }
    return a.cwiseProduct(b);
}

ComplexVector canonical_phase(const ComplexVector& v) {
    Eigen::Index pivot = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best) {
            best = mag;
            pivot = i;
        }
    }
    if (pivot < 0) {
        return v;
    }
    return v * (std::conj(v(pivot)) / best);
}

}  // namespace relaysim::numerics
