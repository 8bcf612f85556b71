#include "treeshift/linalg.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace treeshift {

namespace {

template <typename Mat>
double svd_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

template <typename Mat>
Nullspace nullspace_impl(const Mat& m, double rel_tol) {
    if (rel_tol <= 0.0) throw std::invalid_argument("nullspace tolerance must be positive");
    Nullspace out;
    out.rel_tol = rel_tol;
    const Eigen::Index cols = m.cols();
    if (cols == 0) {
        out.basis = ComplexMatrix(0, 0);
        out.gap_above = std::numeric_limits<double>::infinity();
        return out;
    }
    if (m.rows() == 0) {
        out.basis = ComplexMatrix::Identity(cols, cols);
        out.dimension = static_cast<int>(cols);
        out.gap_above = std::numeric_limits<double>::infinity();
        return out;
    }
    Eigen::BDCSVD<ComplexMatrix> svd(ComplexMatrix(m.template cast<std::complex<double>>()),
                                     Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (sigma_max == 0.0) {
        out.basis = ComplexMatrix::Identity(cols, cols);
        out.dimension = static_cast<int>(cols);
        out.gap_above = std::numeric_limits<double>::infinity();
        return out;
    }
    const double threshold = rel_tol * sigma_max;
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
    out.dimension = static_cast<int>(cols - rank);
    out.basis = svd.matrixV().rightCols(cols - rank);
    out.gap_above = rank > 0 ? sigma(rank - 1) / sigma_max : std::numeric_limits<double>::infinity();
    out.gap_below = rank < sigma.size() ? sigma(rank) / sigma_max : 0.0;
    out.ambiguous = (out.gap_below > rel_tol / 10.0) ||
                    (rank > 0 && out.gap_above < rel_tol * 10.0);
    return out;
}

bool is_upper_triangular(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
            if (m(i, j) != 0.0) return false;
        }
    }
    return true;
}

}  // namespace

double operator_norm(const Matrix& m) { return svd_norm(m); }
double operator_norm(const ComplexMatrix& m) { return svd_norm(m); }

Nullspace nullspace(const ComplexMatrix& m, double rel_tol) { return nullspace_impl(m, rel_tol); }
Nullspace nullspace(const Matrix& m, double rel_tol) { return nullspace_impl(m, rel_tol); }

double spectral_radius(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral radius needs a square matrix");
    if (m.rows() == 0) return 0.0;
    if (is_upper_triangular(m) || is_upper_triangular(Matrix(m.transpose()))) {
        return m.diagonal().cwiseAbs().maxCoeff();
    }
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EigRange hermitian_eig_range(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalue range needs a square matrix");
    if (m.rows() == 0) return {};
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

EigRange hermitian_eig_range(const Matrix& m) {
    return hermitian_eig_range(ComplexMatrix(m.cast<std::complex<double>>()));
}

double largest_principal_angle(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("principal angles need matching row dimensions");
    if (a.cols() != b.cols()) throw std::invalid_argument("principal angles compare equal-dimension subspaces");
    if (a.cols() == 0) return 0.0;
    Eigen::HouseholderQR<ComplexMatrix> qa(a);
    Eigen::HouseholderQR<ComplexMatrix> qb(b);
    const ComplexMatrix qa_thin =
        qa.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
    const ComplexMatrix qb_thin =
        qb.householderQ() * ComplexMatrix::Identity(b.rows(), b.cols());
    Eigen::BDCSVD<ComplexMatrix> svd(ComplexMatrix(qa_thin.adjoint() * qb_thin));
    const double cos_min = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
    return std::acos(cos_min);
}

}  // namespace treeshift
