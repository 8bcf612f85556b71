#pragma once

#include <complex>

#include <Eigen/Dense>

namespace treeshift {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Largest singular value.
double operator_norm(const Matrix& m);
double operator_norm(const ComplexMatrix& m);

// Orthonormal basis of the (numerical) null space of a rectangular matrix.
// Singular values below rel_tol * sigma_max count as zero; `ambiguous` flags a
// retained/discarded singular value within a factor 10 of the threshold, i.e.
// a rank decision that tightening the tolerance could flip.
struct Nullspace {
    ComplexMatrix basis;   // columns orthonormal
    int dimension = 0;
    double rel_tol = 0.0;
    double gap_below = 0.0;  // largest discarded sigma / sigma_max (0 if none)
    double gap_above = 0.0;  // smallest retained sigma / sigma_max (inf if none)
    bool ambiguous = false;
};
Nullspace nullspace(const ComplexMatrix& m, double rel_tol = 1e-10);
Nullspace nullspace(const Matrix& m, double rel_tol = 1e-10);

// Spectral radius.  Triangular matrices (either orientation, detected exactly)
// read the answer off the diagonal; QR iteration on a nilpotent matrix would
// otherwise scatter eigenvalues at magnitude ~eps^{1/n}.
double spectral_radius(const Matrix& m);

// Extreme eigenvalues of a self-adjoint matrix (symmetrized before solving).
struct EigRange {
    double min = 0.0;
    double max = 0.0;
};
EigRange hermitian_eig_range(const ComplexMatrix& m);
EigRange hermitian_eig_range(const Matrix& m);

// Largest principal angle (radians) between the column spans of two matrices
// with the same row dimension.  0 means equal subspaces.
double largest_principal_angle(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace treeshift
