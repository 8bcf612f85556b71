#pragma once

#include <complex>

#include "treeshift/linalg.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/weights.hpp"

namespace treeshift {

// Weighted shift S e_v = sum_{u in Chi(v)} lambda_u e_u compressed to the
// vertices of depth <= N (N = frontier depth of the represented tree).  BFS
// indexing makes the matrix strictly lower triangular, with zero columns on
// the frontier (whose children are not represented).
struct TruncatedShift {
    const DirectedTree* tree = nullptr;
    WeightSystem weights;

    static TruncatedShift build(const DirectedTree& tree, WeightSystem weights);

    int dimension() const { return tree->vertex_count(); }
    int horizon() const { return tree->frontier_depth(); }
    // Vertices of depth <= N-1; a BFS index prefix.
    int interior_dimension() const;

    Matrix matrix() const;

    Vector apply(const Vector& f) const;
    Vector apply_adjoint(const Vector& f) const;
    ComplexVector apply(const ComplexVector& f) const;
    ComplexVector apply_adjoint(const ComplexVector& f) const;

    // ||S_N|| exactly: S*S is diagonal (children of distinct vertices are
    // disjoint), so the norm is the largest represented child weight-square
    // sum, square-rooted.
    double norm_exact() const;

    // ||S^n e_v||^2 summed from weight products down the subtree; exact to
    // rounding, and equal to the infinite-tree value when depth(v)+n <= N.
    double power_norm_square(int v, int n) const;
};

// dim ker S* = 1 + sum over branching vertices of (card Chi(v) - 1).
int kernel_dimension_formula(const DirectedTree& tree);

// Orthonormal basis of ker S_N* with the frontier artifacts removed: e_root
// plus, for every branching vertex (all of whose children are represented),
// the orthogonal complement of the weight vector inside span{e_u : u child}.
// Columns are sign-normalized so the first nonzero coordinate is positive.
Matrix adjoint_kernel_basis(const TruncatedShift& shift);

// Null space of the rectangular system (S* - conj(w)) restricted to the rows
// of interior vertices (depth <= N-1).  At w = 0 this reproduces the basis
// above (same span); for |w| < ||S|| it contains the truncated eigenvector
// sections of S* exactly.
Nullspace adjoint_eigenspace(const TruncatedShift& shift, std::complex<double> w,
                             double rel_tol = 1e-10);

// Cauchy dual at the weight level: lambda'_u = lambda_u / ||Gamma_parent(u)||^2
// with the square sum taken from the closed form for formula-backed families
// (so the dual matches the infinite operator's dual on every represented
// vertex).
TruncatedShift cauchy_dual(const TruncatedShift& shift);

// Dense route T (T*T)^{-1} for a general matrix block.  Throws
// std::invalid_argument naming the offending smallest singular value when
// T*T is not invertible at the given relative tolerance — which happens for
// the full truncated shift, whose frontier columns are zero.
Matrix cauchy_dual_dense(const Matrix& t, double invertibility_tol = 1e-12);

// Dense dual of the interior-column block (parents of depth <= N-1, all of
// whose children are represented): T*T is an invertible diagonal there, and
// the resulting columns coincide with the weight-level dual's columns.
Matrix cauchy_dual_interior(const TruncatedShift& shift);

// Compression of S*S - SS* to the interior block (depth <= N-1), where the
// truncated form agrees with the infinite one entry for entry.  Hyponormality
// means this is positive semidefinite.
Matrix hyponormality_form(const TruncatedShift& shift);

// Compression of I - 2 S*S + S*^2 S^2 to depth <= N-2, again exact there.
// The Cauchy dual of a Bergman-type shift is concave iff this is PSD.
Matrix concavity_form(const TruncatedShift& shift);

}  // namespace treeshift
