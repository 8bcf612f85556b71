#include "treeshift/shift.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace treeshift {

namespace {

double represented_child_square_sum(const TruncatedShift& shift, int v) {
    double sum = 0.0;
    for (int u : shift.tree->children(v)) {
        const double l = shift.weights.lambda[static_cast<std::size_t>(u)];
        sum += l * l;
    }
    return sum;
}

}  // namespace

TruncatedShift TruncatedShift::build(const DirectedTree& tree, WeightSystem weights) {
    if (weights.tree != &tree) {
        throw std::invalid_argument("weight system was built for a different tree");
    }
    TruncatedShift s;
    s.tree = &tree;
    s.weights = std::move(weights);
    return s;
}

int TruncatedShift::interior_dimension() const {
    const auto sizes = tree->generation_sizes();
    return tree->vertex_count() - static_cast<int>(sizes.back());
}

Matrix TruncatedShift::matrix() const {
    const int n = dimension();
    Matrix m = Matrix::Zero(n, n);
    for (int u = 1; u < n; ++u) {
        m(u, tree->parent_of(u)) = weights.lambda[static_cast<std::size_t>(u)];
    }
    return m;
}

Vector TruncatedShift::apply(const Vector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    Vector out = Vector::Zero(f.size());
    for (int u = 1; u < dimension(); ++u) {
        out(u) = weights.lambda[static_cast<std::size_t>(u)] * f(tree->parent_of(u));
    }
    return out;
}

Vector TruncatedShift::apply_adjoint(const Vector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    Vector out = Vector::Zero(f.size());
    for (int u = 1; u < dimension(); ++u) {
        out(tree->parent_of(u)) += weights.lambda[static_cast<std::size_t>(u)] * f(u);
    }
    return out;
}

ComplexVector TruncatedShift::apply(const ComplexVector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    ComplexVector out = ComplexVector::Zero(f.size());
    for (int u = 1; u < dimension(); ++u) {
        out(u) = weights.lambda[static_cast<std::size_t>(u)] * f(tree->parent_of(u));
    }
    return out;
}

ComplexVector TruncatedShift::apply_adjoint(const ComplexVector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    ComplexVector out = ComplexVector::Zero(f.size());
    for (int u = 1; u < dimension(); ++u) {
        out(tree->parent_of(u)) += weights.lambda[static_cast<std::size_t>(u)] * f(u);
    }
    return out;
}

double TruncatedShift::norm_exact() const {
    double sup = 0.0;
    for (int v = 0; v < dimension(); ++v) {
        sup = std::max(sup, represented_child_square_sum(*this, v));
    }
    return std::sqrt(sup);
}

double TruncatedShift::power_norm_square(int v, int n) const {
    if (v < 0 || v >= dimension()) throw std::invalid_argument("vertex out of range");
    if (n < 0) throw std::invalid_argument("power must be non-negative");
    if (tree->depth_of(v) + n > horizon()) {
        throw std::invalid_argument("power escapes the truncation horizon");
    }
    Vector f = Vector::Zero(dimension());
    f(v) = 1.0;
    for (int k = 0; k < n; ++k) f = apply(f);
    return f.squaredNorm();
}

int kernel_dimension_formula(const DirectedTree& tree) {
    int dim = 1;
    for (int v : tree.branching_vertices()) {
        dim += static_cast<int>(tree.children(v).size()) - 1;
    }
    return dim;
}

Matrix adjoint_kernel_basis(const TruncatedShift& shift) {
    const DirectedTree& tree = *shift.tree;
    const int n = shift.dimension();
    Matrix basis = Matrix::Zero(n, kernel_dimension_formula(tree));
    int col = 0;
    basis(tree.root(), col++) = 1.0;
    for (int v : tree.branching_vertices()) {
        const auto& chi = tree.children(v);
        const int k = static_cast<int>(chi.size());
        Vector gamma(k);
        for (int i = 0; i < k; ++i) gamma(i) = shift.weights.lambda[static_cast<std::size_t>(chi[i])];
        Eigen::HouseholderQR<Matrix> qr(gamma);
        const Matrix q = qr.householderQ() * Matrix::Identity(k, k);
        for (int j = 1; j < k; ++j) {
            Vector column = q.col(j);
            for (int i = 0; i < k; ++i) {
                if (std::abs(column(i)) > 1e-14) {
                    if (column(i) < 0.0) column = -column;
                    break;
                }
            }
            for (int i = 0; i < k; ++i) basis(chi[i], col) = column(i);
            ++col;
        }
    }
    return basis;
}

Nullspace adjoint_eigenspace(const TruncatedShift& shift, std::complex<double> w, double rel_tol) {
    const DirectedTree& tree = *shift.tree;
    const int n = shift.dimension();
    const int interior = shift.interior_dimension();
    ComplexMatrix rows = ComplexMatrix::Zero(interior, n);
    for (int v = 0; v < interior; ++v) {
        for (int u : tree.children(v)) {
            rows(v, u) = shift.weights.lambda[static_cast<std::size_t>(u)];
        }
        rows(v, v) -= std::conj(w);
    }
    return nullspace(rows, rel_tol);
}

TruncatedShift cauchy_dual(const TruncatedShift& shift) {
    const DirectedTree& tree = *shift.tree;
    std::vector<double> dual(static_cast<std::size_t>(tree.vertex_count()), 0.0);
    for (int u = 1; u < tree.vertex_count(); ++u) {
        const double denom = shift.weights.child_weight_square_sum(tree.parent_of(u));
        if (!(denom > 0.0)) throw std::invalid_argument("Cauchy dual needs positive child weight sums");
        dual[static_cast<std::size_t>(u)] = shift.weights.lambda[static_cast<std::size_t>(u)] / denom;
    }
    return TruncatedShift::build(tree, WeightSystem::custom(tree, std::move(dual)));
}

Matrix cauchy_dual_dense(const Matrix& t, double invertibility_tol) {
    const Matrix gram = t.transpose() * t;
    Eigen::BDCSVD<Matrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double sigma_min = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
    if (!(sigma_min > invertibility_tol * std::max(sigma_max, 1.0))) {
        std::ostringstream os;
        os << "T*T is not invertible: smallest singular value " << sigma_min
           << " (largest " << sigma_max << ", tolerance " << invertibility_tol << ")";
        throw std::invalid_argument(os.str());
    }
    return t * gram.llt().solve(Matrix::Identity(gram.rows(), gram.cols()));
}

Matrix cauchy_dual_interior(const TruncatedShift& shift) {
    const Matrix m = shift.matrix();
    const Matrix block = m.leftCols(shift.interior_dimension());
    return cauchy_dual_dense(block, 1e-12);
}

Matrix hyponormality_form(const TruncatedShift& shift) {
    const Matrix m = shift.matrix();
    const Matrix form = m.transpose() * m - m * m.transpose();
    const int interior = shift.interior_dimension();
    return form.topLeftCorner(interior, interior);
}

Matrix concavity_form(const TruncatedShift& shift) {
    const Matrix m = shift.matrix();
    const int n = shift.dimension();
    const Matrix m2 = m * m;
    const Matrix form =
        Matrix::Identity(n, n) - 2.0 * (m.transpose() * m) + m2.transpose() * m2;
    const auto sizes = shift.tree->generation_sizes();
    int core = shift.dimension();
    core -= static_cast<int>(sizes.back());
    if (sizes.size() >= 2) core -= static_cast<int>(sizes[sizes.size() - 2]);
    if (core < 0) core = 0;
    return form.topLeftCorner(core, core);
}

}  // namespace treeshift
