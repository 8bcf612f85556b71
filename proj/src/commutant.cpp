#include "treeshift/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

namespace treeshift {

namespace {

constexpr double kAbelianTol = 1e-8;
constexpr double kCommutationTol = 1e-8;

// Columns of the BFS prefix with tree depth <= max_depth (empty if negative).
int prefix_size(const DirectedTree& tree, int max_depth) {
    if (max_depth < 0) return 0;
    const int capped = std::min(max_depth, tree.frontier_depth());
    const auto& gen = tree.generation(capped);
    return gen.back() + 1;
}

// Truncated coefficient convolution of Phi against power coordinates.
ComplexMatrix convolve(const MatrixMultiplier& phi, const ComplexMatrix& power) {
    ComplexMatrix out = ComplexMatrix::Zero(power.rows(), power.cols());
    const int deg = phi.degree();
    for (int n = 0; n < power.cols(); ++n) {
        for (int k = 0; k <= std::min(deg, n); ++k) {
            out.col(n) += phi.coefficients[static_cast<std::size_t>(k)] * power.col(n - k);
        }
    }
    return out;
}

}  // namespace

CommutantReport commutant_basis(const Matrix& s, double rel_tol) {
    if (s.rows() != s.cols()) throw std::invalid_argument("commutant needs a square matrix");
    const int n = static_cast<int>(s.rows());
    if (n > 400) throw std::invalid_argument("commutant limited to dimension <= 400");
    const Matrix id = Matrix::Identity(n, n);
    // vec(S X - X S) = (I (x) S - S^T (x) I) vec(X), column-major vec.
    const Matrix k_commute =
        kroneckerProduct(id, s).eval() - kroneckerProduct(Matrix(s.transpose()), id).eval();
    const Nullspace ns = nullspace(k_commute, rel_tol);

    CommutantReport report;
    report.ambient_dimension = n;
    report.dimension = ns.dimension;
    report.ambiguous = ns.ambiguous;
    report.basis.reserve(static_cast<std::size_t>(ns.dimension));
    for (int c = 0; c < ns.dimension; ++c) {
        const Vector v = ns.basis.col(c).real();
        report.basis.emplace_back(Eigen::Map<const Matrix>(v.data(), n, n));
    }
    for (const Matrix& x : report.basis) {
        report.max_commutation_residual =
            std::max(report.max_commutation_residual, operator_norm(Matrix(s * x - x * s)));
    }
    for (std::size_t i = 0; i < report.basis.size(); ++i) {
        for (std::size_t j = i + 1; j < report.basis.size(); ++j) {
            const Matrix& x = report.basis[i];
            const Matrix& y = report.basis[j];
            report.max_pairwise_commutator =
                std::max(report.max_pairwise_commutator, operator_norm(Matrix(x * y - y * x)));
        }
    }
    report.abelian = report.max_pairwise_commutator <= kAbelianTol;
    // {S, S*}' via the stacked system for S X - X S and S^T X - X S^T.
    const Matrix k_star =
        kroneckerProduct(id, Matrix(s.transpose())).eval() - kroneckerProduct(s, id).eval();
    Matrix stacked(2 * n * n, n * n);
    stacked.topRows(n * n) = k_commute;
    stacked.bottomRows(n * n) = k_star;
    report.star_commutant_dimension = nullspace(stacked, rel_tol).dimension;
    report.irreducible = report.star_commutant_dimension == 1;
    return report;
}

std::string commutant_report_json(const CommutantReport& report) {
    nlohmann::json j;
    j["ambient_dimension"] = report.ambient_dimension;
    j["dimension"] = report.dimension;
    j["rank_ambiguous"] = report.ambiguous;
    j["max_commutation_residual"] = report.max_commutation_residual;
    j["max_pairwise_commutator"] = report.max_pairwise_commutator;
    j["abelian"] = report.abelian;
    j["star_commutant_dimension"] = report.star_commutant_dimension;
    j["irreducible"] = report.irreducible;
    nlohmann::json basis = nlohmann::json::array();
    for (const Matrix& x : report.basis) {
        nlohmann::json entry = nlohmann::json::array();
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < x.cols(); ++c) entry.push_back(x(r, c));
        }
        basis.push_back(std::move(entry));
    }
    j["basis_row_major"] = std::move(basis);
    return j.dump(2);
}

int MatrixMultiplier::dim_e() const {
    if (coefficients.empty()) throw std::invalid_argument("matrix multiplier has no coefficients");
    const Eigen::Index d = coefficients.front().rows();
    for (const ComplexMatrix& c : coefficients) {
        if (c.rows() != d || c.cols() != d) {
            throw std::invalid_argument("matrix multiplier coefficients must be square, same size");
        }
    }
    return static_cast<int>(d);
}

ComplexMatrix MatrixMultiplier::value(std::complex<double> w) const {
    const int d = dim_e();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t k = coefficients.size(); k-- > 0;) {
        out = out * w + coefficients[k];
    }
    return out;
}

MatrixMultiplier MatrixMultiplier::constant(const ComplexMatrix& c) {
    if (c.rows() != c.cols()) throw std::invalid_argument("constant multiplier must be square");
    return MatrixMultiplier{{c}};
}

MatrixMultiplier MatrixMultiplier::scalar(const std::vector<std::complex<double>>& poly,
                                          int dim_e) {
    if (poly.empty()) throw std::invalid_argument("scalar multiplier needs coefficients");
    MatrixMultiplier phi;
    phi.coefficients.reserve(poly.size());
    for (const std::complex<double> c : poly) {
        phi.coefficients.push_back(c * ComplexMatrix::Identity(dim_e, dim_e));
    }
    return phi;
}

ComplexVector apply_matrix_multiplier(const KernelModel& model, const MatrixMultiplier& phi,
                                      const ComplexVector& f) {
    if (phi.dim_e() != model.dim_e()) {
        throw std::invalid_argument("multiplier dimension does not match the kernel's E");
    }
    const ComplexMatrix power = model.to_power(f);
    int deg_f = 0;
    for (int n = 0; n < power.cols(); ++n) {
        if (power.col(n).squaredNorm() > 0.0) deg_f = n;
    }
    if (phi.degree() + deg_f > model.horizon()) {
        std::ostringstream os;
        os << "degree overflow: deg Phi " << phi.degree() << " + deg f " << deg_f
           << " exceeds the horizon " << model.horizon();
        throw std::invalid_argument(os.str());
    }
    return model.from_power(convolve(phi, power));
}

ComplexMatrix multiplier_operator(const KernelModel& model, const MatrixMultiplier& phi) {
    if (phi.dim_e() != model.dim_e()) {
        throw std::invalid_argument("multiplier dimension does not match the kernel's E");
    }
    const int n = model.dimension();
    ComplexMatrix op(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexVector e = ComplexVector::Zero(n);
        e(j) = 1.0;
        op.col(j) = model.from_power(convolve(phi, model.to_power(e)));
    }
    return op;
}

double commutation_defect(const KernelModel& model, const MatrixMultiplier& phi) {
    const ComplexMatrix m_phi = multiplier_operator(model, phi);
    const ComplexMatrix s = model.shift().matrix().cast<std::complex<double>>();
    const ComplexMatrix c = m_phi * s - s * m_phi;
    const int cols = prefix_size(model.tree(), model.horizon() - 1 - phi.degree());
    if (cols == 0) return 0.0;
    return operator_norm(ComplexMatrix(c.leftCols(cols)));
}

AbelianIrreducibilityReport abelian_and_irreducibility_test(const KernelModel& model) {
    AbelianIrreducibilityReport out;
    out.report = commutant_basis(model.shift().matrix());
    out.matches_dim_e = out.report.abelian == (model.dim_e() == 1);
    if (model.dim_e() >= 2) {
        const int d = model.dim_e();
        ComplexMatrix c1 = ComplexMatrix::Zero(d, d);
        c1(0, 0) = 1.0;  // rank-one projection onto the first frame vector
        ComplexMatrix c2 = ComplexMatrix::Zero(d, d);
        c2(0, 1) = 1.0;
        c2(1, 0) = 1.0;
        const ComplexMatrix m1 = multiplier_operator(model, MatrixMultiplier::constant(c1));
        const ComplexMatrix m2 = multiplier_operator(model, MatrixMultiplier::constant(c2));
        out.witness_commutator = operator_norm(ComplexMatrix(m1 * m2 - m2 * m1));
        out.projection_idempotency = operator_norm(ComplexMatrix(m1 * m1 - m1));
        out.projection_commutation = commutation_defect(model, MatrixMultiplier::constant(c1));
        out.projection_orthogonality = operator_norm(ComplexMatrix(m1.adjoint() - m1));
    }
    return out;
}

MultiplierRecovery multiplier_recovery(const KernelModel& model, const ComplexMatrix& t,
                                       const std::vector<std::complex<double>>& grid,
                                       int fit_degree) {
    const int n = model.dimension();
    if (t.rows() != n || t.cols() != n) {
        throw std::invalid_argument("operator dimension does not match the truncation");
    }
    const int d_fit = fit_degree < 0 ? model.horizon() / 2 : fit_degree;
    if (static_cast<int>(grid.size()) < d_fit + 1) {
        throw std::invalid_argument("grid smaller than the number of fit coefficients");
    }
    MultiplierRecovery out;

    const ComplexMatrix s = model.shift().matrix().cast<std::complex<double>>();
    const ComplexMatrix commutator = s * t - t * s;
    const int cols = prefix_size(model.tree(), model.horizon() - 1 - d_fit);
    out.precondition_defect =
        cols == 0 ? 0.0 : operator_norm(ComplexMatrix(commutator.leftCols(cols)));
    if (!(out.precondition_defect <= kCommutationTol)) {
        std::ostringstream os;
        os << "operator does not commute with the shift on the compatible sub-block: defect "
           << out.precondition_defect;
        throw std::invalid_argument(os.str());
    }

    const int d = model.dim_e();
    const double t_norm = operator_norm(t);
    double max_cond = 0.0;
    std::vector<std::complex<double>> used_points;
    std::vector<ComplexMatrix> values;
    for (const std::complex<double> w : grid) {
        ComplexMatrix sections(n, d);
        for (int i = 0; i < d; ++i) {
            ComplexVector g = ComplexVector::Zero(d);
            g(i) = 1.0;
            sections.col(i) = model.section_series(w, g);
        }
        Eigen::BDCSVD<ComplexMatrix> svd(sections, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector& sigma = svd.singularValues();
        if (!(sigma(sigma.size() - 1) > 1e-8 * sigma(0))) {
            out.skipped_points.push_back(w);
            continue;
        }
        // T* kappa(.,w)g_i = sum_j X(j,i) kappa(.,w)g_j with X = [Phi(w)*].
        const ComplexMatrix x = svd.solve(ComplexMatrix(t.adjoint() * sections));
        const ComplexMatrix phi_w = x.adjoint();
        used_points.push_back(w);
        values.push_back(phi_w);
        out.sup_phi = std::max(out.sup_phi, operator_norm(phi_w));
        const ComplexMatrix kappa = model.eval(w, w);
        const EigRange eig = hermitian_eig_range(kappa);
        max_cond = std::max(max_cond, eig.max / eig.min);
        out.chain_ratio =
            std::max(out.chain_ratio, operator_norm(ComplexMatrix(phi_w * kappa)) / eig.max);
    }
    if (static_cast<int>(used_points.size()) < d_fit + 1) {
        throw std::invalid_argument("too many grid points skipped for the requested fit degree");
    }
    out.norm_bound = t_norm * max_cond;
    out.norm_bound_holds = out.sup_phi <= out.norm_bound + 1e-8;
    out.chain_holds = out.chain_ratio <= t_norm + 1e-8;

    // Polynomial fit in the radius-scaled variable (well conditioned on
    // single-radius grids, where scaled monomials are orthogonal).
    double r_max = 0.0;
    for (const std::complex<double> w : used_points) r_max = std::max(r_max, std::abs(w));
    if (!(r_max > 0.0)) throw std::invalid_argument("recovery grid must contain nonzero points");
    const int n_pts = static_cast<int>(used_points.size());
    ComplexMatrix vandermonde(n_pts, d_fit + 1);
    for (int i = 0; i < n_pts; ++i) {
        std::complex<double> p{1.0, 0.0};
        for (int k = 0; k <= d_fit; ++k) {
            vandermonde(i, k) = p;
            p *= used_points[static_cast<std::size_t>(i)] / r_max;
        }
    }
    ComplexMatrix rhs(n_pts, d * d);
    for (int i = 0; i < n_pts; ++i) {
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) {
                rhs(i, r * d + c) = values[static_cast<std::size_t>(i)](r, c);
            }
        }
    }
    const ComplexMatrix coeff = vandermonde.colPivHouseholderQr().solve(rhs);
    out.fit_residual = (vandermonde * coeff - rhs).cwiseAbs().maxCoeff();
    out.multiplier.coefficients.assign(static_cast<std::size_t>(d_fit + 1),
                                       ComplexMatrix::Zero(d, d));
    double scale = 1.0;
    for (int k = 0; k <= d_fit; ++k) {
        ComplexMatrix& ck = out.multiplier.coefficients[static_cast<std::size_t>(k)];
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) ck(r, c) = coeff(k, r * d + c) / scale;
        }
        scale *= r_max;
    }
    return out;
}

double reproduction_defect(const KernelModel& model, const MultiplierRecovery& recovery,
                           const ComplexMatrix& t) {
    const int block =
        prefix_size(model.tree(), model.horizon() - 1 - recovery.multiplier.degree());
    if (block == 0) return 0.0;
    const ComplexMatrix m_rec = multiplier_operator(model, recovery.multiplier);
    return operator_norm(ComplexMatrix((m_rec - t).topLeftCorner(block, block)));
}

}  // namespace treeshift
