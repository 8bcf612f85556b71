#include "treeshift/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "treeshift/series.hpp"

namespace treeshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_disc(std::complex<double> z, std::complex<double> w) {
    if (!(std::abs(z) < 1.0) || !(std::abs(w) < 1.0)) {
        throw std::invalid_argument("kernel arguments must lie in the open unit disc");
    }
}

double factorial_d(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

ComplexVector KernelModel::section_series(std::complex<double> w, const ComplexVector& g) const {
    return from_power(section_power(w, g));
}

ComplexVector KernelModel::section_basis(std::complex<double> w, const ComplexVector& g) const {
    const int n = dimension();
    ComplexVector out = ComplexVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        // <kappa(., w) g, phi_j>_H = <g, phi_j(w)>_E by the reproducing rule.
        const std::complex<double> c = onb_value(j, w).dot(g);
        if (c == std::complex<double>(0.0, 0.0)) continue;
        out += c * onb_tree_column(j).cast<std::complex<double>>();
    }
    return out;
}

ComplexVector KernelModel::value_at(const ComplexVector& f, std::complex<double> w) const {
    ComplexVector val = ComplexVector::Zero(dim_e());
    for (int j = 0; j < dimension(); ++j) {
        const Vector column = onb_tree_column(j);
        const std::complex<double> coeff = column.cast<std::complex<double>>().dot(f);
        if (coeff == std::complex<double>(0.0, 0.0)) continue;
        val += coeff * onb_value(j, w);
    }
    return val;
}

Matrix KernelModel::identification() const {
    const int n = dimension();
    Matrix w(n, n);
    for (int j = 0; j < n; ++j) w.col(j) = onb_tree_column(j);
    return w;
}

// ---------------------------------------------------------------------------
// BergmanTreeKernel
// ---------------------------------------------------------------------------

BergmanTreeKernel::BergmanTreeKernel(const DirectedTree& tree, int a)
    : a_(a), shift_(TruncatedShift::build(tree, WeightSystem::bergman(tree, a))) {
    e_basis_ = adjoint_kernel_basis(shift_);
    // Strand roster mirrors the column order of adjoint_kernel_basis: the
    // root strand first, then the complement strands of each branching
    // vertex in BFS order.  Strand generations are therefore non-decreasing,
    // so the strands alive in generation n are exactly strands 0..card-1 and
    // strand i can own the i-th vertex slot of every generation it reaches.
    strand_generation_.push_back(0);
    strand_m_.push_back(-1);
    for (int v : tree.branching_vertices()) {
        const int extra = static_cast<int>(tree.children(v).size()) - 1;
        for (int j = 0; j < extra; ++j) {
            strand_generation_.push_back(tree.depth_of(v) + 1);
            strand_m_.push_back(tree.depth_of(v));
        }
    }
    const int n_vertices = tree.vertex_count();
    onb_strand_of_.assign(static_cast<std::size_t>(n_vertices), -1);
    onb_degree_of_.assign(static_cast<std::size_t>(n_vertices), -1);
    for (int g = 0; g <= tree.frontier_depth(); ++g) {
        const auto& gen = tree.generation(g);
        std::size_t alive = 0;
        while (alive < strand_generation_.size() && strand_generation_[alive] <= g) ++alive;
        if (alive != gen.size()) {
            throw std::logic_error("strand count does not match generation size");
        }
        for (std::size_t i = 0; i < gen.size(); ++i) {
            onb_strand_of_[static_cast<std::size_t>(gen[i])] = static_cast<int>(i);
            onb_degree_of_[static_cast<std::size_t>(gen[i])] = g - strand_generation_[i];
        }
    }
    moment_.resize(strand_generation_.size());
    for (std::size_t i = 0; i < strand_generation_.size(); ++i) {
        const int span = tree.frontier_depth() - strand_generation_[i];
        for (int n = 0; n <= span; ++n) {
            moment_[i].push_back(moment_norm_square(strand_generation_[i], a_, n));
        }
    }
}

std::string BergmanTreeKernel::name() const {
    return "bergman_tree(a=" + std::to_string(a_) + ")";
}

double BergmanTreeKernel::diagonal_series(int i, double u) const {
    const std::complex<double> cu(u, 0.0);
    const int m = strand_m_[static_cast<std::size_t>(i)];
    if (m < 0) return 1.0 + root_series(cu, a_).real();
    return 1.0 + branch_series(cu, m, a_).real();
}

double BergmanTreeKernel::strand_moment(int i, int n) const {
    return moment_norm_square(strand_generation_[static_cast<std::size_t>(i)], a_, n);
}

int BergmanTreeKernel::m0() const {
    int m = 0;
    for (std::size_t i = 1; i < strand_m_.size(); ++i) m = std::max(m, strand_m_[i]);
    return m;
}

ComplexMatrix BergmanTreeKernel::eval(std::complex<double> z, std::complex<double> w) const {
    require_disc(z, w);
    const std::complex<double> u = z * std::conj(w);
    ComplexMatrix k = ComplexMatrix::Zero(dim_e(), dim_e());
    for (int i = 0; i < dim_e(); ++i) {
        const int m = strand_m_[static_cast<std::size_t>(i)];
        k(i, i) = 1.0 + (m < 0 ? root_series(u, a_) : branch_series(u, m, a_));
    }
    return k;
}

ComplexMatrix BergmanTreeKernel::eval_partial(std::complex<double> z, std::complex<double> w,
                                              int terms) const {
    require_disc(z, w);
    const std::complex<double> u = z * std::conj(w);
    ComplexMatrix k = ComplexMatrix::Zero(dim_e(), dim_e());
    for (int i = 0; i < dim_e(); ++i) {
        const int m = strand_m_[static_cast<std::size_t>(i)];
        std::complex<double> sum{0.0, 0.0};
        std::complex<double> up{1.0, 0.0};
        for (int n = 0; n < terms; ++n) {
            const double c = (m < 0) ? binomial_series_coefficient(n, a_)
                                     : branch_series_coefficient(m, n, a_);
            sum += c * up;
            up *= u;
        }
        k(i, i) = sum;
    }
    return k;
}

Vector BergmanTreeKernel::onb_tree_column(int j) const {
    const int i = onb_strand_of_[static_cast<std::size_t>(j)];
    const int n = onb_degree_of_[static_cast<std::size_t>(j)];
    Vector v = e_basis_.col(i);
    for (int k = 0; k < n; ++k) v = shift_.apply(v);
    const double norm = v.norm();
    return v / norm;
}

ComplexVector BergmanTreeKernel::onb_value(int j, std::complex<double> w) const {
    const int i = onb_strand_of_[static_cast<std::size_t>(j)];
    const int n = onb_degree_of_[static_cast<std::size_t>(j)];
    ComplexVector val = ComplexVector::Zero(dim_e());
    val(i) = std::pow(w, n) / std::sqrt(moment_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]);
    return val;
}

ComplexMatrix BergmanTreeKernel::section_power(std::complex<double> w,
                                               const ComplexVector& g) const {
    if (g.size() != dim_e()) throw std::invalid_argument("E vector dimension mismatch");
    const int n_max = horizon();
    ComplexMatrix power = ComplexMatrix::Zero(dim_e(), n_max + 1);
    const std::complex<double> wbar = std::conj(w);
    std::complex<double> wp{1.0, 0.0};
    for (int n = 0; n <= n_max; ++n) {
        for (int i = 0; i < dim_e(); ++i) {
            const int m = strand_m_[static_cast<std::size_t>(i)];
            const double c = (m < 0) ? binomial_series_coefficient(n, a_)
                                     : branch_series_coefficient(m, n, a_);
            power(i, n) = c * wp * g(i);
        }
        wp *= wbar;
    }
    return power;
}

ComplexVector BergmanTreeKernel::from_power(const ComplexMatrix& power) const {
    if (power.rows() != dim_e()) throw std::invalid_argument("power matrix has wrong E dimension");
    ComplexVector f = ComplexVector::Zero(dimension());
    for (int i = 0; i < dim_e(); ++i) {
        const int span = horizon() - strand_generation_[static_cast<std::size_t>(i)];
        ComplexVector v = e_basis_.col(i).cast<std::complex<double>>();
        for (int n = 0; n <= span; ++n) {
            if (n < power.cols()) f += power(i, n) * v;
            if (n < span) v = shift_.apply(v);
        }
    }
    return f;
}

ComplexMatrix BergmanTreeKernel::to_power(const ComplexVector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    ComplexMatrix power = ComplexMatrix::Zero(dim_e(), horizon() + 1);
    for (int i = 0; i < dim_e(); ++i) {
        const int span = horizon() - strand_generation_[static_cast<std::size_t>(i)];
        ComplexVector v = e_basis_.col(i).cast<std::complex<double>>();
        for (int n = 0; n <= span; ++n) {
            // z^n g_i corresponds to S^n g_i; the family is orthogonal, so the
            // coefficient is <f, S^n g_i> / ||S^n g_i||^2.
            power(i, n) = v.dot(f) / v.squaredNorm();
            if (n < span) v = shift_.apply(v);
        }
    }
    return power;
}

double BergmanTreeKernel::section_tail_bound(double r) const {
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    const double u = r * r;
    double worst = 0.0;
    for (int i = 0; i < dim_e(); ++i) {
        const int span = horizon() - strand_generation_[static_cast<std::size_t>(i)];
        const int m = strand_m_[static_cast<std::size_t>(i)];
        double partial = 0.0;
        double up = 1.0;
        for (int n = 0; n <= span; ++n) {
            const double c = (m < 0) ? binomial_series_coefficient(n, a_)
                                     : branch_series_coefficient(m, n, a_);
            partial += c * up;
            up *= u;
        }
        const double total = diagonal_series(i, u);
        const double tail = std::max(0.0, total - partial);
        worst = std::max(worst, tail / total);
    }
    return std::sqrt(worst);
}

double BergmanTreeKernel::condition_bound(double) const {
    if (dim_e() == 1) return 1.0;
    return 1.0 + factorial_d(m0() + a_);
}

// ---------------------------------------------------------------------------
// TridiagonalKernel
// ---------------------------------------------------------------------------

TridiagonalKernel::TridiagonalKernel(const DirectedTree& tree, double s, double t)
    : s_(s), t_(t), shift_(TruncatedShift::build(tree, WeightSystem::two_parameter(tree, s, t))) {
    if (tree.frontier_depth() < 3) {
        throw std::invalid_argument("tridiagonal kernel needs horizon depth >= 3");
    }
    e_basis_ = Matrix::Zero(tree.vertex_count(), 2);
    e_basis_(tree.root(), 0) = 1.0;
    const auto& gen1 = tree.generation(1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    e_basis_(gen1[0], 1) = inv_sqrt2;
    e_basis_(gen1[1], 1) = -inv_sqrt2;
}

std::string TridiagonalKernel::name() const {
    std::ostringstream os;
    os << "tridiagonal(s=" << s_ << ",t=" << t_ << ")";
    return os.str();
}

double TridiagonalKernel::alpha(int k) const {
    switch (k) {
        case 0: return (1.0 - 1.0 / (t_ * t_)) / (4.0 * s_ * s_);
        case 1: return 1.0 / (2.0 * s_ * s_);
        case 2: return (1.0 + 1.0 / (t_ * t_)) / (4.0 * s_ * s_);
        default:
            if (k < 0) throw std::invalid_argument("alpha index must be non-negative");
            return 1.0 / (2.0 * s_ * s_ * t_ * t_);
    }
}

double TridiagonalKernel::coefficient_a(int k) const {
    if (k < 0) throw std::invalid_argument("coefficient index must be non-negative");
    return k <= 1 ? 1.0 : 1.0 / t_;
}

double TridiagonalKernel::coefficient_b(int k) const {
    if (k < 0) throw std::invalid_argument("coefficient index must be non-negative");
    return k == 0 ? 1.0 : 1.0 / t_;
}

double TridiagonalKernel::k1(double r) const {
    const double u = r * r;
    const double tail = u * u * u / ((1.0 - u) * 2.0 * s_ * s_ * t_ * t_);
    return 1.0 + alpha(1) * u + alpha(2) * u * u + tail;
}

double TridiagonalKernel::k2(double r) const {
    const double u = r * r;
    const double tail = u * u / ((1.0 - u) * 2.0 * s_ * s_ * t_ * t_);
    return 1.0 + 2.0 * s_ * s_ * (alpha(2) * u + tail);
}

EigRange TridiagonalKernel::closed_form_eigenvalues(double r) const {
    const double x1 = k1(r);
    const double x2 = k2(r);
    const double a = alpha(0) * s_ * std::sqrt(2.0);
    const double disc = std::sqrt((x1 - x2) * (x1 - x2) + 4.0 * a * a * std::pow(r, 6));
    return {0.5 * (x1 + x2 - disc), 0.5 * (x1 + x2 + disc)};
}

ComplexMatrix TridiagonalKernel::eval(std::complex<double> z, std::complex<double> w) const {
    require_disc(z, w);
    const std::complex<double> u = z * std::conj(w);
    const double c_tail = 1.0 / (2.0 * s_ * s_ * t_ * t_);
    // S1(u) = sum_{k>=1} alpha_k u^k, S2(u) = sum_{k>=1} alpha_{k+1} u^k;
    // the constant alpha tail sums to a geometric closed form.
    const std::complex<double> s1 =
        alpha(1) * u + alpha(2) * u * u + c_tail * u * u * u / (1.0 - u);
    const std::complex<double> s2 = alpha(2) * u + c_tail * u * u / (1.0 - u);
    const double coupling = alpha(0) * s_ * std::sqrt(2.0);
    ComplexMatrix k(2, 2);
    k(0, 0) = 1.0 + s1;
    k(1, 1) = 1.0 + 2.0 * s_ * s_ * s2;
    k(0, 1) = coupling * z * z * std::conj(w);
    k(1, 0) = coupling * z * std::conj(w) * std::conj(w);
    return k;
}

ComplexMatrix TridiagonalKernel::eval_partial(std::complex<double> z, std::complex<double> w,
                                              int terms) const {
    require_disc(z, w);
    const std::complex<double> u = z * std::conj(w);
    const double coupling = alpha(0) * s_ * std::sqrt(2.0);
    ComplexMatrix k = ComplexMatrix::Identity(2, 2);
    k(0, 1) = coupling * z * z * std::conj(w);
    k(1, 0) = coupling * z * std::conj(w) * std::conj(w);
    std::complex<double> up = u;
    for (int j = 1; j <= terms; ++j) {
        k(0, 0) += alpha(j) * up;
        k(1, 1) += 2.0 * s_ * s_ * alpha(j + 1) * up;
        up *= u;
    }
    return k;
}

Vector TridiagonalKernel::onb_tree_column(int j) const {
    Vector v = Vector::Zero(dimension());
    v(j) = 1.0;
    return v;
}

ComplexVector TridiagonalKernel::onb_value(int j, std::complex<double> w) const {
    ComplexVector val = ComplexVector::Zero(2);
    if (j == tree().root()) {
        val(0) = 1.0;
        return val;
    }
    const int level = tree().depth_of(j);
    const int branch = (j == tree().generation(level)[0]) ? 1 : 2;
    const int k = level - 1;
    const double scale = (branch == 1) ? coefficient_a(k) : coefficient_b(k);
    const std::complex<double> wk = std::pow(w, k) * scale;
    const double sign = (branch == 1) ? 1.0 : -1.0;
    val(0) = wk * w / (2.0 * s_);
    val(1) = sign * wk / std::sqrt(2.0);
    return val;
}

ComplexMatrix TridiagonalKernel::section_power(std::complex<double> w,
                                               const ComplexVector& g) const {
    if (g.size() != 2) throw std::invalid_argument("E vector dimension mismatch");
    const int n_max = horizon();
    const std::complex<double> wbar = std::conj(w);
    const double coupling = alpha(0) * s_ * std::sqrt(2.0);
    ComplexMatrix power = ComplexMatrix::Zero(2, n_max + 1);
    power.col(0) = g;
    std::complex<double> wp = wbar;  // conj(w)^k
    for (int k = 1; k <= n_max; ++k) {
        power(0, k) += alpha(k) * wp * g(0);
        power(1, k) += 2.0 * s_ * s_ * alpha(k + 1) * wp * g(1);
        wp *= wbar;
    }
    if (n_max >= 1) power(1, 1) += coupling * wbar * wbar * g(0);
    if (n_max >= 2) power(0, 2) += coupling * wbar * g(1);
    return power;
}

ComplexVector TridiagonalKernel::from_power(const ComplexMatrix& power) const {
    if (power.rows() != 2) throw std::invalid_argument("power matrix has wrong E dimension");
    const int n_max = horizon();
    ComplexVector f = ComplexVector::Zero(dimension());
    f(tree().root()) = power(0, 0);
    const double sqrt2 = std::sqrt(2.0);
    for (int n = 0; n < n_max; ++n) {
        const std::complex<double> px = (n + 1 < power.cols()) ? power(0, n + 1)
                                                               : std::complex<double>(0.0, 0.0);
        const std::complex<double> py =
            (n < power.cols()) ? power(1, n) : std::complex<double>(0.0, 0.0);
        const std::complex<double> gamma = (2.0 * s_ * px + sqrt2 * py) / (2.0 * coefficient_a(n));
        const std::complex<double> delta = (2.0 * s_ * px - sqrt2 * py) / (2.0 * coefficient_b(n));
        const auto& gen = tree().generation(n + 1);
        f(gen[0]) = gamma;
        f(gen[1]) = delta;
    }
    return f;
}

ComplexMatrix TridiagonalKernel::to_power(const ComplexVector& f) const {
    if (f.size() != dimension()) throw std::invalid_argument("vector dimension mismatch");
    const int n_max = horizon();
    ComplexMatrix power = ComplexMatrix::Zero(2, n_max + 1);
    power(0, 0) = f(tree().root());
    const double sqrt2 = std::sqrt(2.0);
    for (int n = 0; n < n_max; ++n) {
        const auto& gen = tree().generation(n + 1);
        const std::complex<double> gamma = f(gen[0]);
        const std::complex<double> delta = f(gen[1]);
        power(0, n + 1) =
            (gamma * coefficient_a(n) + delta * coefficient_b(n)) / (2.0 * s_);
        power(1, n) = (gamma * coefficient_a(n) - delta * coefficient_b(n)) / sqrt2;
    }
    return power;
}

double TridiagonalKernel::section_tail_bound(double r) const {
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    const int n = horizon();
    // ONB coefficients lost beyond the horizon: strands u_k, v_k for k >= N,
    // where |u_k(w)|^2 = a_k^2 r^{2k} (r^2/(4 s^2) + 1/2) and likewise for b.
    const double per_term = (r * r / (4.0 * s_ * s_) + 0.5) / (t_ * t_);
    const double tail = 2.0 * per_term * std::pow(r, 2 * n) / (1.0 - r * r);
    const double floor = std::max(closed_form_eigenvalues(r).min, 1e-12);
    return std::sqrt(tail / floor);
}

double TridiagonalKernel::condition_bound(double r) const {
    const double x1 = k1(r);
    const double x2 = k2(r);
    const double abs_a = std::abs(alpha(0)) * s_ * std::sqrt(2.0);
    if (std::min(x1, x2) <= abs_a) return std::numeric_limits<double>::infinity();
    return std::max((x1 + abs_a) / (x2 - abs_a), (x2 + abs_a) / (x1 - abs_a));
}

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

ConditionData condition_ratio(const KernelModel& model, std::complex<double> w) {
    const double r = std::abs(w);
    if (!(r < 1.0)) throw std::invalid_argument("condition ratio needs |w| < 1");
    const ComplexMatrix k = model.eval(w, w);
    const EigRange eig = hermitian_eig_range(k);
    ConditionData out;
    out.mu_min = eig.min;
    out.mu_max = eig.max;
    out.ratio = eig.max / eig.min;
    out.bound = model.condition_bound(r);
    if (const auto* b = dynamic_cast<const BergmanTreeKernel*>(&model)) {
        out.closed_max = b->diagonal_series(0, r * r);
        out.closed_min = out.closed_max;
        for (int i = 1; i < b->dim_e(); ++i) {
            out.closed_min = std::min(out.closed_min, b->diagonal_series(i, r * r));
        }
    } else if (const auto* t = dynamic_cast<const TridiagonalKernel*>(&model)) {
        const EigRange closed = t->closed_form_eigenvalues(r);
        out.closed_min = closed.min;
        out.closed_max = closed.max;
    } else {
        out.closed_min = eig.min;
        out.closed_max = eig.max;
    }
    return out;
}

double gram_min_eigenvalue(const KernelModel& model,
                           const std::vector<std::complex<double>>& points,
                           const std::vector<ComplexVector>& vectors) {
    if (points.size() != vectors.size()) {
        throw std::invalid_argument("gram check needs one vector per point");
    }
    const int n = static_cast<int>(points.size());
    ComplexMatrix gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // <kappa(w_i, w_j) v_j, v_i>_E
            gram(i, j) = vectors[static_cast<std::size_t>(i)].dot(
                model.eval(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]) *
                vectors[static_cast<std::size_t>(j)]);
        }
    }
    return hermitian_eig_range(gram).min;
}

double reproducing_residual(const KernelModel& model, const ComplexVector& f,
                            std::complex<double> w, const ComplexVector& g) {
    const ComplexVector section = model.section_series(w, g);
    const std::complex<double> lhs = section.dot(f);  // <f, kappa(., w) g>_H
    const std::complex<double> rhs = g.dot(model.value_at(f, w));  // <f(w), g>_E
    return std::abs(lhs - rhs);
}

double eigenvector_residual(const KernelModel& model, std::complex<double> w,
                            const ComplexVector& g) {
    const ComplexVector v = model.section_series(w, g);
    const ComplexVector res = model.shift().apply_adjoint(v) - std::conj(w) * v;
    return res.norm() / v.norm();
}

EigenvectorStructure eigenvector_structure(const KernelModel& model, std::complex<double> w,
                                           double tail_budget) {
    EigenvectorStructure out;
    out.tail_bound = model.section_tail_bound(std::abs(w));
    if (!(out.tail_bound <= tail_budget)) {
        std::ostringstream os;
        os << "section tail bound " << out.tail_bound << " exceeds the budget " << tail_budget
           << " at |w| = " << std::abs(w);
        throw std::invalid_argument(os.str());
    }
    const int d = model.dim_e();
    ComplexMatrix sections(model.dimension(), d);
    for (int i = 0; i < d; ++i) {
        ComplexVector g = ComplexVector::Zero(d);
        g(i) = 1.0;
        sections.col(i) = model.section_series(w, g);
        out.max_relative_residual = std::max(out.max_relative_residual, eigenvector_residual(model, w, g));
    }
    const Nullspace ns = adjoint_eigenspace(model.shift(), w);
    out.null_dimension = ns.dimension;
    out.null_ambiguous = ns.ambiguous;
    if (ns.dimension == d) {
        out.principal_angle = largest_principal_angle(ns.basis, sections);
    } else {
        out.principal_angle = kPi / 2.0;
    }
    return out;
}

PolynomialBoundWitness polynomial_bound_witness(const KernelModel& model,
                                                const std::vector<double>& u_grid,
                                                int max_degree) {
    if (u_grid.empty()) throw std::invalid_argument("polynomial bound witness needs a grid");
    const int n = static_cast<int>(u_grid.size());
    Vector ratios(n);
    for (int i = 0; i < n; ++i) {
        const double u = u_grid[static_cast<std::size_t>(i)];
        if (u < 0.0 || u > 0.99) {
            throw std::invalid_argument("grid of |w|^2 values must lie in [0, 0.99]");
        }
        ratios(i) = condition_ratio(model, std::complex<double>(std::sqrt(u), 0.0)).ratio;
    }
    PolynomialBoundWitness best;
    best.sup_ratio = ratios.maxCoeff();
    double best_residual = std::numeric_limits<double>::infinity();
    for (int degree = 0; degree <= max_degree; ++degree) {
        Matrix vandermonde(n, degree + 1);
        for (int i = 0; i < n; ++i) {
            double up = 1.0;
            for (int d = 0; d <= degree; ++d) {
                vandermonde(i, d) = up;
                up *= u_grid[static_cast<std::size_t>(i)];
            }
        }
        const Vector coeff = vandermonde.colPivHouseholderQr().solve(ratios);
        const double residual = (vandermonde * coeff - ratios).cwiseAbs().maxCoeff();
        const bool fits = residual <= 0.05 * std::max(1.0, best.sup_ratio);
        if (residual < best_residual) {
            best_residual = residual;
            best.degree = degree;
            best.coefficients.assign(coeff.data(), coeff.data() + coeff.size());
            best.sup_residual = residual;
            best.fits = fits;
        }
        if (fits) {
            best.degree = degree;
            best.coefficients.assign(coeff.data(), coeff.data() + coeff.size());
            best.sup_residual = residual;
            best.fits = true;
            break;
        }
    }
    return best;
}

AssumptionCheck assumption_check(const KernelModel& model) {
    AssumptionCheck out;
    const int d = model.dim_e();
    const int n_max = model.horizon();
    // ||z^n g_i||^2 through the model's coordinate machinery.
    Matrix norms(d, n_max + 1);
    for (int i = 0; i < d; ++i) {
        for (int n = 0; n <= n_max; ++n) {
            ComplexMatrix power = ComplexMatrix::Zero(d, n_max + 1);
            power(i, n) = 1.0;
            norms(i, n) = model.from_power(power).squaredNorm();
        }
    }
    out.norm_ratio_sup = 1.0;
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            for (int n = 0; n <= n_max; ++n) {
                if (norms(j, n) <= 0.0 || norms(k, n) <= 0.0) continue;
                out.norm_ratio_sup = std::max(out.norm_ratio_sup, norms(k, n) / norms(j, n));
            }
        }
    }
    // Probe functions with geometric coefficient profiles.
    std::vector<ComplexVector> probes;
    for (int p = 0; p < 3; ++p) {
        const double base = 0.4 + 0.2 * p;
        ComplexMatrix power(d, n_max + 1);
        for (int i = 0; i < d; ++i) {
            for (int n = 0; n <= n_max; ++n) {
                power(i, n) = std::pow(base, n) * (1.0 + 0.5 * i) *
                              std::complex<double>(1.0, p == 1 ? 0.3 : 0.0);
            }
        }
        ComplexVector f = model.from_power(power);
        probes.push_back(f / f.norm());
    }
    out.functional_ratio = 0.0;
    for (const ComplexVector& f : probes) {
        const ComplexMatrix power = model.to_power(f);
        for (int jg = 0; jg < d; ++jg) {
            for (int jh = 0; jh < d; ++jh) {
                ComplexVector g = ComplexVector::Zero(d);
                g(jg) = 1.0;
                ComplexVector h = ComplexVector::Zero(d);
                h(jh) = 1.0;
                // f_{g,h}(w) = <f(w), g>_E h: scalar Taylor series times h.
                ComplexMatrix fgh = ComplexMatrix::Zero(d, power.cols());
                for (int n = 0; n < power.cols(); ++n) {
                    fgh.col(n) = g.dot(power.col(n)) * h;
                }
                const double ratio = model.from_power(fgh).norm() / f.norm();
                out.functional_ratio = std::max(out.functional_ratio, ratio);
            }
        }
    }
    out.holds = out.functional_ratio <= std::sqrt(out.norm_ratio_sup) + 1e-9;
    return out;
}

IdentificationCheck identification_check(const KernelModel& model) {
    IdentificationCheck out;
    const Matrix w = model.identification();
    const int n = model.dimension();
    out.unitarity_defect =
        operator_norm(Matrix(w.transpose() * w - Matrix::Identity(n, n)));
    // Multiplication by z realized through the model's coordinates.
    Matrix mz = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexVector e = ComplexVector::Zero(n);
        e(j) = 1.0;
        ComplexMatrix power = model.to_power(e);
        ComplexMatrix shifted = ComplexMatrix::Zero(power.rows(), power.cols());
        shifted.rightCols(power.cols() - 1) = power.leftCols(power.cols() - 1);
        mz.col(j) = model.from_power(shifted).real();
    }
    out.intertwining_defect = operator_norm(Matrix(model.shift().matrix() - mz));
    // z^n g_i reconstructed from power coordinates versus the same vector
    // obtained by applying the shift matrix n times to the frame vector.
    out.moment_defect = 0.0;
    const int d = model.dim_e();
    const Matrix e_basis = model.e_basis();
    for (int i = 0; i < d; ++i) {
        ComplexVector applied = e_basis.col(i).cast<std::complex<double>>();
        for (int deg = 0; deg <= model.horizon(); ++deg) {
            ComplexMatrix power = ComplexMatrix::Zero(d, model.horizon() + 1);
            power(i, deg) = 1.0;
            const ComplexVector recon = model.from_power(power);
            const double scale = std::max(1.0, applied.norm());
            const double defect = (recon - applied).norm() / scale;
            if (recon.norm() > 0.0) {
                out.moment_defect = std::max(out.moment_defect, defect);
            }
            applied = model.shift().apply(applied);
        }
    }
    return out;
}

}  // namespace treeshift
