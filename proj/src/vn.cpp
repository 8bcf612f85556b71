#include "treeshift/vn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace treeshift {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Uniform double in [0, 1) from the top 53 bits; bit-exact across platforms.
double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double binomial_coeff(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c *= static_cast<double>(n - k + j) / static_cast<double>(j);
    return c;
}

// sum over multi-indices alpha of length d with |alpha| = j of
// (j!/alpha!) T^{*alpha} T^{alpha}, built recursively.
void accumulate_weighted_powers(const std::vector<ComplexMatrix>& tuple, int remaining,
                                std::size_t next, double multinomial,
                                const ComplexMatrix& t_alpha, ComplexMatrix& acc) {
    if (remaining == 0) {
        acc += multinomial * (t_alpha.adjoint() * t_alpha);
        return;
    }
    if (next == tuple.size()) return;
    ComplexMatrix current = t_alpha;
    double factor = multinomial;
    for (int count = 0; count <= remaining; ++count) {
        if (next + 1 < tuple.size() || remaining - count == 0) {
            accumulate_weighted_powers(tuple, remaining - count, next + 1, factor, current, acc);
        }
        if (count == remaining) break;
        current = tuple[next] * current;
        factor = factor / static_cast<double>(count + 1);
    }
}

ComplexVector cesaro_mean(const ComplexVector& phi, int n) {
    const int len = std::min<int>(n + 1, static_cast<int>(phi.size()));
    ComplexVector sigma(len);
    for (int k = 0; k < len; ++k) {
        sigma(k) = phi(k) * (1.0 - static_cast<double>(k) / static_cast<double>(n + 1));
    }
    return sigma;
}

std::complex<double> poly_value(const ComplexVector& coeff, std::complex<double> z) {
    std::complex<double> v{0.0, 0.0};
    for (Eigen::Index k = coeff.size(); k-- > 0;) v = v * z + coeff(k);
    return v;
}

}  // namespace

std::complex<double> PolynomialSample::value(std::complex<double> z) const {
    return poly_value(coefficients, z);
}

ComplexMatrix PolynomialSample::apply(const Matrix& s) const {
    const Eigen::Index n = s.rows();
    const ComplexMatrix sc = s.cast<std::complex<double>>();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = coefficients.size(); k-- > 0;) {
        out = out * sc;
        out += coefficients(k) * ComplexMatrix::Identity(n, n);
    }
    return out;
}

std::vector<PolynomialSample> sample_polynomials(std::uint64_t seed, int count, int max_degree) {
    if (count < 0 || max_degree < 0) {
        throw std::invalid_argument("sample_polynomials needs count, max_degree >= 0");
    }
    std::mt19937_64 rng(seed);
    std::vector<PolynomialSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int degree =
            std::min(max_degree, static_cast<int>(uniform_unit(rng) * (max_degree + 1)));
        PolynomialSample p;
        p.seed = seed;
        p.coefficients = ComplexVector(degree + 1);
        for (int k = 0; k <= degree; ++k) {
            const double radius = std::sqrt(uniform_unit(rng));
            const double angle = kTwoPi * uniform_unit(rng);
            p.coefficients(k) = std::polar(radius, angle);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::complex<double>> boundary_grid(Domain, int grid_size) {
    if (grid_size < 64) throw std::invalid_argument("boundary grid needs at least 64 points");
    std::vector<std::complex<double>> grid;
    grid.reserve(static_cast<std::size_t>(grid_size));
    for (int j = 0; j < grid_size; ++j) {
        grid.push_back(std::polar(1.0, kTwoPi * static_cast<double>(j) / grid_size));
    }
    return grid;
}

SupNormEstimate sup_norm_estimate(const PolynomialSample& p, Domain domain, int grid_size) {
    SupNormEstimate est;
    est.grid_size = grid_size;
    for (const std::complex<double> z : boundary_grid(domain, grid_size)) {
        est.value = std::max(est.value, std::abs(p.value(z)));
    }
    // |p| is Lipschitz on the circle with constant sum k |c_k|; the grid gap
    // in arc length is pi / grid_size on either side of the maximizer.
    double lipschitz = 0.0;
    for (int k = 1; k <= p.degree(); ++k) lipschitz += k * std::abs(p.coefficients(k));
    est.error_bar = lipschitz * kTwoPi / (2.0 * grid_size);
    return est;
}

double vn_defect(const TruncatedShift& shift, const PolynomialSample& p, int grid_size) {
    const double op = operator_norm(p.apply(shift.matrix()));
    return op - sup_norm_estimate(p, Domain::disc, grid_size).value;
}

MatrixVnReport matrix_vn_defect(const TruncatedShift& shift, const MatrixMultiplier& p,
                                int grid_size) {
    const int m = p.dim_e();
    if (m > 4) throw std::invalid_argument("matrix von Neumann probe limited to m <= 4");
    MatrixVnReport report;
    const ComplexMatrix s = shift.matrix().cast<std::complex<double>>();
    const Eigen::Index n = s.rows();
    ComplexMatrix op = ComplexMatrix::Zero(m * n, m * n);
    ComplexMatrix s_power = ComplexMatrix::Identity(n, n);
    for (std::size_t k = 0; k < p.coefficients.size(); ++k) {
        op += kroneckerProduct(p.coefficients[k], s_power).eval();
        if (k + 1 < p.coefficients.size()) s_power = s_power * s;
    }
    report.operator_value = operator_norm(op);
    double max_entry_sup = 0.0;
    for (const std::complex<double> z : boundary_grid(Domain::disc, grid_size)) {
        const ComplexMatrix value = p.value(z);
        report.sup_value = std::max(report.sup_value, operator_norm(value));
        max_entry_sup = std::max(max_entry_sup, value.cwiseAbs().maxCoeff());
    }
    report.defect = report.operator_value - report.sup_value;
    report.inflation_bound = m * max_entry_sup;
    report.inflation_sane = report.sup_value <= report.inflation_bound + 1e-12;
    return report;
}

double ball_positivity_defect(const std::vector<ComplexMatrix>& tuple, int k) {
    const int d = static_cast<int>(tuple.size());
    if (d < 1 || d > 4) throw std::invalid_argument("tuple arity must be 1..4");
    if (k < 1 || k > 8) throw std::invalid_argument("positivity order must be 1..8");
    const Eigen::Index n = tuple.front().rows();
    for (const ComplexMatrix& t : tuple) {
        if (t.rows() != n || t.cols() != n) {
            throw std::invalid_argument("tuple matrices must share one square size");
        }
    }
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        for (std::size_t j = i + 1; j < tuple.size(); ++j) {
            const double defect =
                operator_norm(ComplexMatrix(tuple[i] * tuple[j] - tuple[j] * tuple[i]));
            if (!(defect <= 1e-10)) {
                std::ostringstream os;
                os << "tuple entries " << i << " and " << j
                   << " do not commute: defect " << defect;
                throw std::invalid_argument(os.str());
            }
        }
    }
    ComplexMatrix form = ComplexMatrix::Zero(n, n);
    double j_factorial = 1.0;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) j_factorial *= static_cast<double>(j);
        ComplexMatrix level = ComplexMatrix::Zero(n, n);
        // weight j!/alpha! per multi-index: seed the recursion with j!.
        accumulate_weighted_powers(tuple, j, 0, j_factorial, ComplexMatrix::Identity(n, n),
                                   level);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        form += sign * binomial_coeff(k, j) * level;
    }
    return hermitian_eig_range(form).min;
}

ApproximantSequence fejer_approximants(const ComplexVector& phi, int n_max, int grid_size) {
    if (phi.size() == 0) throw std::invalid_argument("approximant target must be nonempty");
    ApproximantSequence seq;
    seq.target = phi;
    seq.bound_constant = 1.0;
    const auto grid = boundary_grid(Domain::disc, grid_size);
    for (const std::complex<double> z : grid) {
        seq.sup_phi_grid = std::max(seq.sup_phi_grid, std::abs(poly_value(phi, z)));
    }
    seq.sigma.reserve(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        seq.sigma.push_back(cesaro_mean(phi, n));
        for (const std::complex<double> z : grid) {
            seq.max_sigma_sup =
                std::max(seq.max_sigma_sup, std::abs(poly_value(seq.sigma.back(), z)));
        }
    }
    for (const std::complex<double> z : grid) {
        const std::complex<double> w = 0.95 * z;
        seq.final_gap = std::max(
            seq.final_gap, std::abs(poly_value(seq.sigma.back(), w) - poly_value(phi, w)));
    }
    return seq;
}

EigenlineRecovery eigenline_multiplier_recovery(const KernelModel& model, const ComplexMatrix& a,
                                                const std::vector<std::complex<double>>& grid,
                                                int fit_degree) {
    const int n = model.dimension();
    if (a.rows() != n || a.cols() != n) {
        throw std::invalid_argument("operator dimension does not match the truncation");
    }
    const int d_fit = fit_degree < 0 ? model.horizon() / 2 : fit_degree;
    if (static_cast<int>(grid.size()) < d_fit + 1) {
        throw std::invalid_argument("grid smaller than the number of fit coefficients");
    }
    EigenlineRecovery out;
    out.a_norm = operator_norm(a);
    const int d = model.dim_e();
    const ComplexMatrix a_star = a.adjoint();
    std::vector<std::complex<double>> phi_values;
    phi_values.reserve(grid.size());
    for (const std::complex<double> w : grid) {
        std::complex<double> phi_mean{0.0, 0.0};
        std::vector<std::complex<double>> per_g(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            ComplexVector g = ComplexVector::Zero(d);
            g(i) = 1.0;
            const ComplexVector section = model.section_series(w, g);
            const ComplexVector image = a_star * section;
            const std::complex<double> lambda = section.dot(image) / section.squaredNorm();
            const double distance =
                image.norm() > 0.0 ? (image - lambda * section).norm() / image.norm() : 0.0;
            out.line_distance = std::max(out.line_distance, distance);
            per_g[static_cast<std::size_t>(i)] = std::conj(lambda);
            phi_mean += std::conj(lambda) / static_cast<double>(d);
        }
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                out.g_independence =
                    std::max(out.g_independence,
                             std::abs(per_g[static_cast<std::size_t>(i)] -
                                      per_g[static_cast<std::size_t>(j)]));
            }
        }
        phi_values.push_back(phi_mean);
        out.sup_phi = std::max(out.sup_phi, std::abs(phi_mean));
    }
    out.line_preserved = out.line_distance <= 1e-6;
    out.norm_bound_holds = out.sup_phi <= out.a_norm + 1e-9;

    // Scaled-monomial polynomial fit of the extracted values.
    double r_max = 0.0;
    for (const std::complex<double> w : grid) r_max = std::max(r_max, std::abs(w));
    if (!(r_max > 0.0)) throw std::invalid_argument("recovery grid must contain nonzero points");
    const int n_pts = static_cast<int>(grid.size());
    ComplexMatrix vandermonde(n_pts, d_fit + 1);
    ComplexVector rhs(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        std::complex<double> p{1.0, 0.0};
        for (int k = 0; k <= d_fit; ++k) {
            vandermonde(i, k) = p;
            p *= grid[static_cast<std::size_t>(i)] / r_max;
        }
        rhs(i) = phi_values[static_cast<std::size_t>(i)];
    }
    ComplexVector coeff = vandermonde.colPivHouseholderQr().solve(rhs);
    out.fit_residual = (vandermonde * coeff - rhs).cwiseAbs().maxCoeff();
    out.phi_coefficients = ComplexVector(d_fit + 1);
    double scale = 1.0;
    for (int k = 0; k <= d_fit; ++k) {
        out.phi_coefficients(k) = coeff(k) / scale;
        scale *= r_max;
    }

    // Action identity (A f)(w) = phi(w) f(w) on deterministic probe functions.
    std::vector<ComplexVector> probes;
    {
        ComplexVector e0 = ComplexVector::Zero(n);
        e0(0) = 1.0;
        probes.push_back(std::move(e0));
        ComplexMatrix power = ComplexMatrix::Zero(d, model.horizon() + 1);
        for (int i = 0; i < d; ++i) {
            for (int c = 0; c <= model.horizon(); ++c) {
                power(i, c) = std::pow(0.5, c) * (i == 0 ? 1.0 : 0.7);
            }
        }
        ComplexVector f = model.from_power(power);
        probes.push_back(f / f.norm());
    }
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / 5);
    for (const ComplexVector& f : probes) {
        const ComplexVector af = a * f;
        for (std::size_t idx = 0; idx < grid.size(); idx += stride) {
            const std::complex<double> w = grid[idx];
            const ComplexVector lhs = model.value_at(af, w);
            const ComplexVector rhs_val =
                poly_value(out.phi_coefficients, w) * model.value_at(f, w);
            out.action_residual = std::max(out.action_residual, (lhs - rhs_val).norm());
        }
    }
    return out;
}

WotProbe wot_convergence_probe(const KernelModel& model, const ComplexVector& phi_coefficients,
                               const ComplexVector& f, const ComplexVector& h, int n_max,
                               int grid_size) {
    if (f.size() != model.dimension() || h.size() != model.dimension()) {
        throw std::invalid_argument("probe vectors must match the truncation dimension");
    }
    WotProbe probe;
    const int len = static_cast<int>(phi_coefficients.size());
    // S^k f, k = 0 .. len-1 (vanishes beyond the horizon).
    std::vector<ComplexVector> powers;
    powers.reserve(static_cast<std::size_t>(len));
    ComplexVector v = f;
    for (int k = 0; k < len; ++k) {
        powers.push_back(v);
        if (k + 1 < len) v = model.shift().apply(v);
    }
    ComplexVector m_phi_f = ComplexVector::Zero(f.size());
    for (int k = 0; k < len; ++k) m_phi_f += phi_coefficients(k) * powers[static_cast<std::size_t>(k)];

    const Matrix s = model.shift().matrix();
    for (const std::complex<double> z : boundary_grid(Domain::disc, grid_size)) {
        probe.bound_reference =
            std::max(probe.bound_reference, std::abs(poly_value(phi_coefficients, z)));
    }
    probe.residuals.reserve(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        const ComplexVector sigma = cesaro_mean(phi_coefficients, n);
        ComplexVector sigma_f = ComplexVector::Zero(f.size());
        for (int k = 0; k < sigma.size(); ++k) {
            sigma_f += sigma(k) * powers[static_cast<std::size_t>(k)];
        }
        probe.residuals.push_back(std::abs(h.dot(sigma_f - m_phi_f)));
        PolynomialSample sample;
        sample.coefficients = sigma;
        probe.uniform_bound = std::max(probe.uniform_bound, operator_norm(sample.apply(s)));
    }
    probe.uniformly_bounded = probe.uniform_bound <= probe.bound_reference + 1e-9;
    return probe;
}

}  // namespace treeshift
