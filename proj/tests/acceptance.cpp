// Acceptance gate: twelve end-to-end criteria, one pass/fail line each.
// Exit status 0 iff every criterion passes.  Tolerances are pinned here and
// intentionally duplicated from the library defaults so a silent tolerance
// change in the library cannot relax the gate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "treeshift/commutant.hpp"
#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"
#include "treeshift/series.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/suite.hpp"
#include "treeshift/sweeps.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vn.hpp"
#include "treeshift/weights.hpp"

using namespace treeshift;
using C = std::complex<double>;

namespace {

constexpr std::uint64_t kSeed = 20260819;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<C> circle_grid(double radius, int count) {
    std::vector<C> grid;
    for (int k = 0; k < count; ++k) {
        const double phi = 2.0 * M_PI * k / count;
        grid.emplace_back(radius * std::cos(phi), radius * std::sin(phi));
    }
    return grid;
}

std::vector<C> disc_points(std::uint64_t seed, int count, double max_radius) {
    std::mt19937_64 rng(seed);
    const auto unit = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
    std::vector<C> pts;
    for (int i = 0; i < count; ++i) {
        const double r = max_radius * std::sqrt(unit());
        const double phi = 2.0 * M_PI * unit();
        pts.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
    return pts;
}

std::vector<ComplexVector> unit_vectors(std::uint64_t seed, int count, int dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ComplexVector> out;
    for (int i = 0; i < count; ++i) {
        ComplexVector g(dim);
        for (int k = 0; k < dim; ++k) g(k) = C(gauss(rng), gauss(rng));
        out.push_back(g.normalized());
    }
    return out;
}

std::vector<MatrixMultiplier> sample_matrix_multipliers(std::uint64_t seed, int count, int dim,
                                                        int max_degree) {
    const auto entries = sample_polynomials(seed, count * dim * dim, max_degree);
    std::vector<MatrixMultiplier> out;
    for (int i = 0; i < count; ++i) {
        int length = 1;
        for (int e = 0; e < dim * dim; ++e) {
            length = std::max(length, static_cast<int>(
                                          entries[std::size_t(i * dim * dim + e)].coefficients.size()));
        }
        MatrixMultiplier phi;
        phi.coefficients.assign(std::size_t(length), ComplexMatrix::Zero(dim, dim));
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                const auto& p = entries[std::size_t(i * dim * dim + r * dim + c)];
                for (int k = 0; k < static_cast<int>(p.coefficients.size()); ++k) {
                    phi.coefficients[std::size_t(k)](r, c) = p.coefficients(k);
                }
            }
        }
        out.push_back(std::move(phi));
    }
    return out;
}

// ---- the twelve criteria ----

Verdict c01_kernel_closed_form() {
    const DirectedTree tree = DirectedTree::path(40);
    const BergmanTreeKernel model(tree, 2);
    double worst = 0.0;
    for (const C z : disc_points(kSeed ^ 0x11, 15, 0.9)) {
        for (const C w : disc_points(kSeed ^ 0x12, 15, 0.9)) {
            const C expected = std::pow(1.0 - z * std::conj(w), -2.0);
            worst = std::max(worst,
                             std::abs(model.eval(z, w)(0, 0) - expected) / std::abs(expected));
        }
    }
    return {worst <= 1e-9, "max rel gap to (1-z conj(w))^-2 = " + fmt(worst) + ", tol 1e-9"};
}

Verdict c02_moment_closed_form() {
    const DirectedTree tree = DirectedTree::two_ray(24);
    double worst = 0.0;
    for (int a : {2, 3, 4, 5}) {
        const TruncatedShift shift = TruncatedShift::build(tree, WeightSystem::bergman(tree, a));
        for (int v : {0, 1, 3, 5}) {
            const int d = tree.depth_of(v);
            for (int n = 0; d + n <= 20; ++n) {
                const double reference = moment_norm_square(d, a, n);
                worst = std::max(worst,
                                 std::abs(shift.power_norm_square(v, n) - reference) / reference);
            }
        }
    }
    return {worst <= 1e-10, "max rel moment gap over a=2..5 = " + fmt(worst) + ", tol 1e-10"};
}

Verdict c03_gram_positivity() {
    const DirectedTree tree = DirectedTree::two_ray(24);
    const BergmanTreeKernel bergman(tree, 2);
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    double worst = std::numeric_limits<double>::infinity();
    for (const KernelModel* model : {static_cast<const KernelModel*>(&bergman),
                                     static_cast<const KernelModel*>(&tri)}) {
        const auto pts = disc_points(kSeed ^ 0x31, 50, 0.8);
        const auto vecs = unit_vectors(kSeed ^ 0x32, 50, model->dim_e());
        worst = std::min(worst, gram_min_eigenvalue(*model, pts, vecs));
    }
    return {worst >= -1e-10, "min Gram eigenvalue over both families = " + fmt(worst) +
                                 ", tol -1e-10"};
}

Verdict c04_reproducing_identity() {
    const DirectedTree tree = DirectedTree::two_ray(24);
    const BergmanTreeKernel bergman(tree, 2);
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    double worst = 0.0;
    for (const KernelModel* model : {static_cast<const KernelModel*>(&bergman),
                                     static_cast<const KernelModel*>(&tri)}) {
        const auto pts = disc_points(kSeed ^ 0x41, 10, 0.7);
        const auto vecs = unit_vectors(kSeed ^ 0x42, 10, model->dim_e());
        for (int j = 0; j < model->dimension(); ++j) {
            if (model->tree().depth_of(j) > 20) break;
            const ComplexVector f = model->onb_tree_column(j).cast<C>();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                worst = std::max(worst, reproducing_residual(*model, f, pts[i], vecs[i]));
            }
        }
    }
    return {worst < 1e-8, "max reproducing residual = " + fmt(worst) + ", tol 1e-8"};
}

Verdict c05_condition_bounds() {
    const DirectedTree path = DirectedTree::path(24);
    const DirectedTree tree = DirectedTree::two_ray(24);
    const BergmanTreeKernel scalar(path, 2);
    const BergmanTreeKernel a2(tree, 2);
    const BergmanTreeKernel a3(tree, 3);
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    double worst_slack = -std::numeric_limits<double>::infinity();
    int finite_rows = 0;
    for (const KernelModel* model :
         {static_cast<const KernelModel*>(&scalar), static_cast<const KernelModel*>(&a2),
          static_cast<const KernelModel*>(&a3), static_cast<const KernelModel*>(&tri)}) {
        for (const double r : {0.3, 0.6, 0.9, 0.99}) {
            const ConditionData data = condition_ratio(*model, C(r, 0.0));
            if (!std::isfinite(data.bound)) continue;  // gated radii are reported, not asserted
            ++finite_rows;
            worst_slack = std::max(worst_slack, data.ratio - data.bound);
        }
    }
    const bool pass = finite_rows >= 13 && worst_slack <= 1e-9;
    return {pass, "max (ratio - bound) over " + std::to_string(finite_rows) +
                      " finite rows = " + fmt(worst_slack) + ", tol 1e-9"};
}

Verdict c06_eigenvector_sections() {
    const DirectedTree path = DirectedTree::path(60);
    const DirectedTree tree = DirectedTree::two_ray(60);
    const BergmanTreeKernel scalar(path, 2);
    const BergmanTreeKernel branched(tree, 2);
    double worst = 0.0;
    bool dims_ok = true;
    for (const KernelModel* model : {static_cast<const KernelModel*>(&scalar),
                                     static_cast<const KernelModel*>(&branched)}) {
        for (const C w : disc_points(kSeed ^ 0x61, 5, 0.5)) {
            const EigenvectorStructure st = eigenvector_structure(*model, w);
            worst = std::max(worst, std::max(st.max_relative_residual, st.principal_angle));
            dims_ok = dims_ok && st.null_dimension == model->dim_e() && !st.null_ambiguous;
        }
    }
    return {dims_ok && worst <= 1e-6,
            std::string("null dims ") + (dims_ok ? "match dim E" : "MISMATCH") +
                ", max residual/angle = " + fmt(worst) + ", tol 1e-6"};
}

Verdict c07_commutant_dichotomy() {
    const DirectedTree path = DirectedTree::path(12);
    const BergmanTreeKernel scalar(path, 2);
    const AbelianIrreducibilityReport ab = abelian_and_irreducibility_test(scalar);
    const DirectedTree tree = DirectedTree::two_ray(10);
    const BergmanTreeKernel branched(tree, 2);
    const AbelianIrreducibilityReport nb = abelian_and_irreducibility_test(branched);
    const bool pass = ab.matches_dim_e && ab.report.abelian &&
                      ab.report.max_pairwise_commutator <= 1e-9 && nb.matches_dim_e &&
                      !nb.report.abelian && nb.witness_commutator > 0.1;
    return {pass, "path pairwise = " + fmt(ab.report.max_pairwise_commutator) +
                      " (tol 1e-9), branched witness = " + fmt(nb.witness_commutator) +
                      " (> 0.1)"};
}

Verdict c08_eigenline_reflexivity() {
    const DirectedTree tree = DirectedTree::two_ray(24);
    const BergmanTreeKernel model(tree, 2);
    const Matrix s = model.shift().matrix();
    const auto grid = circle_grid(0.3, 32);
    double worst_coeff = 0.0, worst_action = 0.0, worst_slack = 0.0;
    for (const auto& p : sample_polynomials(kSeed ^ 0x81, 20, 12)) {
        const ComplexMatrix a = p.apply(s);
        const EigenlineRecovery rec = eigenline_multiplier_recovery(
            model, a, grid, std::max(p.degree(), 1));
        if (!rec.line_preserved) {
            return {false, "line preservation failed for a shift polynomial"};
        }
        ComplexVector reference = ComplexVector::Zero(rec.phi_coefficients.size());
        reference.head(p.coefficients.size()) = p.coefficients;
        worst_coeff = std::max(worst_coeff,
                               (rec.phi_coefficients - reference).cwiseAbs().maxCoeff());
        worst_action = std::max(worst_action, rec.action_residual);
        worst_slack = std::max(worst_slack, rec.sup_phi - rec.a_norm);
    }
    const bool pass = worst_coeff <= 1e-8 && worst_action <= 1e-8 && worst_slack <= 1e-9;
    return {pass, "max coeff gap = " + fmt(worst_coeff) + " (tol 1e-8), action = " +
                      fmt(worst_action) + " (tol 1e-8), norm slack = " + fmt(worst_slack)};
}

Verdict c09_von_neumann() {
    const DirectedTree tree = DirectedTree::two_ray(24);
    const TruncatedShift bergman = TruncatedShift::build(tree, WeightSystem::bergman(tree, 2));
    const TruncatedShift tri =
        TruncatedShift::build(tree, WeightSystem::two_parameter(tree, 1.0 / std::sqrt(2.0), 0.5));
    double worst = -std::numeric_limits<double>::infinity();
    for (const TruncatedShift* shift : {&bergman, &tri}) {
        for (const auto& p : sample_polynomials(kSeed ^ 0x91, 100, 8)) {
            worst = std::max(worst, vn_defect(*shift, p, 1024));
        }
    }
    double worst_matrix = -std::numeric_limits<double>::infinity();
    bool inflation = true;
    for (const auto& phi : sample_matrix_multipliers(kSeed ^ 0x92, 20, 2, 4)) {
        const MatrixVnReport report = matrix_vn_defect(bergman, phi, 1024);
        worst_matrix = std::max(worst_matrix, report.defect);
        inflation = inflation && report.inflation_sane;
    }
    const bool pass = worst <= 1e-3 && worst_matrix <= 1e-3 && inflation;
    return {pass, "max scalar defect = " + fmt(worst) + ", max matrix defect = " +
                      fmt(worst_matrix) + ", tol 1e-3"};
}

Verdict c10_hyponormality_dichotomy() {
    const DirectedTree tree = DirectedTree::two_ray(12);
    std::vector<double> s_values, t_values;
    for (int i = 1; i <= 5; ++i) s_values.push_back(i / (5.0 * std::sqrt(2.0)));
    for (int j = 1; j <= 5; ++j) t_values.push_back(j / 6.0);
    const auto rows = hyponormality_grid(tree, s_values, t_values);
    double grid_max = -std::numeric_limits<double>::infinity();
    for (const HypoGridRow& row : rows) grid_max = std::max(grid_max, row.min_eigenvalue);
    double bergman_min = std::numeric_limits<double>::infinity();
    for (int a : {2, 3, 4}) {
        const TruncatedShift shift = TruncatedShift::build(tree, WeightSystem::bergman(tree, a));
        bergman_min = std::min(bergman_min, hermitian_eig_range(hyponormality_form(shift)).min);
    }
    const bool pass = grid_max < -1e-3 && bergman_min >= -1e-10;
    return {pass, "two-parameter grid max eigenvalue = " + fmt(grid_max) +
                      " (< -1e-3), Bergman min = " + fmt(bergman_min) + " (>= -1e-10)"};
}

Verdict c11_approximation_convergence() {
    const DirectedTree tree = DirectedTree::two_ray(60);
    const BergmanTreeKernel bergman(tree, 2);
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    double worst_fejer = -std::numeric_limits<double>::infinity();
    double worst_gap = 0.0, worst_wot = 0.0, worst_bound = -std::numeric_limits<double>::infinity();
    for (const KernelModel* model : {static_cast<const KernelModel*>(&bergman),
                                     static_cast<const KernelModel*>(&tri)}) {
        ComplexVector phi(model->horizon() + 1);
        for (int k = 0; k <= model->horizon(); ++k) phi(k) = std::pow(0.5, k);
        const ApproximantSequence seq = fejer_approximants(phi, 200);
        worst_fejer = std::max(worst_fejer,
                               seq.max_sigma_sup - seq.bound_constant * seq.sup_phi_grid);
        worst_gap = std::max(worst_gap, seq.final_gap);

        ComplexVector f = ComplexVector::Zero(model->dimension());
        f(0) = 1.0;
        ComplexVector h_raw = ComplexVector::Zero(model->dimension());
        ComplexVector power = f;
        for (int k = 1; k <= 14; ++k) {
            power = model->shift().apply(power);
            if (k >= 6) h_raw += power;
        }
        const ComplexVector h = h_raw / h_raw.norm();
        const WotProbe probe = wot_convergence_probe(*model, phi, f, h, 200);
        worst_wot = std::max(worst_wot, probe.residuals.back());
        worst_bound = std::max(worst_bound, probe.uniform_bound - probe.bound_reference);
    }
    const bool pass = worst_fejer <= 1e-9 && worst_gap <= 0.02 && worst_wot < 1e-3 &&
                      worst_bound <= 1e-9;
    return {pass, "Fejer slack = " + fmt(worst_fejer) + ", gap(0.95) = " + fmt(worst_gap) +
                      " (tol 0.02), wot r_200 = " + fmt(worst_wot) + " (tol 1e-3)"};
}

Verdict c12_suite_determinism() {
    for (const std::string preset : {"bergman-two-ray-a2", "tridiagonal-s0.707-t0.5"}) {
        const SuiteConfig config = SuiteConfig::preset(preset);
        const SuiteResult first = run_suite(config, Exec::serial);
        const SuiteResult again = run_suite(config, Exec::serial);
        const SuiteResult parallel = run_suite(config, Exec::openmp);
        if (first.exit_status != 0) return {false, preset + ": suite failed"};
        if (first.files != again.files) return {false, preset + ": rerun bytes differ"};
        if (first.files != parallel.files) {
            return {false, preset + ": execution policy changed the bytes"};
        }
    }
    return {true, "2 presets x 3 runs each: byte-identical reports, exit 0"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"c01 scalar kernel closed form", c01_kernel_closed_form},
        {"c02 moment formulas across a", c02_moment_closed_form},
        {"c03 kernel Gram positivity", c03_gram_positivity},
        {"c04 reproducing identity", c04_reproducing_identity},
        {"c05 condition ratio bounds", c05_condition_bounds},
        {"c06 adjoint eigenvector sections", c06_eigenvector_sections},
        {"c07 commutant dichotomy", c07_commutant_dichotomy},
        {"c08 eigenline multiplier recovery", c08_eigenline_reflexivity},
        {"c09 von Neumann defects", c09_von_neumann},
        {"c10 hyponormality dichotomy", c10_hyponormality_dichotomy},
        {"c11 approximant convergence", c11_approximation_convergence},
        {"c12 suite determinism", c12_suite_determinism},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Verdict verdict;
        try {
            verdict = run();
        } catch (const std::exception& err) {
            verdict = {false, std::string("exception: ") + err.what()};
        }
        if (!verdict.pass) ++failures;
        std::printf("[%s] %s — %s\n", verdict.pass ? "PASS" : "FAIL", name.c_str(),
                    verdict.detail.c_str());
    }
    std::printf("%d/12 acceptance criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
