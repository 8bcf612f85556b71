#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"
#include "treeshift/series.hpp"
#include "treeshift/tree.hpp"

using namespace treeshift;
using C = std::complex<double>;

namespace {

std::vector<C> sample_disc_points(double radius, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<C> pts;
    for (int i = 0; i < count; ++i) {
        const double r = radius * std::sqrt(unit(rng));
        const double phi = 2.0 * M_PI * unit(rng);
        pts.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
    return pts;
}

}  // namespace

TEST_CASE("series building blocks: closed forms and monotone ratios") {
    // C(n+a-1, n) against small frozen values.
    CHECK(binomial_series_coefficient(0, 2) == 1.0);
    CHECK(binomial_series_coefficient(3, 2) == 4.0);
    CHECK(binomial_series_coefficient(2, 3) == 6.0);
    // Moment times binomial coefficient is exactly 1 on the root strand.
    for (int a : {2, 3, 4}) {
        for (int n = 0; n <= 30; ++n) {
            CHECK(moment_norm_square(0, a, n) * binomial_series_coefficient(n, a) ==
                  doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    // Branch coefficients start at 1 and increase with the predicted ratio.
    for (int a : {2, 3}) {
        for (int m : {0, 1, 4}) {
            CHECK(branch_series_coefficient(m, 0, a) == doctest::Approx(1.0));
            for (int n = 0; n < 12; ++n) {
                const double lhs = branch_series_coefficient(m, n + 1, a);
                const double rhs =
                    branch_series_coefficient(m, n, a) * branch_series_ratio(m, n, a);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
                CHECK(branch_series_ratio(m, n, a) ==
                      doctest::Approx((m + n + a + 1.0) / (m + n + 2.0)).epsilon(1e-13));
                if (a >= 2) CHECK(lhs >= branch_series_coefficient(m, n, a) - 1e-15);
            }
        }
    }
    // For a = 2 the branch coefficients collapse to (m+n+2)/(m+2).
    for (int m : {0, 1, 3}) {
        for (int n = 0; n <= 10; ++n) {
            CHECK(branch_series_coefficient(m, n, 2) ==
                  doctest::Approx((m + n + 2.0) / (m + 2.0)).epsilon(1e-13));
        }
    }
}

TEST_CASE("root series sums to the binomial closed form") {
    for (int a : {2, 3, 5}) {
        for (const C u : {C(0.3, 0.2), C(-0.6, 0.1), C(0.0, 0.85)}) {
            const C expected = std::pow(1.0 - u, -double(a)) - 1.0;
            CHECK(std::abs(root_series(u, a) - expected) <= 1e-11 * std::abs(expected));
        }
    }
}

TEST_CASE("path kernel is the scalar Bergman-type kernel") {
    const DirectedTree tree = DirectedTree::path(40);
    const BergmanTreeKernel model(tree, 2);
    CHECK(model.dim_e() == 1);
    CHECK(model.m0() == 0);
    for (const C z : sample_disc_points(0.9, 6, 11)) {
        for (const C w : sample_disc_points(0.9, 6, 12)) {
            const C expected = std::pow(1.0 - z * std::conj(w), -2.0);
            const ComplexMatrix k = model.eval(z, w);
            REQUIRE(k.rows() == 1);
            CHECK(std::abs(k(0, 0) - expected) <= 1e-9 * std::abs(expected));
        }
    }
    CHECK_THROWS_AS(model.eval(C(1.0, 0.0), C(0.2, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(model.eval(C(0.2, 0.0), C(0.0, 1.1)), std::invalid_argument);
}

TEST_CASE("two-ray kernel is diagonal with root and branch strands") {
    const DirectedTree tree = DirectedTree::two_ray(30);
    for (int a : {2, 3}) {
        const BergmanTreeKernel model(tree, a);
        REQUIRE(model.dim_e() == 2);
        CHECK(model.m0() == 0);
        for (const C z : sample_disc_points(0.8, 4, 21)) {
            for (const C w : sample_disc_points(0.8, 4, 22)) {
                const ComplexMatrix k = model.eval(z, w);
                const C u = z * std::conj(w);
                CHECK(std::abs(k(0, 1)) == 0.0);
                CHECK(std::abs(k(1, 0)) == 0.0);
                const C root_expected = std::pow(1.0 - u, -double(a));
                CHECK(std::abs(k(0, 0) - root_expected) <= 1e-10 * std::abs(root_expected));
                const C branch_expected = 1.0 + branch_series(u, 0, a);
                CHECK(std::abs(k(1, 1) - branch_expected) <=
                      1e-10 * std::abs(branch_expected));
            }
        }
        // Partial sums converge to the adaptive evaluation.
        const ComplexMatrix full = model.eval(C(0.5, 0.2), C(0.4, -0.3));
        const ComplexMatrix partial = model.eval_partial(C(0.5, 0.2), C(0.4, -0.3), 400);
        CHECK(operator_norm(ComplexMatrix(full - partial)) <= 1e-10);
    }
}

TEST_CASE("diagonal series and strand moments match the series tables") {
    const DirectedTree tree = DirectedTree::two_ray(20);
    const BergmanTreeKernel model(tree, 3);
    const double u = 0.37;
    CHECK(model.diagonal_series(0, u) ==
          doctest::Approx(std::pow(1.0 - u, -3.0)).epsilon(1e-11));
    CHECK(model.diagonal_series(1, u) ==
          doctest::Approx(1.0 + branch_series(u, 0, 3).real()).epsilon(1e-11));
    CHECK(model.strand_generation(0) == 0);
    CHECK(model.strand_generation(1) == 1);
    CHECK(model.strand_m(0) == -1);
    CHECK(model.strand_m(1) == 0);
    for (int n = 0; n <= 15; ++n) {
        CHECK(model.strand_moment(0, n) == doctest::Approx(moment_norm_square(0, 3, n)));
        // Branch strand g lives on generation 1: moments shift by one depth.
        CHECK(model.strand_moment(1, n) == doctest::Approx(moment_norm_square(1, 3, n)));
    }
}

TEST_CASE("tridiagonal kernel: frozen coefficient table at the reference point") {
    const DirectedTree tree = DirectedTree::two_ray(16);
    const double s = 1.0 / std::sqrt(2.0);
    const TridiagonalKernel model(tree, s, 0.5);
    CHECK(model.alpha(0) == doctest::Approx(-1.5));
    CHECK(model.alpha(1) == doctest::Approx(1.0));
    CHECK(model.alpha(2) == doctest::Approx(2.5));
    CHECK(model.alpha(3) == doctest::Approx(4.0));
    CHECK(model.alpha(7) == doctest::Approx(4.0));
    CHECK(model.coefficient_a(0) == doctest::Approx(1.0));
    CHECK(model.coefficient_a(1) == doctest::Approx(1.0));
    CHECK(model.coefficient_a(2) == doctest::Approx(2.0));
    CHECK(model.coefficient_a(5) == doctest::Approx(2.0));
    CHECK(model.coefficient_b(0) == doctest::Approx(1.0));
    CHECK(model.coefficient_b(1) == doctest::Approx(2.0));
    CHECK(model.coefficient_b(4) == doctest::Approx(2.0));

    // Off-diagonal coupling alpha_0 s sqrt(2) = -1.5 times z^2 conj(w) / z conj(w)^2.
    const C z(0.4, 0.25), w(-0.3, 0.35);
    const ComplexMatrix k = model.eval(z, w);
    CHECK(std::abs(k(0, 1) - (-1.5) * z * z * std::conj(w)) <= 1e-13);
    CHECK(std::abs(k(1, 0) - (-1.5) * z * std::conj(w) * std::conj(w)) <= 1e-13);
    CHECK(std::abs(k(0, 1) - std::conj(model.eval(w, z)(1, 0))) <= 1e-13);

    // Diagonal closed forms at z = w = r.
    for (const double r : {0.2, 0.5, 0.8}) {
        const ComplexMatrix kd = model.eval(C(r, 0.0), C(r, 0.0));
        CHECK(kd(0, 0).real() == doctest::Approx(model.k1(r)).epsilon(1e-12));
        CHECK(kd(1, 1).real() == doctest::Approx(model.k2(r)).epsilon(1e-12));
        const EigRange closed = model.closed_form_eigenvalues(r);
        const EigRange numeric = hermitian_eig_range(kd);
        CHECK(closed.min == doctest::Approx(numeric.min).epsilon(1e-11));
        CHECK(closed.max == doctest::Approx(numeric.max).epsilon(1e-11));
    }

    // Partial sums converge to the closed-form evaluation.
    const ComplexMatrix full = model.eval(C(0.45, -0.2), C(0.3, 0.5));
    const ComplexMatrix partial = model.eval_partial(C(0.45, -0.2), C(0.3, 0.5), 300);
    CHECK(operator_norm(ComplexMatrix(full - partial)) <= 1e-11);

    CHECK_THROWS_AS(TridiagonalKernel(DirectedTree::two_ray(2), s, 0.5),
                    std::invalid_argument);
}

TEST_CASE("condition bounds: frozen family values") {
    const DirectedTree path = DirectedTree::path(20);
    const BergmanTreeKernel scalar(path, 2);
    CHECK(scalar.condition_bound(0.5) == doctest::Approx(1.0));

    const DirectedTree tree = DirectedTree::two_ray(20);
    const BergmanTreeKernel a2(tree, 2);
    const BergmanTreeKernel a3(tree, 3);
    CHECK(a2.condition_bound(0.9) == doctest::Approx(3.0));   // 1 + (m0 + a)! = 1 + 2!
    CHECK(a3.condition_bound(0.9) == doctest::Approx(7.0));   // 1 + 3!

    // Measured ratio stays under the bound deep into the disc.
    for (const double r : {0.5, 0.9, 0.99}) {
        const ConditionData data = condition_ratio(a2, C(r, 0.0));
        CHECK(data.ratio <= data.bound + 1e-9);
        CHECK(data.mu_min > 0.0);
        CHECK(data.mu_max == doctest::Approx(data.closed_max).epsilon(1e-9));
        CHECK(data.mu_min == doctest::Approx(data.closed_min).epsilon(1e-9));
    }
    CHECK(condition_ratio(a2, C(0.99, 0.0)).ratio == doctest::Approx(1.96).epsilon(0.01));
    CHECK(condition_ratio(a3, C(0.99, 0.0)).ratio == doctest::Approx(2.94).epsilon(0.01));

    // Tridiagonal: the radius-uniform gate makes the bound infinite near 0
    // and finite once the diagonal dominates the coupling.
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    CHECK(std::isinf(tri.condition_bound(0.1)));
    CHECK(std::isfinite(tri.condition_bound(0.8)));
    const ConditionData tri_data = condition_ratio(tri, C(0.8, 0.0));
    CHECK(tri_data.ratio <= tri_data.bound + 1e-9);
}

TEST_CASE("identification: unitary, intertwining, and moment-exact") {
    const DirectedTree tree = DirectedTree::two_ray(16);
    for (const bool tridiagonal : {false, true}) {
        std::unique_ptr<KernelModel> model;
        if (tridiagonal) {
            model = std::make_unique<TridiagonalKernel>(tree, 1.0 / std::sqrt(2.0), 0.5);
        } else {
            model = std::make_unique<BergmanTreeKernel>(tree, 2);
        }
        const IdentificationCheck check = identification_check(*model);
        CHECK(check.unitarity_defect <= 1e-12);
        CHECK(check.intertwining_defect <= 1e-12);
        CHECK(check.moment_defect <= 1e-10);
        const Matrix w = model->identification();
        CHECK(operator_norm(Matrix(w.transpose() * w - Matrix::Identity(w.cols(), w.cols()))) <=
              1e-12);
    }
}

TEST_CASE("sections: series route equals basis route and reproduces values") {
    const DirectedTree tree = DirectedTree::two_ray(18);
    const BergmanTreeKernel model(tree, 2);
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (const C w : sample_disc_points(0.7, 5, 31)) {
        ComplexVector g(2);
        g << C(coef(rng), coef(rng)), C(coef(rng), coef(rng));
        const ComplexVector via_series = model.section_series(w, g);
        const ComplexVector via_basis = model.section_basis(w, g);
        CHECK((via_series - via_basis).norm() <= 1e-10 * via_series.norm());
        // <f, kappa(., w) g> = <f(w), g> for ONB elements f.
        for (int j = 0; j < model.dimension(); j += 7) {
            ComplexVector f = model.onb_tree_column(j).cast<C>();
            CHECK(reproducing_residual(model, f, w, g) <= 1e-9);
        }
    }
    // Pointwise values of ONB columns agree with onb_value.
    for (int j : {0, 1, 2, 5, 10}) {
        const ComplexVector f = model.onb_tree_column(j).cast<C>();
        for (const C w : sample_disc_points(0.6, 3, 41)) {
            const ComplexVector lhs = model.value_at(f, w);
            const ComplexVector rhs = model.onb_value(j, w);
            CHECK((lhs - rhs).norm() <= 1e-11);
        }
    }
}

TEST_CASE("power coordinates round trip") {
    const DirectedTree tree = DirectedTree::two_ray(14);
    const TridiagonalKernel model(tree, 1.0 / std::sqrt(2.0), 0.5);
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    ComplexVector f(model.dimension());
    for (int i = 0; i < model.dimension(); ++i) f(i) = C(coef(rng), coef(rng));
    const ComplexMatrix power = model.to_power(f);
    REQUIRE(power.rows() == 2);
    REQUIRE(power.cols() == model.horizon() + 1);
    const ComplexVector back = model.from_power(power);
    CHECK((back - f).norm() <= 1e-12 * f.norm());
}

TEST_CASE("gram matrices of kernel sections are positive") {
    const DirectedTree tree = DirectedTree::two_ray(20);
    const BergmanTreeKernel model(tree, 2);
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const std::vector<C> pts = sample_disc_points(0.8, 6, 51);
    std::vector<ComplexVector> vecs;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ComplexVector g(2);
        g << C(coef(rng), coef(rng)), C(coef(rng), coef(rng));
        vecs.push_back(g.normalized());
    }
    CHECK(gram_min_eigenvalue(model, pts, vecs) >= -1e-10);
}

TEST_CASE("truncated sections are numerical eigenvectors of the adjoint") {
    const DirectedTree tree = DirectedTree::two_ray(60);
    const BergmanTreeKernel model(tree, 2);
    const C w(0.35, 0.2);
    const EigenvectorStructure st = eigenvector_structure(model, w);
    CHECK(st.max_relative_residual <= 1e-8);
    CHECK(st.null_dimension == 2);
    CHECK_FALSE(st.null_ambiguous);
    CHECK(st.principal_angle <= 1e-8);
    CHECK(st.tail_bound <= 1e-10);
    // Per-vector residuals are small too.
    ComplexVector g(2);
    g << C(1.0, 0.0), C(0.5, -0.5);
    CHECK(eigenvector_residual(model, w, g) <= 1e-8);
    // Near the boundary the horizon cut dominates: a tiny tail budget throws.
    CHECK_THROWS_AS(eigenvector_structure(model, C(0.95, 0.0), 1e-12),
                    std::invalid_argument);
}

TEST_CASE("section tail bound shrinks with depth and grows with radius") {
    const DirectedTree shallow_tree = DirectedTree::two_ray(12);
    const DirectedTree deep_tree = DirectedTree::two_ray(40);
    const BergmanTreeKernel shallow(shallow_tree, 2);
    const BergmanTreeKernel deep(deep_tree, 2);
    CHECK(deep.section_tail_bound(0.5) < shallow.section_tail_bound(0.5));
    CHECK(shallow.section_tail_bound(0.8) > shallow.section_tail_bound(0.4));
    CHECK(deep.section_tail_bound(0.5) <= 1e-10);
}

TEST_CASE("polynomial witness fits the scalar ratio with a constant") {
    const DirectedTree path = DirectedTree::path(30);
    const BergmanTreeKernel model(path, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.99 * i / 20.0);
    const PolynomialBoundWitness witness = polynomial_bound_witness(model, grid);
    CHECK(witness.fits);
    CHECK(witness.degree == 0);
    REQUIRE(witness.coefficients.size() == 1);
    CHECK(witness.coefficients[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(witness.sup_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("norm-ratio assumption holds for the formula families") {
    const DirectedTree tree = DirectedTree::two_ray(16);
    const BergmanTreeKernel bergman(tree, 2);
    CHECK(assumption_check(bergman).holds);
    const TridiagonalKernel tri(tree, 1.0 / std::sqrt(2.0), 0.5);
    CHECK(assumption_check(tri).holds);
}
