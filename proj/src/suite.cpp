#include "treeshift/suite.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "treeshift/commutant.hpp"
#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/sweeps.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vn.hpp"
#include "treeshift/weights.hpp"

namespace treeshift {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSeedGram = 0x6772616dULL;
constexpr std::uint64_t kSeedVn = 0x766e5f73ULL;
constexpr std::uint64_t kSeedMatrixVn = 0x6d76706cULL;
constexpr std::uint64_t kSeedRepro = 0x72657072ULL;
constexpr std::uint64_t kSeedEigenline = 0x65696c70ULL;
constexpr std::uint64_t kSeedMultiplier = 0x6d756c74ULL;

// ---- strict JSON helpers ----

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) {
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
        }
    }
}

const json& require_field(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw std::invalid_argument("missing required key '" + std::string(key) + "' in " + where);
    }
    return *it;
}

std::string string_field(const json& v, const std::string& name) {
    if (!v.is_string()) throw std::invalid_argument(name + " must be a string");
    return v.get<std::string>();
}

int integer_field(const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw std::invalid_argument(name + " must be an integer");
    return v.get<int>();
}

double number_field(const json& v, const std::string& name) {
    if (!v.is_number()) throw std::invalid_argument(name + " must be a number");
    return v.get<double>();
}

json config_json(const SuiteConfig& c) {
    json fam;
    fam["type"] = c.family;
    if (c.family == "bergman") {
        fam["a"] = c.a;
    } else {
        fam["s"] = c.s;
        fam["t"] = c.t;
    }
    json doc;
    doc["suite"] = c.suite;
    doc["tree"] = c.tree;
    doc["family"] = fam;
    doc["depth"] = c.depth;
    doc["seed"] = c.seed;
    doc["grid"] = {{"boundary_points", c.boundary_points},
                   {"sweep_points", c.sweep_points},
                   {"max_radius", c.max_radius}};
    doc["tolerances"] = {{"identification", c.tol_identification},
                         {"gram", c.tol_gram},
                         {"reproducing", c.tol_reproducing},
                         {"vn", c.tol_vn},
                         {"eigenvector", c.tol_eigenvector},
                         {"wot", c.tol_wot},
                         {"recovery", c.tol_recovery}};
    return doc;
}

// ---- deterministic sampling helpers ----

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::complex<double>> seeded_disc_points(std::uint64_t seed, int count,
                                                     double max_radius) {
    std::mt19937_64 rng(seed);
    std::vector<std::complex<double>> points;
    points.reserve(static_cast<std::size_t>(count));
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < count; ++i) {
        const double r = max_radius * std::sqrt(unit_draw(rng));
        const double theta = two_pi * unit_draw(rng);
        points.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
    return points;
}

std::vector<std::complex<double>> circle_grid(double radius, int count) {
    std::vector<std::complex<double>> points;
    points.reserve(static_cast<std::size_t>(count));
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < count; ++i) {
        const double theta = two_pi * static_cast<double>(i) / static_cast<double>(count);
        points.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
    }
    return points;
}

std::vector<MatrixMultiplier> sample_matrix_multipliers(std::uint64_t seed, int count, int dim,
                                                        int max_degree) {
    const auto entries = sample_polynomials(seed, count * dim * dim, max_degree);
    std::vector<MatrixMultiplier> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        int length = 1;
        for (int e = 0; e < dim * dim; ++e) {
            const auto& p = entries[static_cast<std::size_t>(i * dim * dim + e)];
            length = std::max(length, static_cast<int>(p.coefficients.size()));
        }
        MatrixMultiplier phi;
        phi.coefficients.assign(static_cast<std::size_t>(length), ComplexMatrix::Zero(dim, dim));
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                const auto& p = entries[static_cast<std::size_t>(i * dim * dim + r * dim + c)];
                for (int k = 0; k < static_cast<int>(p.coefficients.size()); ++k) {
                    phi.coefficients[static_cast<std::size_t>(k)](r, c) = p.coefficients(k);
                }
            }
        }
        out.push_back(std::move(phi));
    }
    return out;
}

// ---- formatting ----

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string csv_header(std::uint64_t seed, const char* columns) {
    return "# seed=" + std::to_string(seed) + "\n" + columns + "\n";
}

// ---- model bundle ----

struct Bundle {
    std::unique_ptr<DirectedTree> tree;
    std::unique_ptr<KernelModel> model;
};

Bundle make_bundle(const SuiteConfig& config, int depth) {
    Bundle bundle;
    bundle.tree = std::make_unique<DirectedTree>(
        config.tree == "path" ? DirectedTree::path(depth) : DirectedTree::two_ray(depth));
    if (config.family == "bergman") {
        bundle.model = std::make_unique<BergmanTreeKernel>(*bundle.tree, config.a);
    } else {
        bundle.model = std::make_unique<TridiagonalKernel>(*bundle.tree, config.s, config.t);
    }
    return bundle;
}

// ---- check bookkeeping ----

struct CheckList {
    std::vector<SuiteCheck> checks;

    void add(std::string name, double value, double threshold, std::string comparison,
             bool pass) {
        checks.push_back({std::move(name), pass, value, threshold, std::move(comparison)});
    }
    void le(std::string name, double value, double threshold) {
        add(std::move(name), value, threshold, "<=", value <= threshold);
    }
    void lt(std::string name, double value, double threshold) {
        add(std::move(name), value, threshold, "<", value < threshold);
    }
    void ge(std::string name, double value, double threshold) {
        add(std::move(name), value, threshold, ">=", value >= threshold);
    }
    void gt(std::string name, double value, double threshold) {
        add(std::move(name), value, threshold, ">", value > threshold);
    }
    void flag(std::string name, bool ok) {
        add(std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok);
    }
    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

double coefficient_gap(const ComplexVector& fitted, const ComplexVector& reference) {
    const int n = std::max(static_cast<int>(fitted.size()), static_cast<int>(reference.size()));
    double gap = 0.0;
    for (int k = 0; k < n; ++k) {
        const std::complex<double> a = k < fitted.size() ? fitted(k) : 0.0;
        const std::complex<double> b = k < reference.size() ? reference(k) : 0.0;
        gap = std::max(gap, std::abs(a - b));
    }
    return gap;
}

double scalar_multiplier_gap(const MatrixMultiplier& fitted, const PolynomialSample& reference,
                             int dim_e) {
    const int n =
        std::max(fitted.degree(), reference.degree());
    double gap = 0.0;
    for (int k = 0; k <= n; ++k) {
        ComplexMatrix expected = ComplexMatrix::Zero(dim_e, dim_e);
        if (k <= reference.degree()) {
            expected = reference.coefficients(k) * ComplexMatrix::Identity(dim_e, dim_e);
        }
        ComplexMatrix got = ComplexMatrix::Zero(dim_e, dim_e);
        if (k <= fitted.degree()) got = fitted.coefficients[static_cast<std::size_t>(k)];
        gap = std::max(gap, (got - expected).cwiseAbs().maxCoeff());
    }
    return gap;
}

}  // namespace

// ---- SuiteConfig ----

SuiteConfig SuiteConfig::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown_keys(doc, "config",
                        {"suite", "tree", "family", "depth", "seed", "grid", "tolerances",
                         "out_dir"});

    SuiteConfig c;
    c.suite = string_field(require_field(doc, "config", "suite"), "suite");
    c.tree = string_field(require_field(doc, "config", "tree"), "tree");

    const json& fam = require_field(doc, "config", "family");
    if (!fam.is_object()) throw std::invalid_argument("family must be an object");
    c.family = string_field(require_field(fam, "family", "type"), "family.type");
    if (c.family == "bergman") {
        reject_unknown_keys(fam, "family", {"type", "a"});
        c.a = integer_field(require_field(fam, "family", "a"), "family.a");
    } else if (c.family == "two_parameter") {
        reject_unknown_keys(fam, "family", {"type", "s", "t"});
        c.s = number_field(require_field(fam, "family", "s"), "family.s");
        c.t = number_field(require_field(fam, "family", "t"), "family.t");
    } else {
        throw std::invalid_argument("family.type must be 'bergman' or 'two_parameter'");
    }

    c.depth = integer_field(require_field(doc, "config", "depth"), "depth");
    const json& seed = require_field(doc, "config", "seed");
    if (!seed.is_number_unsigned() &&
        !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        throw std::invalid_argument("seed must be a non-negative integer");
    }
    c.seed = seed.get<std::uint64_t>();

    if (auto it = doc.find("grid"); it != doc.end()) {
        if (!it->is_object()) throw std::invalid_argument("grid must be an object");
        reject_unknown_keys(*it, "grid", {"boundary_points", "sweep_points", "max_radius"});
        if (auto f = it->find("boundary_points"); f != it->end()) {
            c.boundary_points = integer_field(*f, "grid.boundary_points");
        }
        if (auto f = it->find("sweep_points"); f != it->end()) {
            c.sweep_points = integer_field(*f, "grid.sweep_points");
        }
        if (auto f = it->find("max_radius"); f != it->end()) {
            c.max_radius = number_field(*f, "grid.max_radius");
        }
    }
    if (auto it = doc.find("tolerances"); it != doc.end()) {
        if (!it->is_object()) throw std::invalid_argument("tolerances must be an object");
        reject_unknown_keys(*it, "tolerances",
                            {"identification", "gram", "reproducing", "vn", "eigenvector",
                             "wot", "recovery"});
        auto pick = [&](const char* key, double& slot) {
            if (auto f = it->find(key); f != it->end()) {
                slot = number_field(*f, std::string("tolerances.") + key);
            }
        };
        pick("identification", c.tol_identification);
        pick("gram", c.tol_gram);
        pick("reproducing", c.tol_reproducing);
        pick("vn", c.tol_vn);
        pick("eigenvector", c.tol_eigenvector);
        pick("wot", c.tol_wot);
        pick("recovery", c.tol_recovery);
    }
    if (auto it = doc.find("out_dir"); it != doc.end()) {
        c.out_dir = string_field(*it, "out_dir");
    }

    c.validate();
    return c;
}

void SuiteConfig::validate() const {
    auto fail = [](const std::string& message) {
        throw std::invalid_argument("invalid suite config: " + message);
    };
    if (suite.empty()) fail("suite name is empty");
    if (tree != "path" && tree != "two_ray") fail("tree must be 'path' or 'two_ray'");
    if (family == "bergman") {
        if (a < 2 || a > 12) fail("bergman exponent a must be in 2..12");
    } else if (family == "two_parameter") {
        if (!(s > 0.0) || !(t > 0.0)) fail("two-parameter weights need s > 0 and t > 0");
        if (tree != "two_ray") fail("the two-parameter family needs the two-ray tree");
    } else {
        fail("family must be 'bergman' or 'two_parameter'");
    }
    // The eigenvector probe at |w| ~ 0.4 carries a pinned 1e-8 tail budget;
    // horizons below 24 cannot meet it, so they are rejected up front.
    if (depth < 24 || depth > 200) fail("depth must be in 24..200");
    if (boundary_points < 64 || boundary_points > (1 << 20)) {
        fail("boundary_points must be in 64..1048576");
    }
    if (sweep_points < 2 || sweep_points > 10000) fail("sweep_points must be in 2..10000");
    if (!(max_radius > 0.0) || !(max_radius < 1.0)) fail("max_radius must lie in (0, 1)");
    const double tols[] = {tol_identification, tol_gram, tol_reproducing, tol_vn,
                           tol_eigenvector,    tol_wot,  tol_recovery};
    for (double tol : tols) {
        if (!(tol > 0.0)) fail("tolerances must be positive");
    }
}

SuiteConfig SuiteConfig::preset(const std::string& name) {
    SuiteConfig c;
    c.suite = name;
    c.seed = 20260819ULL;
    if (name == "bergman-path-a2") {
        c.tree = "path";
        c.family = "bergman";
        c.a = 2;
        c.depth = 60;
    } else if (name == "bergman-two-ray-a2") {
        c.tree = "two_ray";
        c.family = "bergman";
        c.a = 2;
        c.depth = 24;
    } else if (name == "bergman-two-ray-a3") {
        c.tree = "two_ray";
        c.family = "bergman";
        c.a = 3;
        c.depth = 24;
    } else if (name == "tridiagonal-s0.707-t0.5") {
        c.tree = "two_ray";
        c.family = "two_parameter";
        c.s = 0.70710678118654752;
        c.t = 0.5;
        c.depth = 24;
    } else {
        std::string names;
        for (const auto& n : suite_preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown preset '" + name + "' (available: " + names + ")");
    }
    c.validate();
    return c;
}

std::vector<std::string> suite_preset_names() {
    return {"bergman-path-a2", "bergman-two-ray-a2", "bergman-two-ray-a3",
            "tridiagonal-s0.707-t0.5"};
}

std::string SuiteConfig::to_json() const { return config_json(*this).dump(2) + "\n"; }

// ---- suite runner ----

SuiteResult run_suite(const SuiteConfig& config, Exec exec) {
    config.validate();

    Bundle bundle = make_bundle(config, config.depth);
    const KernelModel& model = *bundle.model;
    const TruncatedShift& shift = model.shift();
    const DirectedTree& tree = model.tree();
    const int dim_e = model.dim_e();
    const std::uint64_t seed = config.seed;

    CheckList checks;

    // Contractivity (exact norm from the diagonal S*S).
    checks.le("contraction_norm", shift.norm_exact(), 1.0 + 1e-12);

    // Unitary identification with the model space.
    const IdentificationCheck id = identification_check(model);
    checks.le("identification_unitarity", id.unitarity_defect, config.tol_identification);
    checks.le("identification_intertwining", id.intertwining_defect, config.tol_identification);
    checks.le("identification_moment", id.moment_defect, config.tol_identification);

    // Frame norm-transfer hypothesis behind scalar-to-frame estimates.
    const AssumptionCheck assumption = assumption_check(model);
    checks.flag("frame_norm_transfer", assumption.holds);

    // Positive definiteness of the kernel on random point/vector batches.
    const std::vector<double> gram_mins = gram_sweep(model, seed ^ kSeedGram, 10, 5, 0.8, exec);
    const double gram_min = *std::min_element(gram_mins.begin(), gram_mins.end());
    checks.ge("gram_min_eigenvalue", gram_min, -config.tol_gram);

    // Reproducing identity over basis functions and random evaluation points.
    {
        const auto points = seeded_disc_points(seed ^ kSeedRepro, 10, 0.7);
        std::vector<ComplexVector> frames;
        for (int i = 0; i < dim_e; ++i) {
            ComplexVector g = ComplexVector::Zero(dim_e);
            g(i) = 1.0;
            frames.push_back(g);
        }
        if (dim_e >= 2) {
            ComplexVector g = ComplexVector::Zero(dim_e);
            g(0) = std::complex<double>(1.0, 0.0) / std::sqrt(2.0);
            g(1) = std::complex<double>(0.0, 1.0) / std::sqrt(2.0);
            frames.push_back(g);
        }
        const int depth_cap = std::min(20, model.horizon());
        double worst = 0.0;
        for (int j = 0; j < model.dimension(); ++j) {
            if (tree.depth_of(j) > depth_cap) continue;
            const ComplexVector f = model.onb_tree_column(j).cast<std::complex<double>>();
            for (const auto& w : points) {
                for (const auto& g : frames) {
                    worst = std::max(worst, reproducing_residual(model, f, w, g));
                }
            }
        }
        checks.lt("reproducing_max_residual", worst, config.tol_reproducing);
    }

    // Adjoint eigenvector structure at a generic interior point.
    {
        const std::complex<double> w0(0.35, 0.2);
        const EigenvectorStructure st = eigenvector_structure(model, w0, 1e-8);
        checks.le("eigenvector_max_residual", st.max_relative_residual, config.tol_eigenvector);
        checks.add("eigenvector_null_dimension", static_cast<double>(st.null_dimension),
                   static_cast<double>(dim_e), "==",
                   st.null_dimension == dim_e && !st.null_ambiguous);
        checks.le("eigenvector_principal_angle", st.principal_angle, 1e-6);
    }

    // Truncation tail of the kernel sections at mid radius.
    checks.le("section_tail_at_half", model.section_tail_bound(0.5), 1e-6);

    // Condition-number sweep against the family closed-form bound.
    std::vector<ConditionSweepRow> condition_rows;
    {
        std::vector<double> radii;
        for (int i = 0; i < config.sweep_points; ++i) {
            radii.push_back(config.max_radius * static_cast<double>(i) /
                            static_cast<double>(config.sweep_points - 1));
        }
        condition_rows = condition_sweep(model, radii, exec);
        double bounded_slack = 0.0;
        double closed_gap = 0.0;
        for (const auto& row : condition_rows) {
            if (std::isfinite(row.bound)) {
                bounded_slack = std::max(bounded_slack, row.ratio - row.bound);
            }
        }
        for (double r : radii) {
            const ConditionData cd = condition_ratio(model, std::complex<double>(r, 0.0));
            const double gap_min =
                std::abs(cd.mu_min - cd.closed_min) / std::max(1.0, std::abs(cd.closed_min));
            const double gap_max =
                std::abs(cd.mu_max - cd.closed_max) / std::max(1.0, std::abs(cd.closed_max));
            closed_gap = std::max(closed_gap, std::max(gap_min, gap_max));
        }
        checks.le("condition_ratio_bounded", bounded_slack, 1e-9);
        checks.le("condition_closed_match", closed_gap, 1e-8);
    }

    // Scalar von Neumann defects over seeded polynomial samples.
    const std::vector<PolynomialSample> vn_samples =
        sample_polynomials(seed ^ kSeedVn, 100, 8);
    const std::vector<double> vn_defects =
        vn_sweep(shift, seed ^ kSeedVn, 100, 8, config.boundary_points, exec);
    checks.le("vn_max_defect", *std::max_element(vn_defects.begin(), vn_defects.end()),
              config.tol_vn);

    // Matrix-valued von Neumann defects (2x2 polynomial matrices).
    {
        const auto mats = sample_matrix_multipliers(seed ^ kSeedMatrixVn, 20, 2, 4);
        double worst = -std::numeric_limits<double>::infinity();
        bool inflation_sane = true;
        for (const auto& phi : mats) {
            const MatrixVnReport report = matrix_vn_defect(shift, phi, config.boundary_points);
            worst = std::max(worst, report.defect);
            inflation_sane = inflation_sane && report.inflation_sane;
        }
        checks.le("matrix_vn_max_defect", worst, config.tol_vn);
        checks.flag("matrix_vn_inflation_sane", inflation_sane);
    }

    // Fejer approximants of the geometric multiplier phi(z) = 1/(1 - z/2).
    ComplexVector phi(std::min(model.horizon(), 200) + 1);
    for (int k = 0; k < phi.size(); ++k) phi(k) = std::pow(0.5, k);
    {
        const ApproximantSequence seq = fejer_approximants(phi, 200, config.boundary_points);
        checks.le("fejer_uniform_bound",
                  seq.max_sigma_sup - seq.bound_constant * seq.sup_phi_grid, 1e-9);
        checks.le("fejer_final_gap", seq.final_gap, 0.02);
    }

    // Weak convergence of the approximants toward the multiplier.
    {
        ComplexVector f = ComplexVector::Zero(model.dimension());
        f(0) = 1.0;
        ComplexVector h_raw = ComplexVector::Zero(model.dimension());
        ComplexVector power = f;
        for (int k = 1; k <= std::min(14, model.horizon()); ++k) {
            power = shift.apply(power);
            if (k >= 6) h_raw += power;
        }
        const ComplexVector h = h_raw / h_raw.norm();
        const WotProbe probe =
            wot_convergence_probe(model, phi, f, h, 200, config.boundary_points);
        checks.lt("wot_final_residual", probe.residuals.back(), config.tol_wot);
        checks.le("wot_uniform_bound", probe.uniform_bound - probe.bound_reference, 1e-9);
    }

    // Commutant dichotomy at a tractable depth.
    {
        Bundle small = make_bundle(config, std::min(config.depth, 12));
        const AbelianIrreducibilityReport air = abelian_and_irreducibility_test(*small.model);
        checks.add("commutant_dichotomy", air.report.abelian ? 1.0 : 0.0,
                   dim_e == 1 ? 1.0 : 0.0, "==",
                   air.matches_dim_e && !air.report.ambiguous);
        if (dim_e >= 2) {
            checks.gt("commutant_witness", air.witness_commutator, 0.1);
            checks.le("projection_reduction",
                      std::max(air.projection_idempotency, air.projection_commutation), 1e-8);
        }
    }

    // Reflexivity mechanism: eigenline-preserving adjoints act as multipliers.
    {
        const int cap = std::max(1, std::min(8, model.horizon() / 2));
        const PolynomialSample p = sample_polynomials(seed ^ kSeedEigenline, 1, cap)[0];
        const ComplexMatrix a = p.apply(shift.matrix());
        const auto grid = circle_grid(0.3, 32);
        const EigenlineRecovery rec =
            eigenline_multiplier_recovery(model, a, grid, std::max(p.degree(), 1));
        checks.le("eigenline_line_distance", rec.line_distance, 1e-6);
        checks.le("eigenline_g_independence", rec.g_independence, 1e-8);
        checks.le("eigenline_coefficient_gap",
                  coefficient_gap(rec.phi_coefficients, p.coefficients), config.tol_recovery);
        checks.ge("eigenline_norm_slack", rec.a_norm - rec.sup_phi, -1e-9);
        checks.le("eigenline_action_residual", rec.action_residual, config.tol_recovery);
    }

    // Commutant-route multiplier recovery for a polynomial in the shift.
    {
        const int cap = std::max(1, std::min(6, model.horizon() / 4));
        const PolynomialSample q = sample_polynomials(seed ^ kSeedMultiplier, 1, cap)[0];
        const ComplexMatrix t_op = q.apply(shift.matrix());
        const auto grid = circle_grid(0.25, 48);
        const MultiplierRecovery rec =
            multiplier_recovery(model, t_op, grid, std::max(q.degree(), 1));
        checks.le("multiplier_precondition", rec.precondition_defect, 1e-8);
        checks.le("multiplier_fit_residual", rec.fit_residual, 1e-8);
        checks.le("multiplier_coefficient_gap", scalar_multiplier_gap(rec.multiplier, q, dim_e),
                  config.tol_recovery);
        checks.add("multiplier_norm_chain", rec.chain_ratio, rec.norm_bound, "<=",
                   rec.chain_holds && rec.norm_bound_holds);
        checks.le("multiplier_reproduction", reproduction_defect(model, rec, t_op), 1e-8);
        checks.le("multiplier_skipped_points", static_cast<double>(rec.skipped_points.size()),
                  0.0);
    }

    // Cauchy dual: weight-level and dense routes agree; the guard fires on the
    // non-invertible full matrix.
    {
        const Matrix dual_interior = cauchy_dual_interior(shift);
        const Matrix s_interior = shift.matrix().leftCols(shift.interior_dimension());
        const Matrix identity_gap =
            dual_interior.transpose() * s_interior -
            Matrix::Identity(shift.interior_dimension(), shift.interior_dimension());
        checks.le("cauchy_dual_identity", operator_norm(identity_gap), 1e-10);

        const TruncatedShift dual = cauchy_dual(shift);
        const Matrix weight_interior = dual.matrix().leftCols(shift.interior_dimension());
        const Matrix route_gap = dual_interior - weight_interior;
        checks.le("cauchy_dual_consistency", operator_norm(route_gap), 1e-10);

        bool guard_ok = false;
        try {
            (void)cauchy_dual_dense(shift.matrix());
        } catch (const std::invalid_argument& e) {
            guard_ok = std::string(e.what()).find("singular value") != std::string::npos;
        }
        checks.flag("cauchy_dual_guard", guard_ok);
    }

    // Hyponormality: sign depends on the family.
    std::vector<HypoGridRow> hypo_rows;
    {
        const EigRange range = hermitian_eig_range(hyponormality_form(shift));
        if (config.family == "bergman") {
            checks.ge("hyponormality_min", range.min, -1e-10);
            const TruncatedShift dual = cauchy_dual(shift);
            const EigRange concavity = hermitian_eig_range(concavity_form(dual));
            checks.ge("dual_concavity_min", concavity.min, -1e-10);
        } else {
            checks.lt("hyponormality_violation", range.min, -1e-3);
            std::vector<double> s_values;
            std::vector<double> t_values;
            for (int i = 1; i <= 5; ++i) {
                s_values.push_back(static_cast<double>(i) / 5.0 * 0.70710678118654752);
            }
            for (int j = 1; j <= 5; ++j) t_values.push_back(static_cast<double>(j) / 6.0);
            const DirectedTree grid_tree = DirectedTree::two_ray(std::min(config.depth, 12));
            hypo_rows = hyponormality_grid(grid_tree, s_values, t_values, exec);
            double grid_min = std::numeric_limits<double>::infinity();
            for (const auto& row : hypo_rows) grid_min = std::min(grid_min, row.min_eigenvalue);
            checks.lt("hyponormality_grid_min", grid_min, -1e-3);
        }
    }

    // ---- assemble the report files ----

    SuiteResult result;
    result.checks = checks.checks;
    result.all_pass = checks.all_pass();
    result.exit_status = result.all_pass ? 0 : 1;

    json summary;
    summary["suite"] = config.suite;
    summary["seed"] = config.seed;
    summary["family"] = config.family;
    summary["tree"] = config.tree;
    summary["config"] = config_json(config);
    json check_array = json::array();
    for (const auto& c : result.checks) {
        check_array.push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"comparison", c.comparison}});
    }
    summary["checks"] = check_array;
    summary["all_pass"] = result.all_pass;
    summary["exit_status"] = result.exit_status;
    result.files["summary.json"] = summary.dump(2) + "\n";

    std::string condition_csv = csv_header(seed, "abs_w,mu_min,mu_max,ratio,bound");
    for (const auto& row : condition_rows) {
        condition_csv += format_g(row.abs_w) + "," + format_g(row.mu_min) + "," +
                         format_g(row.mu_max) + "," + format_g(row.ratio) + "," +
                         format_g(row.bound) + "\n";
    }
    result.files["condition_sweep.csv"] = condition_csv;

    std::string vn_csv = csv_header(seed, "index,degree,defect");
    for (std::size_t i = 0; i < vn_defects.size(); ++i) {
        vn_csv += std::to_string(i) + "," + std::to_string(vn_samples[i].degree()) + "," +
                  format_g(vn_defects[i]) + "\n";
    }
    result.files["vn_defects.csv"] = vn_csv;

    if (config.family == "two_parameter") {
        std::string hypo_csv = csv_header(seed, "s,t,min_eigenvalue");
        for (const auto& row : hypo_rows) {
            hypo_csv += format_g(row.s) + "," + format_g(row.t) + "," +
                        format_g(row.min_eigenvalue) + "\n";
        }
        result.files["hyponormality_grid.csv"] = hypo_csv;
    }

    return result;
}

void write_suite_files(const SuiteResult& result, const std::string& out_dir) {
    if (out_dir.empty()) throw std::invalid_argument("output directory path is empty");
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, content] : result.files) {
        const std::filesystem::path path = std::filesystem::path(out_dir) / name;
        std::ofstream stream(path, std::ios::binary);
        if (!stream) {
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        }
        stream << content;
        if (!stream) throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace treeshift
