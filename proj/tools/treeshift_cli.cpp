// Command-line front end: inspect trees and shifts, sweep kernels, compute
// commutants, probe von Neumann inequalities and the reflexivity mechanism,
// and run full report suites.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "treeshift/commutant.hpp"
#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"
#include "treeshift/parallel.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/suite.hpp"
#include "treeshift/sweeps.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vn.hpp"
#include "treeshift/weights.hpp"

namespace {

using nlohmann::json;
using namespace treeshift;

struct ModelOptions {
    std::string tree = "two_ray";
    std::string family = "bergman";
    int a = 2;
    double s = 0.70710678118654752;
    double t = 0.5;
    int depth = 24;
    std::uint64_t seed = 20260819ULL;
    std::string out_dir;
};

void add_model_options(CLI::App* cmd, ModelOptions& opt, int min_depth) {
    cmd->add_option("--tree", opt.tree, "tree kind")
        ->check(CLI::IsMember({"path", "two_ray"}));
    cmd->add_option("--family", opt.family, "weight family")
        ->check(CLI::IsMember({"bergman", "two_parameter"}));
    cmd->add_option("--a", opt.a, "bergman exponent (integer >= 2)");
    cmd->add_option("--s", opt.s, "two-parameter weight s (> 0)");
    cmd->add_option("--t", opt.t, "two-parameter weight t (> 0)");
    cmd->add_option("--depth", opt.depth, "truncation depth N")
        ->check(CLI::Range(min_depth, 200));
    cmd->add_option("--seed", opt.seed, "seed for every randomized draw");
    cmd->add_option("--out", opt.out_dir, "directory to write report files into");
}

struct CliModel {
    std::unique_ptr<DirectedTree> tree;
    std::unique_ptr<KernelModel> model;
};

CliModel make_model(const ModelOptions& opt) {
    if (opt.family == "bergman" && opt.a < 2) {
        throw std::invalid_argument("bergman exponent a must be >= 2");
    }
    if (opt.family == "two_parameter" && opt.tree != "two_ray") {
        throw std::invalid_argument("the two-parameter family needs --tree two_ray");
    }
    CliModel m;
    m.tree = std::make_unique<DirectedTree>(
        opt.tree == "path" ? DirectedTree::path(opt.depth) : DirectedTree::two_ray(opt.depth));
    if (opt.family == "bergman") {
        m.model = std::make_unique<BergmanTreeKernel>(*m.tree, opt.a);
    } else {
        m.model = std::make_unique<TridiagonalKernel>(*m.tree, opt.s, opt.t);
    }
    return m;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw std::runtime_error("cannot open " + path.string() + " for writing");
    stream << content;
    if (!stream) throw std::runtime_error("failed writing " + path.string());
}

// Print to stdout and, when an output directory was requested, also persist.
void deliver(const std::string& text, const std::string& out_dir, const std::string& filename) {
    std::cout << text;
    if (!out_dir.empty()) {
        write_text_file(std::filesystem::path(out_dir) / filename, text);
    }
}

int run_tree(const ModelOptions& opt) {
    const DirectedTree tree = opt.tree == "path" ? DirectedTree::path(opt.depth)
                                                 : DirectedTree::two_ray(opt.depth);
    json doc;
    doc["kind"] = opt.tree;
    doc["depth"] = tree.frontier_depth();
    doc["vertex_count"] = tree.vertex_count();
    doc["branching_index"] = tree.branching_index();
    doc["kernel_dimension"] = kernel_dimension_formula(tree);
    doc["generation_sizes"] = tree.generation_sizes();
    doc["branching_vertices"] = tree.branching_vertices();
    deliver(doc.dump(2) + "\n", opt.out_dir, "tree.json");
    return 0;
}

int run_shift(const ModelOptions& opt) {
    const CliModel m = make_model(opt);
    const TruncatedShift& shift = m.model->shift();
    const EigRange hypo = hermitian_eig_range(hyponormality_form(shift));
    const TruncatedShift dual = cauchy_dual(shift);
    const EigRange concavity = hermitian_eig_range(concavity_form(dual));
    const Matrix dual_interior = cauchy_dual_interior(shift);
    const Matrix weight_interior = dual.matrix().leftCols(shift.interior_dimension());
    const Matrix route_gap = dual_interior - weight_interior;

    json doc;
    doc["family"] = shift.weights.family_name();
    doc["tree"] = opt.tree;
    doc["depth"] = shift.horizon();
    doc["dimension"] = shift.dimension();
    doc["interior_dimension"] = shift.interior_dimension();
    doc["norm"] = shift.norm_exact();
    doc["contraction_bound"] = shift.weights.contraction_bound();
    doc["hyponormality_form"] = {{"min", hypo.min}, {"max", hypo.max}};
    doc["dual_concavity_form"] = {{"min", concavity.min}, {"max", concavity.max}};
    doc["cauchy_dual_route_gap"] = operator_norm(route_gap);
    deliver(doc.dump(2) + "\n", opt.out_dir, "shift.json");
    return 0;
}

int run_kernel(const ModelOptions& opt, int sweep_points, double max_radius) {
    const CliModel m = make_model(opt);
    const IdentificationCheck id = identification_check(*m.model);

    std::vector<double> radii;
    for (int i = 0; i < sweep_points; ++i) {
        radii.push_back(max_radius * static_cast<double>(i) /
                        static_cast<double>(sweep_points - 1));
    }
    const auto rows = condition_sweep(*m.model, radii, Exec::openmp);

    json doc;
    doc["model"] = m.model->name();
    doc["dim_e"] = m.model->dim_e();
    doc["identification"] = {{"unitarity_defect", id.unitarity_defect},
                             {"intertwining_defect", id.intertwining_defect},
                             {"moment_defect", id.moment_defect}};
    doc["section_tail_at_half"] = m.model->section_tail_bound(0.5);
    json sweep = json::array();
    for (const auto& row : rows) {
        sweep.push_back({{"abs_w", row.abs_w},
                         {"mu_min", row.mu_min},
                         {"mu_max", row.mu_max},
                         {"ratio", row.ratio},
                         {"bound", row.bound}});
    }
    doc["condition_sweep"] = sweep;
    deliver(doc.dump(2) + "\n", opt.out_dir, "kernel.json");
    return 0;
}

int run_commutant(const ModelOptions& opt) {
    const CliModel m = make_model(opt);
    const AbelianIrreducibilityReport air = abelian_and_irreducibility_test(*m.model);
    json doc;
    doc["model"] = m.model->name();
    doc["dim_e"] = m.model->dim_e();
    doc["report"] = json::parse(commutant_report_json(air.report));
    doc["matches_dim_e"] = air.matches_dim_e;
    doc["witness_commutator"] = air.witness_commutator;
    doc["projection_idempotency"] = air.projection_idempotency;
    doc["projection_commutation"] = air.projection_commutation;
    doc["projection_orthogonality"] = air.projection_orthogonality;
    deliver(doc.dump(2) + "\n", opt.out_dir, "commutant.json");
    return 0;
}

int run_vn(const ModelOptions& opt, int count, int max_degree, int grid) {
    const CliModel m = make_model(opt);
    const auto samples = sample_polynomials(opt.seed, count, max_degree);
    const auto defects = vn_sweep(m.model->shift(), opt.seed, count, max_degree, grid,
                                  Exec::openmp);
    json doc;
    doc["model"] = m.model->name();
    doc["seed"] = opt.seed;
    doc["count"] = count;
    doc["max_degree"] = max_degree;
    doc["grid"] = grid;
    doc["max_defect"] = *std::max_element(defects.begin(), defects.end());
    json rows = json::array();
    for (std::size_t i = 0; i < defects.size(); ++i) {
        rows.push_back({{"index", i}, {"degree", samples[i].degree()}, {"defect", defects[i]}});
    }
    doc["defects"] = rows;
    deliver(doc.dump(2) + "\n", opt.out_dir, "vn.json");
    return 0;
}

int run_reflexivity(const ModelOptions& opt, int grid_size) {
    const CliModel m = make_model(opt);
    const KernelModel& model = *m.model;
    const TruncatedShift& shift = model.shift();

    ComplexVector phi(std::min(model.horizon(), 200) + 1);
    for (int k = 0; k < phi.size(); ++k) phi(k) = std::pow(0.5, k);
    const ApproximantSequence fejer = fejer_approximants(phi, 200, grid_size);

    ComplexVector f = ComplexVector::Zero(model.dimension());
    f(0) = 1.0;
    ComplexVector h_raw = ComplexVector::Zero(model.dimension());
    ComplexVector power = f;
    for (int k = 1; k <= std::min(14, model.horizon()); ++k) {
        power = shift.apply(power);
        if (k >= 6) h_raw += power;
    }
    const ComplexVector h = h_raw / h_raw.norm();
    const WotProbe wot = wot_convergence_probe(model, phi, f, h, 200, grid_size);

    const int cap = std::max(1, std::min(8, model.horizon() / 2));
    const PolynomialSample p = sample_polynomials(opt.seed, 1, cap)[0];
    const ComplexMatrix a = p.apply(shift.matrix());
    std::vector<std::complex<double>> circle;
    for (int i = 0; i < 32; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * i / 32.0;
        circle.emplace_back(0.3 * std::cos(theta), 0.3 * std::sin(theta));
    }
    const EigenlineRecovery rec =
        eigenline_multiplier_recovery(model, a, circle, std::max(p.degree(), 1));
    double coefficient_gap = 0.0;
    for (int k = 0; k < std::max(rec.phi_coefficients.size(), p.coefficients.size()); ++k) {
        const std::complex<double> lhs = k < rec.phi_coefficients.size()
                                             ? rec.phi_coefficients(k)
                                             : std::complex<double>(0.0);
        const std::complex<double> rhs =
            k < p.coefficients.size() ? p.coefficients(k) : std::complex<double>(0.0);
        coefficient_gap = std::max(coefficient_gap, std::abs(lhs - rhs));
    }

    json doc;
    doc["model"] = model.name();
    doc["seed"] = opt.seed;
    doc["fejer"] = {{"sup_phi_grid", fejer.sup_phi_grid},
                    {"max_sigma_sup", fejer.max_sigma_sup},
                    {"bound_constant", fejer.bound_constant},
                    {"final_gap", fejer.final_gap}};
    doc["wot"] = {{"final_residual", wot.residuals.back()},
                  {"uniform_bound", wot.uniform_bound},
                  {"bound_reference", wot.bound_reference},
                  {"uniformly_bounded", wot.uniformly_bounded}};
    doc["eigenline"] = {{"target_degree", p.degree()},
                        {"line_preserved", rec.line_preserved},
                        {"line_distance", rec.line_distance},
                        {"g_independence", rec.g_independence},
                        {"coefficient_gap", coefficient_gap},
                        {"sup_phi", rec.sup_phi},
                        {"a_norm", rec.a_norm},
                        {"norm_bound_holds", rec.norm_bound_holds},
                        {"action_residual", rec.action_residual},
                        {"fit_residual", rec.fit_residual}};
    deliver(doc.dump(2) + "\n", opt.out_dir, "reflexivity.json");
    return 0;
}

int run_suite_command(const std::string& preset, const std::string& config_path,
                      const std::string& out_override, bool seed_set, std::uint64_t seed,
                      bool depth_set, int depth, const std::string& exec_name,
                      bool list_presets) {
    if (list_presets) {
        for (const auto& name : suite_preset_names()) std::cout << name << "\n";
        return 0;
    }
    if (preset.empty() == config_path.empty()) {
        throw std::invalid_argument("pass exactly one of --preset or --config");
    }
    SuiteConfig config;
    if (!preset.empty()) {
        config = SuiteConfig::preset(preset);
    } else {
        std::ifstream stream(config_path, std::ios::binary);
        if (!stream) throw std::invalid_argument("cannot read config file " + config_path);
        std::ostringstream text;
        text << stream.rdbuf();
        config = SuiteConfig::from_json_text(text.str());
    }
    if (seed_set) config.seed = seed;
    if (depth_set) config.depth = depth;
    config.validate();

    const Exec exec = exec_name == "serial" ? Exec::serial : Exec::openmp;
    const SuiteResult result = run_suite(config, exec);

    for (const auto& check : result.checks) {
        std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name
                  << "  value=" << check.value << "  " << check.comparison << " "
                  << check.threshold << "\n";
    }
    int passed = 0;
    for (const auto& check : result.checks) passed += check.pass ? 1 : 0;
    std::cout << "suite " << config.suite << ": " << passed << "/" << result.checks.size()
              << " checks passed\n";

    std::string out_dir = !out_override.empty() ? out_override : config.out_dir;
    if (out_dir.empty()) out_dir = "treeshift-out/" + config.suite;
    write_suite_files(result, out_dir);
    std::cout << "reports written to " << out_dir << "\n";
    return result.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Weighted shifts on rooted directed trees: kernels, commutants, and von Neumann "
        "inequality probes"};
    app.require_subcommand(1);

    ModelOptions tree_opt;
    CLI::App* tree_cmd = app.add_subcommand("tree", "describe a truncated tree");
    tree_cmd->add_option("--tree", tree_opt.tree, "tree kind")
        ->check(CLI::IsMember({"path", "two_ray"}));
    tree_cmd->add_option("--depth", tree_opt.depth, "truncation depth N")
        ->check(CLI::Range(1, 4096));
    tree_cmd->add_option("--out", tree_opt.out_dir, "directory to write tree.json into");

    ModelOptions shift_opt;
    CLI::App* shift_cmd =
        app.add_subcommand("shift", "norms and positivity forms of the weighted shift");
    add_model_options(shift_cmd, shift_opt, 3);

    ModelOptions kernel_opt;
    int sweep_points = 15;
    double max_radius = 0.9;
    CLI::App* kernel_cmd =
        app.add_subcommand("kernel", "kernel identification and condition sweep");
    add_model_options(kernel_cmd, kernel_opt, 3);
    kernel_cmd->add_option("--sweep-points", sweep_points, "radii in the condition sweep")
        ->check(CLI::Range(2, 10000));
    kernel_cmd->add_option("--max-radius", max_radius, "largest sweep radius (< 1)")
        ->check(CLI::Range(1e-6, 0.999999));

    ModelOptions commutant_opt;
    commutant_opt.depth = 12;
    CLI::App* commutant_cmd =
        app.add_subcommand("commutant", "commutant basis and the abelian dichotomy");
    add_model_options(commutant_cmd, commutant_opt, 3);

    ModelOptions vn_opt;
    int vn_count = 100;
    int vn_degree = 8;
    int vn_grid = 1024;
    CLI::App* vn_cmd =
        app.add_subcommand("vn", "von Neumann defects over seeded polynomial samples");
    add_model_options(vn_cmd, vn_opt, 3);
    vn_cmd->add_option("--count", vn_count, "number of samples")->check(CLI::Range(1, 100000));
    vn_cmd->add_option("--max-degree", vn_degree, "maximum sample degree")
        ->check(CLI::Range(0, 64));
    vn_cmd->add_option("--grid", vn_grid, "boundary grid size")
        ->check(CLI::Range(64, 1 << 20));

    ModelOptions reflexivity_opt;
    int reflexivity_grid = 1024;
    CLI::App* reflexivity_cmd = app.add_subcommand(
        "reflexivity", "Fejer approximants, weak convergence, eigenline recovery");
    add_model_options(reflexivity_cmd, reflexivity_opt, 8);
    reflexivity_cmd->add_option("--grid", reflexivity_grid, "boundary grid size")
        ->check(CLI::Range(64, 1 << 20));

    std::string suite_preset;
    std::string suite_config;
    std::string suite_out;
    std::uint64_t suite_seed = 0;
    int suite_depth = 0;
    std::string suite_exec = "openmp";
    bool suite_list = false;
    CLI::App* suite_cmd = app.add_subcommand("suite", "run a full report suite");
    CLI::Option* preset_opt =
        suite_cmd->add_option("--preset", suite_preset, "built-in suite name");
    CLI::Option* config_opt =
        suite_cmd->add_option("--config", suite_config, "path to a JSON suite config");
    preset_opt->excludes(config_opt);
    suite_cmd->add_option("--out", suite_out, "output directory override");
    CLI::Option* seed_opt = suite_cmd->add_option("--seed", suite_seed, "seed override");
    CLI::Option* depth_opt = suite_cmd->add_option("--depth", suite_depth, "depth override");
    suite_cmd->add_option("--exec", suite_exec, "execution policy")
        ->check(CLI::IsMember({"serial", "openmp"}));
    suite_cmd->add_flag("--list-presets", suite_list, "list built-in suites and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(tree_cmd)) return run_tree(tree_opt);
        if (app.got_subcommand(shift_cmd)) return run_shift(shift_opt);
        if (app.got_subcommand(kernel_cmd)) return run_kernel(kernel_opt, sweep_points, max_radius);
        if (app.got_subcommand(commutant_cmd)) return run_commutant(commutant_opt);
        if (app.got_subcommand(vn_cmd)) return run_vn(vn_opt, vn_count, vn_degree, vn_grid);
        if (app.got_subcommand(reflexivity_cmd)) {
            return run_reflexivity(reflexivity_opt, reflexivity_grid);
        }
        if (app.got_subcommand(suite_cmd)) {
            return run_suite_command(suite_preset, suite_config, suite_out,
                                     seed_opt->count() > 0, suite_seed, depth_opt->count() > 0,
                                     suite_depth, suite_exec, suite_list);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
}
