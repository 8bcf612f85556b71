#include "treeshift/sweeps.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "treeshift/weights.hpp"

namespace treeshift {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool openmp_enabled() {
#if TREESHIFT_HAS_OPENMP
    return true;
#else
    return false;
#endif
}

std::vector<ConditionSweepRow> condition_sweep(const KernelModel& model,
                                               const std::vector<double>& radii, Exec exec) {
    std::vector<ConditionSweepRow> rows(radii.size());
    for_each_index(exec, static_cast<int>(radii.size()), [&](int i) {
        const double r = radii[static_cast<std::size_t>(i)];
        const ConditionData data = condition_ratio(model, std::complex<double>(r, 0.0));
        rows[static_cast<std::size_t>(i)] = {r, data.mu_min, data.mu_max, data.ratio, data.bound};
    });
    return rows;
}

std::vector<double> gram_sweep(const KernelModel& model, std::uint64_t seed, int batches,
                               int points_per_batch, double max_radius, Exec exec) {
    if (batches < 1 || points_per_batch < 1) {
        throw std::invalid_argument("gram sweep needs at least one batch and one point");
    }
    if (!(max_radius > 0.0 && max_radius < 1.0)) {
        throw std::invalid_argument("gram sweep radius must lie in (0, 1)");
    }
    std::vector<double> out(static_cast<std::size_t>(batches));
    const int d = model.dim_e();
    for_each_index(exec, batches, [&](int b) {
        std::mt19937_64 rng(seed ^ (kSeedStride * static_cast<std::uint64_t>(b + 1)));
        std::vector<std::complex<double>> points;
        std::vector<ComplexVector> vectors;
        points.reserve(static_cast<std::size_t>(points_per_batch));
        vectors.reserve(static_cast<std::size_t>(points_per_batch));
        for (int p = 0; p < points_per_batch; ++p) {
            const double radius = max_radius * std::sqrt(uniform_unit(rng));
            const double angle = kTwoPi * uniform_unit(rng);
            points.push_back(std::polar(radius, angle));
            ComplexVector g(d);
            for (int i = 0; i < d; ++i) {
                g(i) = std::polar(std::sqrt(uniform_unit(rng)), kTwoPi * uniform_unit(rng));
            }
            const double norm = g.norm();
            vectors.push_back(norm > 0.0 ? ComplexVector(g / norm) : ComplexVector::Unit(d, 0));
        }
        out[static_cast<std::size_t>(b)] = gram_min_eigenvalue(model, points, vectors);
    });
    return out;
}

std::vector<double> vn_sweep(const TruncatedShift& shift, std::uint64_t seed, int count,
                             int max_degree, int grid_size, Exec exec) {
    const std::vector<PolynomialSample> samples = sample_polynomials(seed, count, max_degree);
    std::vector<double> out(samples.size());
    for_each_index(exec, static_cast<int>(samples.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] =
            vn_defect(shift, samples[static_cast<std::size_t>(i)], grid_size);
    });
    return out;
}

std::vector<HypoGridRow> hyponormality_grid(const DirectedTree& tree,
                                            const std::vector<double>& s_values,
                                            const std::vector<double>& t_values, Exec exec) {
    const int ns = static_cast<int>(s_values.size());
    const int nt = static_cast<int>(t_values.size());
    std::vector<HypoGridRow> rows(static_cast<std::size_t>(ns * nt));
    for_each_index(exec, ns * nt, [&](int idx) {
        const double s = s_values[static_cast<std::size_t>(idx / nt)];
        const double t = t_values[static_cast<std::size_t>(idx % nt)];
        const TruncatedShift shift =
            TruncatedShift::build(tree, WeightSystem::two_parameter(tree, s, t));
        const Matrix form = hyponormality_form(shift);
        rows[static_cast<std::size_t>(idx)] = {s, t, hermitian_eig_range(form).min};
    });
    return rows;
}

}  // namespace treeshift
