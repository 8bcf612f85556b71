#pragma once

#include <cstdint>
#include <vector>

#include "treeshift/kernels.hpp"
#include "treeshift/parallel.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/vn.hpp"

namespace treeshift {

struct ConditionSweepRow {
    double abs_w = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.0;
    double ratio = 0.0;
    double bound = 0.0;  // family closed-form bound, +inf where not valid
};

// One row per radius, in input order.
std::vector<ConditionSweepRow> condition_sweep(const KernelModel& model,
                                               const std::vector<double>& radii,
                                               Exec exec = Exec::serial);

// Minimum Gram eigenvalue per batch: batch b draws `points_per_batch` points
// uniform in |w| <= max_radius and unit vectors in E from a seed derived from
// (seed, b), so results are independent of the execution policy.
std::vector<double> gram_sweep(const KernelModel& model, std::uint64_t seed, int batches,
                               int points_per_batch, double max_radius,
                               Exec exec = Exec::serial);

// von Neumann defect per seeded polynomial sample (samples generated
// up-front, serially; defects evaluated under the policy).
std::vector<double> vn_sweep(const TruncatedShift& shift, std::uint64_t seed, int count,
                             int max_degree, int grid_size, Exec exec = Exec::serial);

struct HypoGridRow {
    double s = 0.0;
    double t = 0.0;
    double min_eigenvalue = 0.0;  // of the interior compression of S*S - SS*
};

// Two-parameter hyponormality scan over the (s, t) grid, s-major order.
std::vector<HypoGridRow> hyponormality_grid(const DirectedTree& tree,
                                            const std::vector<double>& s_values,
                                            const std::vector<double>& t_values,
                                            Exec exec = Exec::serial);

}  // namespace treeshift
