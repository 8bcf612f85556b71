#include "treeshift/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace treeshift {

namespace {

bool has_two_ray_shape(const DirectedTree& tree) {
    const auto sizes = tree.generation_sizes();
    if (sizes.size() < 2) return false;
    if (sizes[0] != 1) return false;
    for (std::size_t n = 1; n < sizes.size(); ++n) {
        if (sizes[n] != 2) return false;
    }
    return tree.children(tree.root()).size() == 2;
}

}  // namespace

WeightSystem WeightSystem::bergman(const DirectedTree& tree, int a) {
    if (a < 2) throw std::invalid_argument("bergman weights need an integer parameter a >= 2");
    WeightSystem w;
    w.tree = &tree;
    w.family = Family::bergman;
    w.a = a;
    w.lambda.assign(static_cast<std::size_t>(tree.vertex_count()), 0.0);
    for (int v = 0; v < tree.vertex_count(); ++v) {
        const auto& chi = tree.children(v);
        if (chi.empty()) continue;
        const double d = static_cast<double>(tree.depth_of(v));
        const double value =
            std::sqrt((d + 1.0) / (d + static_cast<double>(a))) / std::sqrt(static_cast<double>(chi.size()));
        for (int u : chi) w.lambda[static_cast<std::size_t>(u)] = value;
    }
    return w;
}

WeightSystem WeightSystem::two_parameter(const DirectedTree& tree, double s, double t) {
    if (!has_two_ray_shape(tree)) {
        throw std::invalid_argument("two_parameter weights require a two-ray tree (one root, two infinite rays)");
    }
    if (!(s > 0.0) || !(t > 0.0)) throw std::invalid_argument("two_parameter weights need s > 0 and t > 0");
    if (t == 1.0) throw std::invalid_argument("two_parameter weights need t != 1");
    WeightSystem w;
    w.tree = &tree;
    w.family = Family::two_parameter;
    w.s = s;
    w.t = t;
    w.lambda.assign(static_cast<std::size_t>(tree.vertex_count()), 0.0);
    for (int v = 1; v < tree.vertex_count(); ++v) {
        const int level = tree.depth_of(v);
        // Vertices at level k >= 1 sit in BFS order [(1,k), (2,k)].
        const int branch = (v == tree.generation(level)[0]) ? 1 : 2;
        double value = 1.0;
        if (level == 1) {
            value = s;
        } else if (level == 2) {
            value = (branch == 1) ? 1.0 : t;
        } else if (level == 3) {
            value = (branch == 1) ? t : 1.0;
        }
        w.lambda[static_cast<std::size_t>(v)] = value;
    }
    return w;
}

WeightSystem WeightSystem::custom(const DirectedTree& tree, std::vector<double> lambda) {
    if (static_cast<int>(lambda.size()) != tree.vertex_count()) {
        throw std::invalid_argument("custom weights need exactly one entry per vertex (root slot ignored)");
    }
    for (int v = 1; v < tree.vertex_count(); ++v) {
        if (!(lambda[static_cast<std::size_t>(v)] > 0.0)) {
            throw std::invalid_argument("custom weights must be positive on every non-root vertex");
        }
    }
    WeightSystem w;
    w.tree = &tree;
    w.family = Family::custom;
    w.lambda = std::move(lambda);
    return w;
}

double WeightSystem::child_weight_square_sum(int v) const {
    if (v < 0 || v >= tree->vertex_count()) throw std::invalid_argument("vertex out of range");
    if (family == Family::bergman) {
        // card(Chi(v)) terms of value^2 = ((d+1)/(d+a)) regardless of fan-out.
        const double d = static_cast<double>(tree->depth_of(v));
        return (d + 1.0) / (d + static_cast<double>(a));
    }
    if (family == Family::two_parameter) {
        const int level = tree->depth_of(v);
        if (level == 0) return 2.0 * s * s;
        const int branch = (v == tree->generation(level)[0]) ? 1 : 2;
        // Child of (branch, level) is (branch, level+1), weight by level+1.
        const int cl = level + 1;
        double value = 1.0;
        if (cl == 2) {
            value = (branch == 1) ? 1.0 : t;
        } else if (cl == 3) {
            value = (branch == 1) ? t : 1.0;
        }
        return value * value;
    }
    double sum = 0.0;
    for (int u : tree->children(v)) sum += lambda[static_cast<std::size_t>(u)] * lambda[static_cast<std::size_t>(u)];
    return sum;
}

double WeightSystem::contraction_bound() const {
    if (family == Family::bergman) {
        // (d+1)/(d+a) increases to 1 along any ray.
        return 1.0;
    }
    if (family == Family::two_parameter) {
        // Root sum 2s^2; every deeper sum is 1 or t^2, both attained.
        return std::max({2.0 * s * s, 1.0, t * t});
    }
    double sup = 0.0;
    for (int v = 0; v < tree->vertex_count(); ++v) {
        if (tree->children(v).empty()) continue;
        sup = std::max(sup, child_weight_square_sum(v));
    }
    return sup;
}

std::string WeightSystem::family_name() const {
    switch (family) {
        case Family::bergman: return "bergman";
        case Family::two_parameter: return "two_parameter";
        case Family::custom: return "custom";
    }
    return "custom";
}

}  // namespace treeshift
