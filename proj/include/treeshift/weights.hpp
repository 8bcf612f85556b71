#pragma once

#include <vector>

#include "treeshift/tree.hpp"

namespace treeshift {

// Edge weights for a weighted shift on a tree: lambda[u] is attached to the
// edge parent(u) -> u, so lambda[0] (the root slot) is unused.
struct WeightSystem {
    enum class Family { bergman, two_parameter, custom };

    const DirectedTree* tree = nullptr;
    Family family = Family::custom;
    int a = 0;        // bergman parameter (integer >= 2)
    double s = 0.0;   // two-parameter family
    double t = 0.0;
    std::vector<double> lambda;

    // lambda_u = (1/sqrt(card Chi(v))) * sqrt((d_v+1)/(d_v+a)) for u in Chi(v).
    static WeightSystem bergman(const DirectedTree& tree, int a);
    // Two-ray weights: lambda_(1,1)=lambda_(2,1)=s, lambda_(1,2)=lambda_(2,3)=1,
    // lambda_(2,2)=lambda_(1,3)=t, everything at level >= 4 is 1.  Requires a
    // two-ray shaped tree, s > 0, t > 0, t != 1.
    static WeightSystem two_parameter(const DirectedTree& tree, double s, double t);
    static WeightSystem custom(const DirectedTree& tree, std::vector<double> lambda);

    // sum_{u in Chi(v)} lambda_u^2.  For the formula-backed families the sum is
    // evaluated from the closed form for every represented vertex, frontier
    // included (its children exist in the infinite tree with known weights);
    // custom systems only see represented children.
    double child_weight_square_sum(int v) const;

    // sup of child_weight_square_sum over the whole (infinite) tree: closed
    // form for the formula families, the represented maximum for custom
    // weights.  The shift is a contraction iff this is <= 1.
    double contraction_bound() const;

    std::string family_name() const;
};

}  // namespace treeshift
