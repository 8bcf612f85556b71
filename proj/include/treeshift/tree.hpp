#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace treeshift {

// Declarative description of a rooted directed tree truncated at a finite
// horizon.  "counts" holds generation cardinalities (counts[0] == 1 is the
// root) and is only meaningful for Kind::generations.
struct TreeSpec {
    enum class Kind { path, two_ray, generations };

    Kind kind = Kind::path;
    int depth = 0;
    std::vector<int> counts;

    // Strict parser: unknown fields are rejected, field types are checked.
    static TreeSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static std::string kind_name(Kind k);

    bool operator==(const TreeSpec&) const = default;
};

// Rooted directed tree, truncated at frontier_depth.  Vertices are indexed in
// BFS order (generation by generation), so vertex 0 is the root and the set
// {v : depth(v) <= n} is always an index prefix.  Every vertex above the
// frontier has at least one child; frontier vertices carry no represented
// children (the infinite tree continues below them).
class DirectedTree {
  public:
    static constexpr int kDefaultGenerationCap = 4096;

    static DirectedTree path(int depth);
    static DirectedTree two_ray(int depth);
    // counts = generation cardinalities, counts[0] == 1.  Children are
    // distributed over the previous generation as evenly as possible, earlier
    // vertices receiving the surplus; counts must be non-decreasing or some
    // vertex above the frontier would be childless.
    static DirectedTree from_generation_counts(const std::vector<int>& counts,
                                               int generation_cap = kDefaultGenerationCap);
    static DirectedTree from_spec(const TreeSpec& spec,
                                  int generation_cap = kDefaultGenerationCap);

    int vertex_count() const { return static_cast<int>(parent_.size()); }
    int frontier_depth() const { return frontier_depth_; }
    int root() const { return 0; }

    int depth_of(int v) const { return depth_.at(v); }
    int parent_of(int v) const { return parent_.at(v); }  // -1 for the root
    const std::vector<int>& children(int v) const { return children_.at(v); }
    const std::string& label(int v) const { return label_.at(v); }
    bool is_frontier(int v) const { return depth_.at(v) == frontier_depth_; }

    // Vertices at exactly depth n (an index range, returned explicitly).
    std::vector<int> generation(int n) const;
    std::vector<int> generation_sizes() const;

    // Branching vertices: card(Chi(v)) >= 2 among represented vertices.
    const std::vector<int>& branching_vertices() const { return branching_; }
    // 1 + max depth of a branching vertex; 0 when no vertex branches.
    int branching_index() const;

    // Canonical spec of this tree: path if every generation is a singleton,
    // two-ray if the shape matches, otherwise explicit generation counts.
    TreeSpec derive_spec() const;

  private:
    DirectedTree() = default;
    void finalize();

    int frontier_depth_ = 0;
    std::vector<int> parent_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
    std::vector<std::string> label_;
    std::vector<int> generation_start_;  // size frontier_depth_+2, prefix offsets
    std::vector<int> branching_;
};

}  // namespace treeshift
