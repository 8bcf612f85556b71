#include "treeshift/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace treeshift {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_depth(int depth) {
    if (depth < 1) fail("tree depth must be positive, got " + std::to_string(depth));
}

}  // namespace

std::string TreeSpec::kind_name(Kind k) {
    switch (k) {
        case Kind::path: return "path";
        case Kind::two_ray: return "two_ray";
        case Kind::generations: return "generations";
    }
    fail("unreachable tree kind");
}

TreeSpec TreeSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("tree spec must be a JSON object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "kind" && key != "depth" && key != "counts")
            fail("tree spec: unknown field \"" + key + "\"");
    }
    if (!j.contains("kind") || !j.at("kind").is_string())
        fail("tree spec: \"kind\" must be a string");
    const std::string kind = j.at("kind").get<std::string>();

    TreeSpec spec;
    if (kind == "path") spec.kind = Kind::path;
    else if (kind == "two_ray") spec.kind = Kind::two_ray;
    else if (kind == "generations") spec.kind = Kind::generations;
    else fail("tree spec: unknown kind \"" + kind + "\"");

    if (!j.contains("depth") || !j.at("depth").is_number_integer())
        fail("tree spec: \"depth\" must be an integer");
    spec.depth = j.at("depth").get<int>();
    check_depth(spec.depth);

    if (spec.kind == Kind::generations) {
        if (!j.contains("counts") || !j.at("counts").is_array())
            fail("tree spec: kind \"generations\" requires an integer array \"counts\"");
        for (const auto& c : j.at("counts")) {
            if (!c.is_number_integer()) fail("tree spec: \"counts\" entries must be integers");
            spec.counts.push_back(c.get<int>());
        }
        if (static_cast<int>(spec.counts.size()) != spec.depth + 1)
            fail("tree spec: counts must list depth+1 generations, got " +
                 std::to_string(spec.counts.size()) + " for depth " + std::to_string(spec.depth));
    } else if (j.contains("counts")) {
        fail("tree spec: \"counts\" is only valid for kind \"generations\"");
    }
    return spec;
}

nlohmann::json TreeSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind);
    j["depth"] = depth;
    if (kind == Kind::generations) j["counts"] = counts;
    return j;
}

void DirectedTree::finalize() {
    generation_start_.assign(frontier_depth_ + 2, 0);
    for (int v = 0; v < vertex_count(); ++v) generation_start_[depth_[v] + 1]++;
    for (int n = 0; n <= frontier_depth_; ++n) generation_start_[n + 1] += generation_start_[n];
    branching_.clear();
    for (int v = 0; v < vertex_count(); ++v)
        if (static_cast<int>(children_[v].size()) >= 2) branching_.push_back(v);
}

DirectedTree DirectedTree::path(int depth) {
    check_depth(depth);
    DirectedTree t;
    t.frontier_depth_ = depth;
    for (int d = 0; d <= depth; ++d) {
        t.parent_.push_back(d - 1);
        t.depth_.push_back(d);
        t.children_.emplace_back();
        if (d > 0) t.children_[d - 1].push_back(d);
        t.label_.push_back(std::to_string(d));
    }
    t.finalize();
    return t;
}

DirectedTree DirectedTree::two_ray(int depth) {
    check_depth(depth);
    DirectedTree t;
    t.frontier_depth_ = depth;
    t.parent_ = {-1};
    t.depth_ = {0};
    t.children_.emplace_back();
    t.label_ = {"(0,0)"};
    for (int level = 1; level <= depth; ++level) {
        for (int branch = 1; branch <= 2; ++branch) {
            const int v = static_cast<int>(t.parent_.size());
            const int parent = (level == 1) ? 0 : v - 2;
            t.parent_.push_back(parent);
            t.depth_.push_back(level);
            t.children_.emplace_back();
            t.children_[parent].push_back(v);
            t.label_.push_back("(" + std::to_string(branch) + "," + std::to_string(level) + ")");
        }
    }
    t.finalize();
    return t;
}

DirectedTree DirectedTree::from_generation_counts(const std::vector<int>& counts,
                                                  int generation_cap) {
    if (counts.size() < 2) fail("generation counts must cover at least depth 1");
    if (counts[0] != 1) fail("generation counts must start with a single root, got counts[0]=" +
                             std::to_string(counts[0]));
    for (std::size_t n = 0; n < counts.size(); ++n) {
        if (counts[n] <= 0)
            fail("generation counts must be strictly positive (leafless tree), got " +
                 std::to_string(counts[n]) + " at generation " + std::to_string(n));
        if (counts[n] > generation_cap)
            fail("generation " + std::to_string(n) + " has " + std::to_string(counts[n]) +
                 " vertices, exceeding the generation cap " + std::to_string(generation_cap));
        if (n > 0 && counts[n] < counts[n - 1])
            fail("generation counts must be non-decreasing (every vertex above the frontier "
                 "needs a child), got " + std::to_string(counts[n]) + " after " +
                 std::to_string(counts[n - 1]));
    }

    DirectedTree t;
    t.frontier_depth_ = static_cast<int>(counts.size()) - 1;
    t.parent_ = {-1};
    t.depth_ = {0};
    t.children_.emplace_back();
    t.label_ = {"g0.0"};
    int prev_start = 0;
    for (int n = 1; n <= t.frontier_depth_; ++n) {
        const int parents = counts[n - 1];
        const int total = counts[n];
        // Even distribution: the first (total mod parents) parents get one extra child.
        const int base = total / parents;
        const int extra = total % parents;
        int idx_in_gen = 0;
        for (int p = 0; p < parents; ++p) {
            const int parent = prev_start + p;
            const int nkids = base + (p < extra ? 1 : 0);
            for (int c = 0; c < nkids; ++c) {
                const int v = static_cast<int>(t.parent_.size());
                t.parent_.push_back(parent);
                t.depth_.push_back(n);
                t.children_.emplace_back();
                t.children_[parent].push_back(v);
                t.label_.push_back("g" + std::to_string(n) + "." + std::to_string(idx_in_gen++));
            }
        }
        prev_start += parents;
    }
    t.finalize();
    return t;
}

DirectedTree DirectedTree::from_spec(const TreeSpec& spec, int generation_cap) {
    switch (spec.kind) {
        case TreeSpec::Kind::path: return path(spec.depth);
        case TreeSpec::Kind::two_ray: return two_ray(spec.depth);
        case TreeSpec::Kind::generations: return from_generation_counts(spec.counts, generation_cap);
    }
    fail("unreachable tree kind");
}

std::vector<int> DirectedTree::generation(int n) const {
    if (n < 0 || n > frontier_depth_)
        fail("generation index " + std::to_string(n) + " outside horizon " +
             std::to_string(frontier_depth_));
    std::vector<int> out;
    for (int v = generation_start_[n]; v < generation_start_[n + 1]; ++v) out.push_back(v);
    return out;
}

std::vector<int> DirectedTree::generation_sizes() const {
    std::vector<int> sizes(frontier_depth_ + 1);
    for (int n = 0; n <= frontier_depth_; ++n)
        sizes[n] = generation_start_[n + 1] - generation_start_[n];
    return sizes;
}

int DirectedTree::branching_index() const {
    if (branching_.empty()) return 0;
    int max_depth = 0;
    for (int v : branching_) max_depth = std::max(max_depth, depth_[v]);
    return 1 + max_depth;
}

TreeSpec DirectedTree::derive_spec() const {
    TreeSpec spec;
    spec.depth = frontier_depth_;
    const std::vector<int> sizes = generation_sizes();
    const bool all_single = std::all_of(sizes.begin(), sizes.end(), [](int s) { return s == 1; });
    if (all_single) {
        spec.kind = TreeSpec::Kind::path;
        return spec;
    }
    bool two_ray_shape = sizes[0] == 1 && children_[0].size() == 2;
    for (std::size_t n = 1; n < sizes.size() && two_ray_shape; ++n)
        two_ray_shape = sizes[n] == 2;
    if (two_ray_shape)
        for (int v = 1; v < vertex_count() && two_ray_shape; ++v)
            two_ray_shape = is_frontier(v) || children_[v].size() == 1;
    if (two_ray_shape) {
        spec.kind = TreeSpec::Kind::two_ray;
        return spec;
    }
    spec.kind = TreeSpec::Kind::generations;
    spec.counts = sizes;
    return spec;
}

}  // namespace treeshift
