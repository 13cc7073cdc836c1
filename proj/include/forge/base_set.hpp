#pragma once

#include <cstdint>

#include "forge/graph.hpp"
#include "forge/group.hpp"

namespace forge {

/// An expander whose vertices carry group elements. Labels cycle through
/// the base multiset a whole number of times, so the label multiset has
/// exactly the base multiset's bias.
struct LabeledExpander {
    GroupSpec spec;
    RotationGraph graph;
    std::vector<std::uint64_t> labels; // element indices, size num_vertices

    GroupElement label_element(std::uint32_t v) const { return element_of(spec, labels[v]); }
};

/// Deterministic constant-bias base multiset with certified bias <=
/// target_bias (default 0.1). Greedy potential-minimizing selection over
/// the group, exact certification at every size. Bias <= target < 1
/// implies the multiset generates G^n.
struct BaseSetResult {
    WeightedSet set;                 // merged multiset
    std::vector<std::uint64_t> picks; // flat pick sequence, drives vertex labeling
    double certified_bias = 0.0;
};

BaseSetResult build_base_set(const GroupSpec& group, double target_bias = 0.1, const Caps& caps = {});

/// Identify a base pick sequence with the vertices of `graph` by cycling:
/// vertex v gets picks[v mod |picks|]. Requires |V| to be a multiple of
/// the pick count, which keeps the label bias equal to the base bias.
LabeledExpander label_with_picks(const GroupSpec& spec, const RotationGraph& graph,
                                 const std::vector<std::uint64_t>& picks);

/// All N * D^t outputs of t-step walks (start vertex x port sequence),
/// each path contributing its label sum with weight 1. Merged by element.
WeightedSet ordinary_walk_amplify(const LabeledExpander& base, std::uint32_t t, const Caps& caps = {});

/// (eps0 + 2*lambda)^floor(t/2), the per-two-step amplification bound of
/// the plain expander walk.
double ordinary_walk_bound(double eps0, double lambda, std::uint32_t t);

/// True once the multiset generates the full group (breadth-first closure
/// over sums); equivalent to bias < 1 but testable independently.
bool generates_group(const WeightedSet& set, const Caps& caps = {});

} // namespace forge
