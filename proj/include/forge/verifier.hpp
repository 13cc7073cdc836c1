#pragma once

#include <cstdint>

#include "forge/base_set.hpp"
#include "forge/bias.hpp"
#include "forge/graph.hpp"
#include "forge/group.hpp"

namespace forge {

/// Exact |E chi(walk output)| for one character, evaluated by pushing one
/// N1*N2 vector through the diagonal/step/inner-walk operator chain.
/// Matches path enumeration to 1e-9 at a cost of O(t * N1*N2 * (D2+1)).
double transfer_bias(const Character& chi, const LabeledExpander& gamma, const RotationGraph& h,
                     std::uint32_t s, std::uint64_t t);

/// Max of transfer_bias over all nontrivial characters; the exact bias of
/// the walk distribution without enumerating paths. Parallel over
/// characters.
BiasResult transfer_bias_all(const LabeledExpander& gamma, const RotationGraph& h, std::uint32_t s,
                             std::uint64_t t, const Caps& caps = {});

struct NormCheck {
    double value = 0.0;
    double bound = 1.0;
    bool ok = false;
    bool skipped = false; // trivial character, or cap exceeded
};

/// Dense operator norm of (Pi Gamma)^2 against the two-step amplification
/// bound eps0 + 2*lambda. Trivial characters are reported but not bounded.
NormCheck check_pi_gamma_squared(const Character& chi, const LabeledExpander& gamma, const Caps& caps = {});

/// Inputs the wide-norm check needs beyond the graphs themselves.
struct WideCheckContext {
    std::uint32_t s = 0;
    std::uint32_t m = 0;
    double eps0 = 0.0;
    double lambda_gamma = 1.0;
    double lambda_h = 1.0;
    double zeta = 0.0;
};

/// Dense norm of the s-fold product L_{s-1}...L_0 of per-step operators
/// against the headline block bound. Requires the plan hypothesis
/// eps0 + 2*lambda_gamma <= lambda_h^2.
NormCheck check_wide_norm(const Character& chi, const LabeledExpander& gamma, const RotationGraph& h,
                          const WideCheckContext& ctx, const Caps& caps = {});

struct LemmaCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// Statistical distance to uniform against bias * sqrt(|G|^n).
LemmaCheck xor_lemma_check(const WeightedSet& dist, const Caps& caps = {});

struct KwiseCheck {
    double max_restriction_distance = 0.0;
    double bound = 0.0;
    bool ok = false;
    std::vector<std::uint32_t> worst_indices;
};

/// Max over size-k index sets of the restriction's distance to uniform,
/// against bias * sqrt(|G|^k).
KwiseCheck kwise_check(const WeightedSet& dist, std::uint32_t k, const Caps& caps = {});

} // namespace forge
