#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "forge/base_set.hpp"
#include "forge/graph.hpp"
#include "forge/group.hpp"

namespace forge {

enum class PlanMode { asymptotic, desk_search };

std::string to_string(PlanMode m);

/// Parameter bundle for one wide replacement run. Asymptotic plans follow
/// the schedule formulas and may carry degrees too large to realize (they
/// exist for inspection and size comparison); desk plans are built
/// against certified spectral quantities.
struct WalkPlan {
    double epsilon = 0.0;
    double alpha = 0.0;   // 1/s
    std::uint32_t s = 0;  // width
    std::uint32_t m = 0;  // D1 = 2^m
    std::uint32_t log2_d2 = 0;
    std::uint64_t d2 = 0; // 0 when 2^log2_d2 exceeds 64 bits
    double b2 = 0.0;
    double lambda_h_target = 1.0;
    double lambda_gamma_target = 1.0;
    std::uint64_t t = 0;
    PlanMode mode = PlanMode::desk_search;
    bool degenerate = false; // t = 0, walk outputs are the lifted base set

    /// log2(D1), exact; D1 itself may not fit in 64 bits.
    std::uint32_t log2_d1() const { return m; }
    /// log2 of the pre-merge output support N1*N2*D2^t.
    double support_log2(double log2_n1) const;
};

/// Asymptotic-schedule plan: s from the epsilon cube-root formula
/// (clamped so the walk-length rule is satisfiable), D2 the least power
/// of two at least s^{4s}, D1 = D2^4, t minimal for the target.
WalkPlan plan_parameters(double epsilon, PlanMode mode);

/// State of the product walk: outer vertex, inner vertex (s-tuple over
/// [D1] packed in m-bit blocks, little-endian within block), clock.
struct WideProductState {
    std::uint32_t outer = 0;
    std::uint64_t inner = 0;
    std::uint64_t clock = 0;

    std::uint32_t tuple_coord(std::uint32_t ell, std::uint32_t m) const {
        return static_cast<std::uint32_t>((inner >> (static_cast<std::uint64_t>(ell) * m)) & ((1ull << m) - 1));
    }
};

/// One step: intra-cloud move in H by `port`, then inter-cloud move in
/// Gamma by the clock-selected tuple coordinate, then the local inversion
/// applied to that coordinate.
WideProductState wide_step(const WideProductState& state, std::uint32_t port, const RotationGraph& gamma,
                           const RotationGraph& h, std::uint32_t m, std::uint32_t s);

/// Max over port sequences in [D2]^s of the L1 distance between the
/// induced outer-instruction distribution and Unif([D1]^s). Requires h to
/// carry a local inversion (its port maps are then permutations).
double zeta_pseudorandomness(const std::vector<std::uint32_t>& gamma_phi, const RotationGraph& h,
                             std::uint32_t s, const Caps& caps = {});

namespace serial_ref {
double zeta_pseudorandomness(const std::vector<std::uint32_t>& gamma_phi, const RotationGraph& h,
                             std::uint32_t s, const Caps& caps = {});
} // namespace serial_ref

/// Per-s-block norm bound assembled from certified quantities, following
/// the three-term decomposition (leading H-contraction, boundary terms,
/// and the imitated outer-walk terms):
///   lamH^s + s*lamH^{s-1}
///   + sum_{0<=i<j<s} lamH^{i+s-1-j} * ((eps0 + 2*lamG)^{floor((j-i)/2)} + zeta).
/// Valid whenever the inner graph is zeta-pseudorandom for the outer
/// inversion; no further hypothesis needed.
double wide_block_bound_sharp(std::uint32_t s, double lambda_h, double lambda_gamma, double eps0, double zeta);

/// Headline form lamH^s + s*lamH^{s-1} + s^2*(lamH^{s-2} + zeta); valid
/// under the hypothesis eps0 + 2*lambda_gamma <= lambda_h^2.
double wide_block_bound_simplified(std::uint32_t s, double lambda_h, double zeta);

/// A fully constructed wide-product instance.
struct WideInstance {
    LabeledExpander gamma;
    RotationGraph h;
    std::uint32_t s = 0;
    std::uint32_t m = 0;
    std::uint64_t t = 0;
};

/// Streaming enumeration of all N1*N2*D2^t walk outputs in lexicographic
/// (start vertex, port sequence) order. The sink receives (element index,
/// multiplicity 1) once per path.
void for_each_walk_output(const WideInstance& inst, const std::function<void(std::uint64_t)>& sink);

/// Materialized, element-merged walk output multiset (weights are path
/// multiplicities). Requires the path count within caps.walk_enum_cap and
/// the group order within caps.enum_cap.
WeightedSet materialize_walk_outputs(const WideInstance& inst, const Caps& caps = {});

namespace serial_ref {
WeightedSet materialize_walk_outputs(const WideInstance& inst, const Caps& caps = {});
} // namespace serial_ref

/// Everything a run certifies, reports, and checks.
struct BuildReport {
    WalkPlan plan;
    std::uint32_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t d2 = 0;
    std::string outer_family;
    std::uint64_t base_size = 0;
    double eps0 = 0.0;
    double lambda_gamma = 1.0;
    double lambda_h = 1.0;
    double zeta = 0.0;
    std::string zeta_source; // "exhaustive" or "affine-structure"
    SpectralCert gamma_cert, h_cert;
    bool hypothesis_ok = false;     // eps0 + 2*lambda_gamma <= lambda_h^2
    double bound_block_sharp = 1.0; // per-s-block bound, sharp form
    double bound_block_simplified = 1.0;
    double bias_bound = 1.0; // whole-run certified bound (eps0 when degenerate)
    double exact_bias = -1.0;
    std::string exact_bias_method; // "dft-oracle", "transfer", or "" when uncomputed
    std::uint64_t support_pre_merge = 0; // 0 when beyond 64 bits
    double support_log2 = 0.0;
    std::uint64_t support_merged = 0;
    bool materialized = false;
};

struct BuildResult {
    WeightedSet set; // empty unless report.materialized
    BuildReport report;
    WideInstance instance;
};

/// The whole pipeline: base set, plan, graphs, walk, certification and
/// (caps permitting) exact-bias verification against the oracle.
BuildResult build_biased_set(const GroupSpec& group, double epsilon, PlanMode mode = PlanMode::desk_search,
                             const Caps& caps = {});

} // namespace forge
