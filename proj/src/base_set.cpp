#include "forge/base_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "forge/bias.hpp"

namespace forge {

namespace {

constexpr std::uint64_t kGreedyOrderLimit = 512;

/// Greedy growth over the whole group with an exact character-sum table.
/// The pick rule minimizes the fourth moment of the character sums (the
/// max norm ties everywhere, since most characters are unmoved by any
/// single pick), with ties broken toward the smaller element. The rule
/// does not depend on the target, so runs with different targets produce
/// nested pick sequences.
BaseSetResult greedy_base(const GroupSpec& group, double target_bias) {
    const std::uint64_t order = group.order();
    const std::uint32_t dk = group.largest_factor();
    std::vector<cplx> roots(dk);
    for (std::uint32_t r = 0; r < dk; ++r) {
        roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / dk);
    }
    roots[0] = cplx(1.0, 0.0);

    // full exponent table: e[a * order + g] with chi_a(g) = omega_dk^e
    std::vector<std::uint16_t> expo(order * order);
#pragma omp parallel for schedule(static)
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(order); ++a) {
        for (std::uint64_t g = 0; g < order; ++g) {
            expo[static_cast<std::uint64_t>(a) * order + g] =
                static_cast<std::uint16_t>(char_exponent(group, a, g));
        }
    }

    std::vector<cplx> sums(order, cplx(0.0, 0.0));
    std::vector<std::uint64_t> picks;
    const std::uint64_t pick_cap = 4 * order;
    double best_bias = 1.0;

    while (picks.size() < pick_cap) {
        std::vector<double> score(order);
#pragma omp parallel for schedule(static)
        for (std::int64_t g = 0; g < static_cast<std::int64_t>(order); ++g) {
            double fourth = 0.0;
            for (std::uint64_t a = 1; a < order; ++a) {
                const cplx z = sums[a] + roots[expo[a * order + g]];
                const double sq = z.real() * z.real() + z.imag() * z.imag();
                fourth += sq * sq;
            }
            score[g] = fourth;
        }
        std::uint64_t pick = 0;
        for (std::uint64_t g = 1; g < order; ++g) {
            if (score[g] < score[pick]) pick = g;
        }
        for (std::uint64_t a = 0; a < order; ++a) sums[a] += roots[expo[a * order + pick]];
        picks.push_back(pick);

        double bias = 0.0;
        for (std::uint64_t a = 1; a < order; ++a) bias = std::max(bias, std::abs(sums[a]));
        bias /= static_cast<double>(picks.size());
        best_bias = std::min(best_bias, bias);
        if (bias <= target_bias) {
            BaseSetResult out;
            out.picks = picks;
            WeightedSet set(group);
            for (auto p : picks) set.add_entry_index(p, 1.0);
            out.set = set.merged();
            out.certified_bias = bias;
            return out;
        }
    }
    // the greedy budget ran out; the uniform group itself still certifies
    BaseSetResult full;
    full.picks.resize(order);
    WeightedSet set(group);
    for (std::uint64_t i = 0; i < order; ++i) {
        full.picks[i] = i;
        set.add_entry_index(i, 1.0);
    }
    full.set = std::move(set);
    full.certified_bias = bias_brute_force(full.set).bias;
    if (full.certified_bias <= target_bias) return full;
    std::ostringstream os;
    os << "base-set search budget exhausted at " << pick_cap << " picks; best bias "
       << std::min(best_bias, full.certified_bias) << ", target " << target_bias;
    throw capacity_error(os.str());
}

BaseSetResult full_group_base(const GroupSpec& group, const Caps& caps) {
    BaseSetResult out;
    out.picks.resize(group.order());
    WeightedSet set(group);
    for (std::uint64_t i = 0; i < group.order(); ++i) {
        out.picks[i] = i;
        set.add_entry_index(i, 1.0);
    }
    out.set = std::move(set);
    out.certified_bias = bias_via_dft(out.set, caps).bias;
    return out;
}

} // namespace

BaseSetResult build_base_set(const GroupSpec& group, double target_bias, const Caps& caps) {
    if (target_bias <= 0.0 || target_bias >= 1.0) {
        throw domain_error("base-set bias target must lie in (0,1)");
    }
    if (group.order() <= kGreedyOrderLimit) {
        return greedy_base(group, target_bias);
    }
    if (group.order() <= caps.dft_cap) {
        // beyond the greedy budget the uniform group itself is the certified
        // fallback; bias is 0 up to rounding
        BaseSetResult out = full_group_base(group, caps);
        if (out.certified_bias <= target_bias) return out;
        throw capacity_error("full-group fallback failed certification (unexpected)");
    }
    std::ostringstream os;
    os << "base-set construction needs |G|^n = " << group.order() << " within dft_cap = " << caps.dft_cap;
    throw capacity_error(os.str());
}

LabeledExpander label_with_picks(const GroupSpec& spec, const RotationGraph& graph,
                                 const std::vector<std::uint64_t>& picks) {
    if (picks.empty()) throw domain_error("empty base pick sequence");
    if (graph.num_vertices % picks.size() != 0) {
        std::ostringstream os;
        os << "vertex count " << graph.num_vertices << " is not a multiple of the base size "
           << picks.size();
        throw structural_error(os.str());
    }
    LabeledExpander out;
    out.spec = spec;
    out.graph = graph;
    out.labels.resize(graph.num_vertices);
    for (std::uint32_t v = 0; v < graph.num_vertices; ++v) {
        out.labels[v] = picks[v % picks.size()];
    }
    return out;
}

WeightedSet ordinary_walk_amplify(const LabeledExpander& base, std::uint32_t t, const Caps& caps) {
    const RotationGraph& g = base.graph;
    const GroupSpec& spec = base.spec;
    if (base.labels.size() != g.num_vertices) throw structural_error("label table has wrong length");
    double paths_est = static_cast<double>(g.num_vertices);
    for (std::uint32_t i = 0; i < t; ++i) paths_est *= g.degree;
    if (paths_est > static_cast<double>(caps.walk_enum_cap)) {
        std::ostringstream os;
        os << "ordinary walk needs N*D^t = " << paths_est << " within walk_enum_cap = "
           << caps.walk_enum_cap;
        throw capacity_error(os.str());
    }
    if (spec.order() > caps.enum_cap) {
        throw capacity_error("ordinary walk output merge needs |G|^n within enum_cap");
    }

    const std::uint64_t order = spec.order();
    const int threads = omp_get_max_threads();
    std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(order, 0));

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t start = 0; start < static_cast<std::int64_t>(g.num_vertices); ++start) {
        auto& local = counts[omp_get_thread_num()];
        // depth-first over port sequences, carrying the partial label sum
        struct Frame {
            std::uint32_t vertex;
            std::uint64_t sum;
            std::uint32_t port;
        };
        std::vector<Frame> stack(t + 1);
        stack[0] = {static_cast<std::uint32_t>(start), base.labels[start], 0};
        std::uint32_t depth = 0;
        while (true) {
            if (depth == t) {
                local[stack[depth].sum] += 1;
                if (depth == 0) break;
                --depth;
                continue;
            }
            Frame& f = stack[depth];
            if (f.port == g.degree) {
                if (depth == 0) break;
                --depth;
                continue;
            }
            const std::uint32_t next = g.neighbor(f.vertex, f.port);
            ++f.port;
            stack[depth + 1] = {next, spec.add(f.sum, base.labels[next]), 0};
            ++depth;
        }
    }

    WeightedSet out(spec);
    for (std::uint64_t x = 0; x < order; ++x) {
        std::uint64_t c = 0;
        for (int th = 0; th < threads; ++th) c += counts[th][x];
        if (c > 0) out.add_entry_index(x, static_cast<double>(c));
    }
    return out;
}

double ordinary_walk_bound(double eps0, double lambda, std::uint32_t t) {
    const double per_two = std::min(1.0, eps0 + 2.0 * lambda);
    return std::pow(per_two, static_cast<double>(t / 2));
}

bool generates_group(const WeightedSet& set, const Caps& caps) {
    const GroupSpec& spec = set.spec();
    if (spec.order() > caps.enum_cap) throw capacity_error("generation check needs |G|^n within enum_cap");
    std::vector<char> seen(spec.order(), 0);
    std::vector<std::uint64_t> frontier{0};
    seen[0] = 1;
    std::uint64_t visited = 1;
    while (!frontier.empty()) {
        std::vector<std::uint64_t> next;
        for (auto x : frontier) {
            for (const auto& [gidx, w] : set.entries()) {
                const std::uint64_t y = spec.add(x, gidx);
                if (!seen[y]) {
                    seen[y] = 1;
                    ++visited;
                    next.push_back(y);
                }
            }
        }
        frontier = std::move(next);
    }
    return visited == spec.order();
}

} // namespace forge
