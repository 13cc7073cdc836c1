// Acceptance suite: one pass/fail line per criterion. Exits nonzero if
// any criterion fails. argv[1] is the path to the forge binary (used by
// the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forge/apps.hpp"
#include "forge/base_set.hpp"
#include "forge/bias.hpp"
#include "forge/graph.hpp"
#include "forge/io.hpp"
#include "forge/verifier.hpp"
#include "forge/wide_walk.hpp"

using namespace forge;

namespace {

int failures = 0;

void result(int criterion, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<GroupElement> elems(const GroupSpec& g, const std::vector<std::uint64_t>& idx) {
    std::vector<GroupElement> out;
    for (auto i : idx) out.push_back(element_of(g, i));
    return out;
}

LabeledExpander labeled_cayley(const GroupSpec& label_spec, const GroupSpec& vertex_group,
                               const std::vector<std::uint64_t>& gens,
                               const std::vector<std::uint64_t>& picks) {
    return label_with_picks(label_spec, build_cayley_graph(vertex_group, elems(vertex_group, gens)),
                            picks);
}

WideInstance make_instance(LabeledExpander gamma, std::uint32_t m, std::uint32_t s, std::uint32_t d2,
                           std::uint64_t t) {
    WideInstance inst;
    inst.gamma = std::move(gamma);
    inst.h = build_inner_graph_fixed_degree(m, s, d2).graph;
    inst.s = s;
    inst.m = m;
    inst.t = t;
    return inst;
}

WideCheckContext context_for(const WideInstance& inst) {
    WideCheckContext ctx;
    ctx.s = inst.s;
    ctx.m = inst.m;
    WeightedSet labels(inst.gamma.spec);
    for (auto l : inst.gamma.labels) labels.add_entry_index(l, 1.0);
    ctx.eps0 = bias_brute_force(labels).bias;
    ctx.lambda_gamma = second_eigenvalue(inst.gamma.graph).lambda;
    ctx.lambda_h = second_eigenvalue(inst.h).lambda;
    ctx.zeta = zeta_pseudorandomness(*inst.gamma.graph.local_inversion, inst.h, inst.s);
    return ctx;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Fixture {
        GroupSpec g;
        std::vector<std::uint64_t> gens;
    };
    std::vector<Fixture> fixtures{
        {GroupSpec({4}, 1), {1, 3}},
        {GroupSpec({5}, 1), {1, 2, 3, 4}},
        {GroupSpec({8}, 1), {1, 7, 2, 6}},
        {GroupSpec({12}, 1), {1, 11, 5, 7, 6, 6}},
        {GroupSpec({2}, 4), {1, 2, 4, 8}},
        {GroupSpec({2}, 6), {1, 2, 4, 8, 16, 32, 63, 21}},
        {GroupSpec({3}, 3), {1, 2, 3, 6, 9, 18, 13, 26}},
        {GroupSpec({6}, 2), {1, 5, 6, 30, 7, 35}},
        {GroupSpec({2, 8}, 1), {1, 7, 8, 9, 15}},
        {GroupSpec({17}, 1), {1, 16, 2, 15, 3, 14, 4, 13}},
        {GroupSpec({2}, 10), {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1023, 341}},
    };
    double worst = 0.0;
    bool ok = fixtures.size() >= 10;
    for (const auto& f : fixtures) {
        const RotationGraph graph = build_cayley_graph(f.g, elems(f.g, f.gens));
        const double lambda = second_eigenvalue(graph).lambda;
        WeightedSet gens_set(f.g);
        for (auto g : f.gens) gens_set.add_entry_index(g, 1.0);
        const double bias = bias_brute_force(gens_set).bias;
        worst = std::max(worst, std::abs(lambda - bias));
        ok = ok && std::abs(lambda - bias) <= 1e-8;
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 10.0;
    std::ostringstream os;
    os << "eigenvalue/bias duality on " << fixtures.size() << " Cayley fixtures, max |delta| = "
       << worst << ", " << dt << " s";
    result(1, ok, os.str());
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Fixture {
        LabeledExpander gamma;
        std::uint32_t t;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({labeled_cayley(GroupSpec({4}, 1), GroupSpec({8}, 1),
                                       {1, 7, 2, 6, 3, 5, 4}, {0, 1, 2, 3}),
                        4});
    fixtures.push_back({labeled_cayley(GroupSpec({5}, 1), GroupSpec({5}, 1), {1, 4, 2, 3},
                                       {0, 1, 2, 3, 4}),
                        4});
    fixtures.push_back({labeled_cayley(GroupSpec({3}, 1), GroupSpec({6}, 1), {1, 5, 2, 4, 3, 3},
                                       {0, 1, 2}),
                        6});
    fixtures.push_back({labeled_cayley(GroupSpec({4}, 1), GroupSpec({8}, 1),
                                       {0, 1, 2, 3, 4, 5, 6, 7}, {0, 1, 2, 0}),
                        4});
    fixtures.push_back({labeled_cayley(GroupSpec({2}, 1), GroupSpec({4}, 1), {1, 3, 2}, {0, 1}),
                        4});
    fixtures.push_back({labeled_cayley(GroupSpec({6}, 1), GroupSpec({12}, 1), {1, 11, 5, 7},
                                       {0, 1, 2, 3, 4, 5}),
                        3});
    bool ok = fixtures.size() >= 5;
    double worst_margin = -1.0;
    for (const auto& f : fixtures) {
        WeightedSet labels(f.gamma.spec);
        for (auto l : f.gamma.labels) labels.add_entry_index(l, 1.0);
        const double eps0 = bias_brute_force(labels).bias;
        const double lambda = second_eigenvalue(f.gamma.graph).lambda;
        const WeightedSet out = ordinary_walk_amplify(f.gamma, f.t);
        const double exact = bias_via_dft(out).bias;
        const double bound = ordinary_walk_bound(eps0, lambda, f.t);
        ok = ok && exact <= bound + 1e-9;
        worst_margin = std::max(worst_margin, exact - bound);
        // support accounting for the ordinary walk
        const double n_paths = f.gamma.graph.num_vertices *
                               std::pow(static_cast<double>(f.gamma.graph.degree), f.t);
        ok = ok && out.total_weight() == n_paths;
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0;
    std::ostringstream os;
    os << "ordinary-walk amplification bound on " << fixtures.size()
       << " fixtures, worst exact-bound margin = " << worst_margin << ", " << dt << " s";
    result(2, ok, os.str());
}

struct WideFixture {
    WideInstance inst;
    const char* name;
};

std::vector<WideFixture> wide_fixtures() {
    std::vector<WideFixture> out;
    GroupSpec z4({4}, 1);
    out.push_back({make_instance(labeled_cayley(z4, z4, {0, 1, 2, 3}, {0, 1, 2, 3}), 2, 2, 8, 4),
                   "Z4 s=2 D2=8"});
    out.push_back({make_instance(labeled_cayley(z4, z4, {0, 1, 2, 3}, {0, 1, 2, 3}), 2, 3, 64, 3),
                   "Z4 s=3 mixing"});
    GroupSpec z9({9}, 1);
    GroupSpec z3({3}, 1);
    out.push_back({make_instance(labeled_cayley(z3, z9, {1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 2}), 3, 2,
                                 4, 4),
                   "Z3/Z9 s=2 D2=4"});
    return out;
}

void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    for (const auto& [inst, name] : wide_fixtures()) {
        const WideCheckContext ctx = context_for(inst);
        ok = ok && ctx.zeta <= 1e-12;
        const std::uint64_t dim =
            static_cast<std::uint64_t>(inst.gamma.graph.num_vertices) * inst.h.num_vertices;
        ok = ok && dim <= 1024;
        ok = ok && (inst.s == 2 || inst.s == 3);
        const GroupSpec& spec = inst.gamma.spec;
        double worst_norm = 0.0, bound = 0.0;
        for (std::uint64_t a = 1; a < spec.order(); ++a) {
            const NormCheck nc =
                check_wide_norm(Character{spec, element_of(spec, a)}, inst.gamma, inst.h, ctx);
            ok = ok && nc.ok;
            worst_norm = std::max(worst_norm, nc.value);
            bound = nc.bound;
        }
        // exact walk bias against the powered block bound
        const double bias = transfer_bias_all(inst.gamma, inst.h, inst.s, inst.t).bias;
        const double powered = std::pow(std::min(1.0, bound), static_cast<double>(inst.t / inst.s));
        ok = ok && bias <= powered + 1e-9;
        detail << name << " norm " << worst_norm << " <= " << bound << "; ";
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 120.0;
    std::ostringstream os;
    os << "wide-walk block norm bound: " << detail.str() << dt << " s";
    result(3, ok, os.str());
}

void criterion_4() {
    bool ok = true;
    double worst = 0.0;
    for (const auto& [inst, name] : wide_fixtures()) {
        double paths = static_cast<double>(inst.gamma.graph.num_vertices) * inst.h.num_vertices;
        for (std::uint64_t i = 0; i < inst.t; ++i) paths *= inst.h.degree;
        if (paths > 1e6) continue; // enumeration oracle applies below a million paths
        const WeightedSet out = materialize_walk_outputs(inst);
        const auto mags = char_sum_magnitudes(out);
        const GroupSpec& spec = inst.gamma.spec;
        for (std::uint64_t a = 0; a < spec.order(); ++a) {
            const double via_transfer =
                transfer_bias(Character{spec, element_of(spec, a)}, inst.gamma, inst.h, inst.s, inst.t);
            worst = std::max(worst, std::abs(via_transfer - mags[a]));
            ok = ok && std::abs(via_transfer - mags[a]) <= 1e-9;
        }
    }
    // an extra Z6-labeled instance keeps a composite group in the sweep
    GroupSpec z6({6}, 1);
    const WideInstance extra = make_instance(
        labeled_cayley(z6, z6, {1, 5, 2, 4}, {0, 1, 2, 3, 4, 5}), 2, 2, 4, 3);
    const WeightedSet out = materialize_walk_outputs(extra);
    const auto mags = char_sum_magnitudes(out);
    for (std::uint64_t a = 0; a < z6.order(); ++a) {
        const double via_transfer =
            transfer_bias(Character{z6, element_of(z6, a)}, extra.gamma, extra.h, extra.s, extra.t);
        worst = std::max(worst, std::abs(via_transfer - mags[a]));
        ok = ok && std::abs(via_transfer - mags[a]) <= 1e-9;
    }
    std::ostringstream os;
    os << "transfer evaluator vs path enumeration per character, max |delta| = " << worst;
    result(4, ok, os.str());
}

void criterion_5() {
    bool ok = true;
    double worst = 0.0;
    for (std::uint32_t m : {1u, 2u, 3u}) {
        for (std::uint32_t s : {2u, 3u}) {
            for (std::uint32_t d2 : {4u, 8u}) {
                const InnerGraph h = build_inner_graph_fixed_degree(m, s, d2);
                const std::uint32_t d1 = 1u << m;
                std::vector<std::uint32_t> identity(d1), swap_pairs(d1), negation(d1);
                for (std::uint32_t i = 0; i < d1; ++i) {
                    identity[i] = i;
                    swap_pairs[i] = i ^ 1u;
                    negation[i] = (d1 - i) % d1;
                }
                for (const auto& phi : {identity, swap_pairs, negation}) {
                    const double zeta = zeta_pseudorandomness(phi, h.graph, s);
                    worst = std::max(worst, zeta);
                    ok = ok && zeta <= 1e-12;
                }
            }
        }
    }
    std::ostringstream os;
    os << "default inner graphs are exactly pseudorandom (m <= 3, s <= 3, D2 <= 8), max zeta = "
       << worst;
    result(5, ok, os.str());
}

struct BuildRecord {
    GroupSpec group;
    double epsilon;
    BuildResult r;
};

std::vector<BuildRecord>& all_builds() {
    static std::vector<BuildRecord> builds;
    return builds;
}

void criterion_6_7_8() {
    bool support_ok = true;  // criterion 6
    bool bias_ok = true;     // criterion 7 exact-bias part
    bool monotone_ok = true; // criterion 7 size part
    bool size_vs_asym_ok = true;
    bool xor_ok = true; // criterion 8
    double worst_bias_margin = -1.0;

    for (const GroupSpec& g : {GroupSpec({2}, 1), GroupSpec({2}, 2), GroupSpec({3}, 1),
                               GroupSpec({3}, 2), GroupSpec({6}, 1), GroupSpec({6}, 2)}) {
        double prev_size = -1.0;
        for (double eps : {0.2, 0.1, 0.05}) {
            BuildRecord rec{g, eps, build_biased_set(g, eps)};
            const BuildReport& rep = rec.r.report;

            // criterion 6: walk-output accounting
            double expect = static_cast<double>(rep.n1) * rep.n2;
            for (std::uint64_t i = 0; i < rep.plan.t; ++i) expect *= rep.d2;
            support_ok = support_ok && rep.support_pre_merge == static_cast<std::uint64_t>(expect);
            if (rep.materialized) {
                support_ok = support_ok && rec.r.set.total_weight() == expect;
            }

            // criterion 7: oracle-verified bias
            bias_ok = bias_ok && rep.materialized && rep.exact_bias <= eps + 1e-9;
            if (rep.materialized) {
                const double oracle = bias_via_dft(rec.r.set).bias;
                bias_ok = bias_ok && oracle <= eps + 1e-9;
                worst_bias_margin = std::max(worst_bias_margin, oracle - eps);
            }

            // criterion 7: size growth as epsilon shrinks, and never above
            // the asymptotic schedule's (lower-bounded) size
            const double size = rep.support_log2;
            monotone_ok = monotone_ok && size >= prev_size - 1e-12;
            prev_size = size;
            const WalkPlan asym = plan_parameters(eps, PlanMode::asymptotic);
            size_vs_asym_ok = size_vs_asym_ok && size <= asym.support_log2(asym.m + 1.0);

            // criterion 8: distance to uniform vs bias * sqrt(|G|^n)
            if (g.order() <= (1ull << 16) && rep.materialized) {
                xor_ok = xor_ok && xor_lemma_check(rec.r.set).ok;
            }
            all_builds().push_back(std::move(rec));
        }
    }

    result(6, support_ok, "pre-merge support equals N1*N2*D2^t on every run");
    std::ostringstream os7;
    os7 << "end-to-end builds over {Z2,Z3,Z6} x n<=2 x eps in {0.2,0.1,0.05}: exact bias within "
           "target (worst margin "
        << worst_bias_margin << "), sizes non-decreasing and below the asymptotic schedule";
    result(7, bias_ok && monotone_ok && size_vs_asym_ok, os7.str());
    result(8, xor_ok, "statistical distance <= bias * sqrt(|G|^n) for every built set");
}

void criterion_9() {
    GroupSpec g(std::vector<std::uint32_t>{2}, 6);
    const KwiseResult r = build_kwise(g, 2, 0.25);
    const KwiseCheck check = kwise_check(r.set, 2);
    const bool ok = check.max_restriction_distance <= 0.25 + 1e-9 && check.ok;
    std::ostringstream os;
    os << "k-wise sample space (Z2, n=6, k=2): max restriction distance "
       << check.max_restriction_distance << " <= 0.25 over all 15 index pairs";
    result(9, ok, os.str());
}

MatrixTriple fixture_matrices(std::uint32_t n, std::uint32_t q, std::uint64_t seed, bool correct) {
    MatrixTriple t;
    t.n = n;
    t.q = q;
    t.algebra = MatrixTriple::Algebra::ring_zq;
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    t.a.resize(cells);
    t.b.resize(cells);
    std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
    const auto next = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<std::uint32_t>((state >> 33) % q);
    };
    for (auto& v : t.a) v = next();
    for (auto& v : t.b) v = next();
    t.c.assign(cells, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t k = 0; k < n; ++k) {
            const std::uint64_t aik = t.a[static_cast<std::size_t>(i) * n + k];
            for (std::uint32_t j = 0; j < n; ++j) {
                auto& cell = t.c[static_cast<std::size_t>(i) * n + j];
                cell = static_cast<std::uint32_t>(
                    (cell + aik * t.b[static_cast<std::size_t>(k) * n + j]) % q);
            }
        }
    }
    if (!correct) t.c[cells - 1] = (t.c[cells - 1] + 1 + seed % (q - 1)) % q;
    return t;
}

void criterion_10() {
    bool soundness_ok = true;
    bool completeness_ok = true;
    std::ostringstream detail;
    for (std::uint32_t q : {2u, 3u, 5u}) {
        const GroupSpec g({q}, 8);
        const BuildResult samples = build_biased_set(g, 0.1);
        const double alpha = samples.report.exact_bias;
        const MatrixTriple bad = fixture_matrices(8, q, 41 + q, false);
        const FreivaldsResult sweep = freivalds_sweep(bad, samples.set);
        const double detect = sweep.detecting_weight / sweep.total_weight;
        soundness_ok = soundness_ok && sweep.verdict == Verdict::reject &&
                       detect >= 1.0 - 1.0 / q - alpha - 1e-12;
        detail << "q=" << q << " detect " << detect << " >= " << 1.0 - 1.0 / q - alpha << "; ";
    }
    // completeness is exact modular arithmetic, so any sample set works;
    // small deterministic ones keep the hundred sweeps quick
    std::uint64_t seed = 0;
    for (std::uint32_t rep = 0; rep < 100; ++rep) {
        const std::uint32_t q = rep % 3 == 0 ? 2 : (rep % 3 == 1 ? 3 : 5);
        const GroupSpec g({q}, 8);
        WeightedSet samples(g);
        for (std::uint64_t i = 0; i < 64; ++i) {
            samples.add_entry_index((i * 2654435761ull + rep) % g.order(), 1.0);
        }
        const MatrixTriple good = fixture_matrices(8, q, ++seed, true);
        completeness_ok =
            completeness_ok && freivalds_sweep(good, samples).verdict == Verdict::accept;
    }
    std::ostringstream os;
    os << "matrix-product verification: " << detail.str()
       << "completeness on 100 deterministic fixtures";
    result(10, soundness_ok && completeness_ok, os.str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion_11(const std::string& forge_bin) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "forge_acceptance";
    fs::create_directories(dir);
    const std::string group_path = (dir / "g.json").string();
    io::write_group(GroupSpec({6}, 2), group_path);

    bool ok = true;
    std::string sets[2], reports[2];
    for (int run = 0; run < 2; ++run) {
        const std::string set_path = (dir / ("s" + std::to_string(run) + ".wset")).string();
        const std::string rep_path = (dir / ("r" + std::to_string(run) + ".json")).string();
        std::ostringstream cmd;
        cmd << forge_bin << " build --group " << group_path << " --epsilon 0.1 --out " << set_path
            << " --report " << rep_path << " > /dev/null";
        ok = ok && std::system(cmd.str().c_str()) == 0;
        sets[run] = slurp(set_path);
        reports[run] = slurp(rep_path);
    }
    ok = ok && !sets[0].empty() && sets[0] == sets[1] && reports[0] == reports[1];
    result(11, ok, "two consecutive pipeline runs produce byte-identical set files and reports");
}

} // namespace

int main(int argc, char** argv) {
    const std::string forge_bin = argc > 1 ? argv[1] : "./forge";
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6_7_8();
        criterion_9();
        criterion_10();
        criterion_11(forge_bin);
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", failures);
    return 1;
}
