// Command-line front end: deterministic construction and verification of
// expanding generating sets over finite abelian groups, plus the two
// sample-space applications.

#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forge/apps.hpp"
#include "forge/bias.hpp"
#include "forge/io.hpp"
#include "forge/verifier.hpp"
#include "forge/wide_walk.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CheckRow {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

json rows_to_json(const std::vector<CheckRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json e;
        e["check"] = r.name;
        e["value"] = r.value;
        e["bound"] = r.bound;
        e["tolerance"] = r.tolerance;
        e["ok"] = r.ok;
        arr.push_back(e);
    }
    return arr;
}

forge::PlanMode parse_mode(const std::string& mode) {
    if (mode == "asymptotic") return forge::PlanMode::asymptotic;
    if (mode == "desk" || mode == "desk-search") return forge::PlanMode::desk_search;
    throw forge::domain_error("mode must be 'desk' or 'asymptotic'");
}

std::vector<std::uint64_t> picks_from_set(const forge::WeightedSet& set) {
    std::vector<std::uint64_t> picks;
    for (const auto& [idx, w] : set.entries()) {
        const double r = std::round(w);
        if (std::abs(w - r) > 1e-9 || r < 1.0) {
            throw forge::domain_error("base multiset weights must be positive integers for labeling");
        }
        for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(r); ++c) picks.push_back(idx);
    }
    return picks;
}

int run(int argc, char** argv) {
    CLI::App app{"epsilon-biased generating sets over finite abelian groups"};
    app.require_subcommand(1);

    forge::Caps caps;
    app.add_option("--enum-cap", caps.enum_cap, "brute-force enumeration cap on |G|^n");
    app.add_option("--dft-cap", caps.dft_cap, "transform-path cap on |G|^n");
    app.add_option("--dense-norm-cap", caps.dense_norm_cap, "dense operator-norm dimension cap");
    app.add_option("--walk-enum-cap", caps.walk_enum_cap, "materialized walk output cap");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "print the parameter schedule for a target bias");
    double plan_eps = 0.1;
    std::string plan_mode = "asymptotic";
    std::string plan_group;
    std::string plan_report;
    plan_cmd->add_option("--epsilon", plan_eps, "target bias")->required();
    plan_cmd->add_option("--mode", plan_mode, "asymptotic or desk");
    plan_cmd->add_option("--group", plan_group, "group file (required for desk mode)");
    plan_cmd->add_option("--report", plan_report, "write the plan as JSON");

    // base-set
    auto* base_cmd = app.add_subcommand("base-set", "construct the constant-bias base multiset");
    std::string base_group, base_out, base_report;
    double base_target = 0.1;
    base_cmd->add_option("--group", base_group, "group file")->required();
    base_cmd->add_option("--out", base_out, "output weighted-set file")->required();
    base_cmd->add_option("--target", base_target, "bias target (default 0.1)");
    base_cmd->add_option("--report", base_report, "report file");

    // amplify
    auto* amp_cmd = app.add_subcommand("amplify", "expander-walk amplification of a base multiset");
    std::string amp_group, amp_base, amp_graph, amp_out, amp_report, amp_mode = "ordinary";
    std::uint32_t amp_t = 2, amp_degree = 8;
    amp_cmd->add_option("--mode", amp_mode, "walk mode (ordinary)");
    amp_cmd->add_option("--group", amp_group, "group file")->required();
    amp_cmd->add_option("--base", amp_base, "base weighted-set file")->required();
    amp_cmd->add_option("--graph", amp_graph, "rotation-graph file (default: searched Cayley expander)");
    amp_cmd->add_option("--t", amp_t, "walk length")->required();
    amp_cmd->add_option("--degree", amp_degree, "expander degree when searching");
    amp_cmd->add_option("--out", amp_out, "output weighted-set file")->required();
    amp_cmd->add_option("--report", amp_report, "report file");

    // build
    auto* build_cmd = app.add_subcommand("build", "full pipeline: base set plus wide replacement walk");
    std::string build_group, build_out, build_report_path, build_mode = "desk";
    double build_eps = 0.1;
    build_cmd->add_option("--group", build_group, "group file")->required();
    build_cmd->add_option("--epsilon", build_eps, "target bias")->required();
    build_cmd->add_option("--mode", build_mode, "desk or asymptotic");
    build_cmd->add_option("--out", build_out, "output weighted-set file");
    build_cmd->add_option("--report", build_report_path, "report file");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verification checks on a weighted set");
    std::string ver_set, ver_group, ver_report;
    double ver_eps = -1.0;
    bool ver_full = false, ver_transfer = false, ver_norms = false;
    verify_cmd->add_option("--set", ver_set, "weighted-set file")->required();
    verify_cmd->add_option("--group", ver_group, "group file")->required();
    verify_cmd->add_option("--epsilon", ver_eps, "claimed bias to check against");
    verify_cmd->add_flag("--full", ver_full, "all checks including transfer and norms");
    verify_cmd->add_flag("--transfer", ver_transfer, "transfer-evaluator cross-check (rebuilds the run)");
    verify_cmd->add_flag("--norms", ver_norms, "operator-norm theorem checks (rebuilds the run)");
    verify_cmd->add_option("--report", ver_report, "report file");

    // kwise
    auto* kwise_cmd = app.add_subcommand("kwise", "almost k-wise independent sample space");
    std::string kw_group, kw_out, kw_report;
    std::uint32_t kw_k = 1;
    double kw_eps = 0.1;
    kwise_cmd->add_option("--group", kw_group, "group file")->required();
    kwise_cmd->add_option("-k,--k", kw_k, "independence order")->required();
    kwise_cmd->add_option("--epsilon", kw_eps, "restriction distance target")->required();
    kwise_cmd->add_option("--out", kw_out, "output weighted-set file")->required();
    kwise_cmd->add_option("--report", kw_report, "report file");

    // freivalds
    auto* fre_cmd = app.add_subcommand("freivalds", "matrix-product verification with a biased sample space");
    std::string fre_matrices, fre_set, fre_report;
    std::uint32_t fre_q = 2;
    bool fre_sweep = false;
    std::int64_t fre_sample = -1;
    fre_cmd->add_option("--q", fre_q, "modulus")->required();
    fre_cmd->add_option("--matrices", fre_matrices, "matrix triple file")->required();
    fre_cmd->add_option("--set", fre_set, "sample weighted-set file")->required();
    fre_cmd->add_flag("--sweep", fre_sweep, "check every sample in the support");
    fre_cmd->add_option("--sample", fre_sample, "check a single sample by index");
    fre_cmd->add_option("--report", fre_report, "report file");

    CLI11_PARSE(app, argc, argv);

    if (const char* threads = std::getenv("FORGE_THREADS")) {
        const int t = std::atoi(threads);
        if (t > 0) omp_set_num_threads(t);
    }

    if (plan_cmd->parsed()) {
        const forge::PlanMode mode = parse_mode(plan_mode);
        json j;
        if (mode == forge::PlanMode::asymptotic) {
            const forge::WalkPlan p = forge::plan_parameters(plan_eps, mode);
            j["mode"] = forge::to_string(p.mode);
            j["epsilon"] = p.epsilon;
            j["alpha"] = p.alpha;
            j["s"] = p.s;
            j["log2_d2"] = p.log2_d2;
            j["d2"] = p.d2;
            j["m"] = p.m;
            j["b2"] = p.b2;
            j["lambda_h_target"] = p.lambda_h_target;
            j["lambda_gamma_target"] = p.lambda_gamma_target;
            j["t"] = p.t;
            j["support_log2_lower_bound"] = p.support_log2(p.m + 1.0);
        } else {
            if (plan_group.empty()) throw forge::domain_error("desk planning needs --group");
            const forge::GroupSpec group = forge::io::read_group(plan_group);
            const forge::BuildResult r = forge::build_biased_set(group, plan_eps, mode, caps);
            j = forge::io::report_to_json(r.report);
        }
        const std::string text = j.dump(2) + "\n";
        std::cout << text;
        if (!plan_report.empty()) forge::io::write_report_json(j, plan_report);
        return 0;
    }

    if (base_cmd->parsed()) {
        const forge::GroupSpec group = forge::io::read_group(base_group);
        const forge::BaseSetResult base = forge::build_base_set(group, base_target, caps);
        forge::io::write_weighted_set(base.set, base_out);
        json j;
        j["schema_version"] = 1;
        j["size"] = base.picks.size();
        j["certified_bias"] = base.certified_bias;
        j["target"] = base_target;
        j["generates"] = forge::generates_group(base.set, caps);
        std::cout << j.dump(2) << "\n";
        if (!base_report.empty()) forge::io::write_report_json(j, base_report);
        return 0;
    }

    if (amp_cmd->parsed()) {
        if (amp_mode != "ordinary") throw forge::domain_error("amplify supports --mode ordinary");
        const forge::GroupSpec group = forge::io::read_group(amp_group);
        const forge::WeightedSet base = forge::io::read_weighted_set(amp_base, group);
        const auto picks = picks_from_set(base);
        forge::RotationGraph graph;
        if (!amp_graph.empty()) {
            graph = forge::io::read_graph(amp_graph);
        } else {
            const std::uint32_t L = static_cast<std::uint32_t>(picks.size());
            std::uint32_t n1 = L;
            while (n1 <= amp_degree) n1 += L;
            graph = forge::build_outer_graph(n1, amp_degree, 1.0, caps).graph;
        }
        const forge::LabeledExpander labeled = forge::label_with_picks(group, graph, picks);
        const forge::WeightedSet out = forge::ordinary_walk_amplify(labeled, amp_t, caps);
        forge::io::write_weighted_set(out, amp_out);

        const double eps0 = forge::bias_via_dft(base, caps).bias;
        const double lambda = forge::second_eigenvalue(graph).lambda;
        const double bound = forge::ordinary_walk_bound(eps0, lambda, amp_t);
        const double exact = forge::bias_via_dft(out, caps).bias;
        json j;
        j["schema_version"] = 1;
        j["epsilon0"] = eps0;
        j["lambda"] = lambda;
        j["t"] = amp_t;
        j["bound"] = bound;
        j["exact_bias"] = exact;
        j["support"] = out.support_size();
        j["ok"] = exact <= bound + 1e-9;
        std::cout << j.dump(2) << "\n";
        if (!amp_report.empty()) forge::io::write_report_json(j, amp_report);
        return j["ok"].get<bool>() ? 0 : 1;
    }

    if (build_cmd->parsed()) {
        const forge::GroupSpec group = forge::io::read_group(build_group);
        const forge::BuildResult r = forge::build_biased_set(group, build_eps, parse_mode(build_mode), caps);
        if (!build_out.empty()) {
            if (!r.report.materialized) {
                throw forge::capacity_error("set exceeds materialization caps; rerun without --out");
            }
            forge::io::write_weighted_set(r.set, build_out);
        }
        const json j = forge::io::report_to_json(r.report);
        std::cout << j.dump(2) << "\n";
        if (!build_report_path.empty()) forge::io::write_report_json(j, build_report_path);
        const bool ok = r.report.exact_bias < 0.0 || r.report.exact_bias <= build_eps + 1e-9;
        return ok ? 0 : 1;
    }

    if (verify_cmd->parsed()) {
        const forge::GroupSpec group = forge::io::read_group(ver_group);
        const forge::WeightedSet set = forge::io::read_weighted_set(ver_set, group);
        std::vector<CheckRow> rows;
        std::string witness;

        const forge::BiasResult dft = forge::bias_via_dft(set, caps);
        rows.push_back({"bias-range", dft.bias, 1.0, 0.0, dft.bias >= 0.0 && dft.bias <= 1.0});
        if (group.order() <= caps.enum_cap) {
            const forge::BiasResult brute = forge::bias_brute_force(set, caps);
            const bool agree = std::abs(brute.bias - dft.bias) <= 1e-9 &&
                               brute.witness_index == dft.witness_index;
            rows.push_back({"oracle-agreement", std::abs(brute.bias - dft.bias), 0.0, 1e-9, agree});
        }
        const forge::LemmaCheck xr = forge::xor_lemma_check(set, caps);
        rows.push_back({"distance-vs-bias", xr.lhs, xr.rhs, 1e-9, xr.ok});
        if (ver_eps > 0.0) {
            const bool ok = dft.bias <= ver_eps + 1e-9;
            rows.push_back({"bias-at-most-epsilon", dft.bias, ver_eps, 1e-9, ok});
            if (!ok) {
                std::ostringstream os;
                const auto coords = group.coords_of(dft.witness_index);
                os << "character(";
                for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
                os << ")";
                witness = os.str();
            }
        }

        if (ver_full || ver_transfer || ver_norms) {
            if (ver_eps <= 0.0) throw forge::domain_error("--full/--transfer/--norms need --epsilon");
            const forge::BuildResult r =
                forge::build_biased_set(group, ver_eps, forge::PlanMode::desk_search, caps);
            if (ver_full || ver_transfer) {
                const forge::BiasResult tr = forge::transfer_bias_all(r.instance.gamma, r.instance.h,
                                                                      r.instance.s, r.instance.t, caps);
                rows.push_back({"transfer-vs-set-bias", std::abs(tr.bias - dft.bias), 0.0, 1e-9,
                                std::abs(tr.bias - dft.bias) <= 1e-9});
            }
            if (ver_full || ver_norms) {
                const std::uint64_t dim =
                    static_cast<std::uint64_t>(r.instance.gamma.graph.num_vertices) * r.instance.h.num_vertices;
                if (dim <= caps.dense_norm_cap && r.report.hypothesis_ok) {
                    forge::WideCheckContext ctx{r.instance.s, r.instance.m, r.report.eps0,
                                                r.report.lambda_gamma, r.report.lambda_h, r.report.zeta};
                    bool all_ok = true;
                    double worst = 0.0, bound = 0.0;
                    for (const auto chi : forge::enumerate_characters(group, caps)) {
                        const forge::NormCheck nc =
                            forge::check_wide_norm(chi, r.instance.gamma, r.instance.h, ctx, caps);
                        if (!nc.skipped) {
                            all_ok = all_ok && nc.ok;
                            worst = std::max(worst, nc.value);
                            bound = nc.bound;
                        }
                    }
                    rows.push_back({"wide-norm-bound", worst, bound, 1e-8, all_ok});
                }
            }
        }

        bool all_ok = true;
        for (const auto& r : rows) all_ok = all_ok && r.ok;
        json j;
        j["schema_version"] = 1;
        j["checks"] = rows_to_json(rows);
        if (!witness.empty()) j["failing_witness"] = witness;
        std::cout << j.dump(2) << "\n";
        if (!ver_report.empty()) forge::io::write_report_json(j, ver_report);
        return all_ok ? 0 : 1;
    }

    if (kwise_cmd->parsed()) {
        const forge::GroupSpec group = forge::io::read_group(kw_group);
        const forge::KwiseResult r = forge::build_kwise(group, kw_k, kw_eps, forge::PlanMode::desk_search, caps);
        forge::io::write_weighted_set(r.set, kw_out);
        const forge::KwiseCheck check = forge::kwise_check(r.set, kw_k, caps);
        json j;
        j["schema_version"] = 1;
        j["k"] = kw_k;
        j["epsilon"] = kw_eps;
        j["derived_bias_target"] = r.derived_bias_target;
        j["support"] = r.set.support_size();
        j["max_restriction_distance"] = check.max_restriction_distance;
        j["bound"] = kw_eps;
        j["tolerance"] = 1e-9;
        j["ok"] = check.max_restriction_distance <= kw_eps + 1e-9;
        std::cout << j.dump(2) << "\n";
        if (!kw_report.empty()) forge::io::write_report_json(j, kw_report);
        return j["ok"].get<bool>() ? 0 : 1;
    }

    if (fre_cmd->parsed()) {
        const forge::MatrixTriple triple = forge::io::read_matrices(fre_matrices);
        if (triple.q != fre_q) throw forge::structural_error("--q does not match the matrix file modulus");
        std::vector<std::uint32_t> qf{fre_q};
        const forge::GroupSpec group(qf, triple.n);
        const forge::WeightedSet samples = forge::io::read_weighted_set(fre_set, group);
        forge::FreivaldsResult r;
        if (fre_sample >= 0) {
            r = forge::freivalds_single(triple, samples, static_cast<std::uint64_t>(fre_sample));
        } else {
            r = forge::freivalds_sweep(triple, samples);
        }
        json j;
        j["schema_version"] = 1;
        j["verdict"] = r.verdict == forge::Verdict::accept ? "accept" : "reject";
        j["samples_checked"] = r.samples_checked;
        j["detecting_weight"] = r.detecting_weight;
        j["total_weight"] = r.total_weight;
        j["random_bits"] = r.random_bits;
        if (r.witness_entry) j["witness_entry"] = *r.witness_entry;
        std::cout << j.dump(2) << "\n";
        if (!fre_report.empty()) forge::io::write_report_json(j, fre_report);
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const forge::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const forge::structural_error& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return 2;
    } catch (const forge::plan_error& e) {
        std::cerr << "plan error: " << e.what() << "\n";
        return 2;
    } catch (const forge::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
