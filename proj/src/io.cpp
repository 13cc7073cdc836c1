#include "forge/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace forge::io {

namespace {

using json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw structural_error("cannot write " + path);
    out << text;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

GroupSpec group_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw structural_error(std::string("group file is not valid JSON: ") + e.what());
    }
    if (!j.contains("n")) throw structural_error("group file is missing field 'n'");
    std::vector<std::uint32_t> factors;
    if (j.contains("invariant_factors")) {
        factors = j["invariant_factors"].get<std::vector<std::uint32_t>>();
    } else if (j.contains("factors")) {
        factors = normalize_factors(j["factors"].get<std::vector<std::uint32_t>>());
    } else {
        throw structural_error("group file is missing field 'invariant_factors'");
    }
    return GroupSpec(factors, j["n"].get<std::uint32_t>());
}

GroupSpec read_group(const std::string& path) { return group_from_json_text(slurp(path)); }

void write_group(const GroupSpec& spec, const std::string& path) {
    json j;
    j["invariant_factors"] = spec.factors();
    j["n"] = spec.dimension();
    spit(path, j.dump(2) + "\n");
}

WeightedSet read_weighted_set(const std::string& path, const GroupSpec& spec) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open " + path);
    WeightedSet out(spec);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto sep = line.find(';');
        if (sep == std::string::npos) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 'weight;coords'";
            throw structural_error(os.str());
        }
        const double w = std::stod(line.substr(0, sep));
        std::vector<std::uint32_t> coords;
        std::stringstream cs(line.substr(sep + 1));
        std::string tok;
        while (std::getline(cs, tok, ',')) coords.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        if (coords.size() != spec.num_coords()) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected " << spec.num_coords() << " coordinates";
            throw structural_error(os.str());
        }
        out.add_entry(GroupElement{coords}, w);
    }
    if (out.empty()) throw structural_error(path + ": weighted set file is empty");
    return out;
}

std::string weighted_set_to_text(const WeightedSet& set) {
    std::ostringstream os;
    const GroupSpec& spec = set.spec();
    for (const auto& [idx, w] : set.entries()) {
        os << format_double(w) << ";";
        const auto coords = spec.coords_of(idx);
        for (std::size_t j = 0; j < coords.size(); ++j) {
            if (j) os << ",";
            os << coords[j];
        }
        os << "\n";
    }
    return os.str();
}

void write_weighted_set(const WeightedSet& set, const std::string& path) {
    spit(path, weighted_set_to_text(set));
}

RotationGraph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open " + path);
    RotationGraph g;
    int has_phi = 0;
    if (!(in >> g.num_vertices >> g.degree >> has_phi)) {
        throw structural_error(path + ": bad graph header");
    }
    const std::size_t slots = static_cast<std::size_t>(g.num_vertices) * g.degree;
    g.rot_vertex.assign(slots, 0);
    g.rot_port.assign(slots, 0);
    for (std::size_t k = 0; k < slots; ++k) {
        std::uint32_t v, i, w, j;
        if (!(in >> v >> i >> w >> j)) throw structural_error(path + ": truncated rotation table");
        if (v >= g.num_vertices || i >= g.degree) throw structural_error(path + ": rotation entry out of range");
        g.rot_vertex[static_cast<std::size_t>(v) * g.degree + i] = w;
        g.rot_port[static_cast<std::size_t>(v) * g.degree + i] = j;
    }
    if (has_phi) {
        std::vector<std::uint32_t> phi(g.degree);
        for (auto& p : phi) {
            if (!(in >> p)) throw structural_error(path + ": truncated inversion table");
        }
        g.local_inversion = std::move(phi);
    }
    g.validate();
    return g;
}

void write_graph(const RotationGraph& g, const std::string& path) {
    std::ostringstream os;
    os << g.num_vertices << " " << g.degree << " " << (g.local_inversion ? 1 : 0) << "\n";
    for (std::uint32_t v = 0; v < g.num_vertices; ++v) {
        for (std::uint32_t i = 0; i < g.degree; ++i) {
            os << v << " " << i << " " << g.neighbor(v, i) << " " << g.return_port(v, i) << "\n";
        }
    }
    if (g.local_inversion) {
        for (auto p : *g.local_inversion) os << p << "\n";
    }
    spit(path, os.str());
}

MatrixTriple read_matrices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open " + path);
    MatrixTriple t;
    std::string algebra;
    if (!(in >> t.n >> t.q >> algebra)) throw structural_error(path + ": bad matrix header");
    if (algebra == "ring") t.algebra = MatrixTriple::Algebra::ring_zq;
    else if (algebra == "field") t.algebra = MatrixTriple::Algebra::field_fq;
    else throw structural_error(path + ": algebra must be 'ring' or 'field'");
    const std::size_t cells = static_cast<std::size_t>(t.n) * t.n;
    for (auto* mat : {&t.a, &t.b, &t.c}) {
        mat->assign(cells, 0);
        for (auto& v : *mat) {
            if (!(in >> v)) throw structural_error(path + ": truncated matrix data");
        }
    }
    t.validate();
    return t;
}

void write_matrices(const MatrixTriple& t, const std::string& path) {
    std::ostringstream os;
    os << t.n << " " << t.q << " " << (t.algebra == MatrixTriple::Algebra::ring_zq ? "ring" : "field")
       << "\n";
    for (const auto* mat : {&t.a, &t.b, &t.c}) {
        for (std::uint32_t r = 0; r < t.n; ++r) {
            for (std::uint32_t c = 0; c < t.n; ++c) {
                if (c) os << " ";
                os << (*mat)[static_cast<std::size_t>(r) * t.n + c];
            }
            os << "\n";
        }
    }
    spit(path, os.str());
}

json report_to_json(const BuildReport& report) {
    json j;
    j["schema_version"] = 1;
    json plan;
    plan["mode"] = to_string(report.plan.mode);
    plan["epsilon"] = report.plan.epsilon;
    plan["alpha"] = report.plan.alpha;
    plan["s"] = report.plan.s;
    plan["m"] = report.plan.m;
    plan["d2"] = report.plan.d2;
    plan["log2_d2"] = report.plan.log2_d2;
    plan["b2"] = report.plan.b2;
    plan["lambda_h_target"] = report.plan.lambda_h_target;
    plan["lambda_gamma_target"] = report.plan.lambda_gamma_target;
    plan["t"] = report.plan.t;
    plan["degenerate"] = report.plan.degenerate;
    j["plan"] = plan;

    json cert;
    cert["epsilon0"] = report.eps0;
    cert["lambda_gamma"] = report.lambda_gamma;
    cert["lambda_gamma_method"] = to_string(report.gamma_cert.method);
    cert["lambda_gamma_tolerance"] = report.gamma_cert.tolerance;
    cert["lambda_h"] = report.lambda_h;
    cert["lambda_h_method"] = to_string(report.h_cert.method);
    cert["lambda_h_tolerance"] = report.h_cert.tolerance;
    cert["zeta"] = report.zeta;
    cert["zeta_source"] = report.zeta_source;
    j["certificates"] = cert;

    json shape;
    shape["n1"] = report.n1;
    shape["n2"] = report.n2;
    shape["d2"] = report.d2;
    shape["outer_family"] = report.outer_family;
    shape["base_size"] = report.base_size;
    j["instance"] = shape;

    json bound;
    bound["hypothesis_ok"] = report.hypothesis_ok;
    bound["block_sharp"] = report.bound_block_sharp;
    bound["block_simplified"] = report.bound_block_simplified;
    bound["bias_bound"] = report.bias_bound;
    bound["tolerance"] = 1e-9;
    j["bound"] = bound;

    json support;
    support["pre_merge"] = report.support_pre_merge;
    support["log2"] = report.support_log2;
    support["merged"] = report.support_merged;
    support["materialized"] = report.materialized;
    j["support"] = support;

    if (!report.exact_bias_method.empty()) {
        json exact;
        exact["bias"] = report.exact_bias;
        exact["method"] = report.exact_bias_method;
        j["exact_bias"] = exact;
    }
    return j;
}

void write_report_json(const json& j, const std::string& path) { spit(path, j.dump(2) + "\n"); }

std::string report_to_text(const json& j) { return j.dump(2) + "\n"; }

} // namespace forge::io
