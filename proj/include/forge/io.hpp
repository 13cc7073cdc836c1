#pragma once

#include <string>

#include "forge/apps.hpp"
#include "forge/graph.hpp"
#include "forge/group.hpp"
#include "forge/verifier.hpp"
#include "forge/wide_walk.hpp"

#include <nlohmann/json_fwd.hpp>

namespace forge::io {

/// Group spec file: {"invariant_factors":[d1,...,dk],"n":N}. A "factors"
/// key is accepted as a convenience and normalized to invariant form.
GroupSpec read_group(const std::string& path);
void write_group(const GroupSpec& spec, const std::string& path);
GroupSpec group_from_json_text(const std::string& text);

/// Weighted set file: one record per line, "w;c1,c2,...,c_{kn}".
WeightedSet read_weighted_set(const std::string& path, const GroupSpec& spec);
void write_weighted_set(const WeightedSet& set, const std::string& path);
std::string weighted_set_to_text(const WeightedSet& set);

/// Graph file: header "V D has_phi", V*D rotation lines "v i w j", then
/// (if has_phi) D lines with phi(i).
RotationGraph read_graph(const std::string& path);
void write_graph(const RotationGraph& g, const std::string& path);

/// Matrix triple file: "n q algebra" header then 3*n rows of n entries
/// (A, then B, then C).
MatrixTriple read_matrices(const std::string& path);
void write_matrices(const MatrixTriple& t, const std::string& path);

/// Reports are schema-versioned ordered JSON; serialization is
/// deterministic for identical inputs.
nlohmann::ordered_json report_to_json(const BuildReport& report);
void write_report_json(const nlohmann::ordered_json& j, const std::string& path);
std::string report_to_text(const nlohmann::ordered_json& j);

} // namespace forge::io
