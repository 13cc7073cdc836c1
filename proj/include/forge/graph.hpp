#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/bias.hpp"
#include "forge/group.hpp"

namespace forge {

/// D-regular undirected multigraph given by its rotation map
/// Rot(v,i) = (w,j): the i-th edge at v leads to w and is w's j-th edge.
/// Rot is an involution. When the return port depends only on the
/// outgoing port, the graph carries a local inversion permutation phi
/// with Rot(v,i) = (N(v,i), phi(i)).
struct RotationGraph {
    std::uint32_t num_vertices = 0;
    std::uint32_t degree = 0;
    std::vector<std::uint32_t> rot_vertex; // size V*D
    std::vector<std::uint32_t> rot_port;   // size V*D
    std::optional<std::vector<std::uint32_t>> local_inversion;

    std::uint32_t neighbor(std::uint32_t v, std::uint32_t port) const {
        return rot_vertex[static_cast<std::size_t>(v) * degree + port];
    }
    std::uint32_t return_port(std::uint32_t v, std::uint32_t port) const {
        return rot_port[static_cast<std::size_t>(v) * degree + port];
    }

    /// Full involution / regularity / inversion-law check; throws
    /// structural_error on violation.
    void validate() const;
};

struct SpectralCert {
    enum class Method { exact_dense, power_iteration };

    double lambda = 1.0; // second-largest |eigenvalue| of the walk matrix
    Method method = Method::exact_dense;
    double tolerance = 0.0;
};

std::string to_string(SpectralCert::Method m);

/// Cayley graph Cay(G^n, gens). The generator multiset must be closed
/// under negation; the induced local inversion pairs each port with the
/// first port carrying the inverse generator.
RotationGraph build_cayley_graph(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                 const Caps& caps = {});

/// Certified second-largest absolute eigenvalue of the normalized walk
/// matrix. Dense symmetric solve up to 4096 vertices, deflated power
/// iteration above.
SpectralCert second_eigenvalue(const RotationGraph& g);

/// Inner graph for wide walks: Cayley graph over Z_2^{m*s} with a
/// deterministically grown generator multiset. Degree grows until the
/// certified lambda meets the target (or the budget runs out).
struct InnerGraph {
    RotationGraph graph;
    std::vector<std::uint64_t> generators; // bit masks in Z_2^{m*s}
    SpectralCert cert;
    std::uint32_t m = 0;
    std::uint32_t s = 0;
};

InnerGraph build_inner_graph(std::uint32_t m, std::uint32_t s, double target_lambda,
                             std::uint32_t max_degree = 4096, const Caps& caps = {});

/// Variant with a fixed degree: grows exactly `degree` generators and
/// reports whatever lambda that achieves.
InnerGraph build_inner_graph_fixed_degree(std::uint32_t m, std::uint32_t s, std::uint32_t degree,
                                          const Caps& caps = {});

/// Outer graph: abelian Cayley graph over Z_{num_vertices} with a
/// symmetric generator multiset chosen by deterministic greedy search.
/// Ports come in (g, -g) pairs, so the local inversion is the pair swap
/// i XOR 1 (involutions occupy fixed ports).
struct OuterGraph {
    RotationGraph graph;
    std::vector<std::uint32_t> generators; // residues mod num_vertices
    SpectralCert cert;
};

OuterGraph build_outer_graph(std::uint32_t num_vertices, std::uint32_t degree, double target_lambda,
                             const Caps& caps = {});

/// Exact eigenvalues of an abelian Cayley graph are character-sum
/// magnitudes; used to cross-check second_eigenvalue and to certify
/// generator searches cheaply.
double cayley_lambda_from_charsums(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                   const Caps& caps = {});

} // namespace forge
