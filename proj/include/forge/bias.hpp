#pragma once

#include <cstdint>
#include <vector>

#include "forge/group.hpp"

namespace forge {

struct BiasResult {
    double bias = 0.0;
    std::uint64_t witness_index = 0; // character index; 0 only for empty-domain edge cases
    Character witness(const GroupSpec& spec) const { return Character{spec, element_of(spec, witness_index)}; }
};

/// Max over nontrivial characters of |E_{x~D} chi(x)|, by direct character
/// sums over the merged support. Witness is the first maximizer in index
/// order. Cost O(|G|^n * support).
BiasResult bias_brute_force(const WeightedSet& dist, const Caps& caps = {});

/// Same quantity via a mixed-radix transform of the mass function along
/// each cyclic factor. Runs under a larger cap than the brute-force scan
/// and agrees with it to 1e-9 wherever both run.
BiasResult bias_via_dft(const WeightedSet& dist, const Caps& caps = {});

/// Per-character magnitudes |E chi_a|, indexed by character index.
/// Shared kernel behind both bias paths; exposed for verifier use.
std::vector<double> char_sum_magnitudes(const WeightedSet& dist, const Caps& caps = {});

/// Half L1 distance between the normalized mass functions.
double statistical_distance(const WeightedSet& p, const WeightedSet& q, const Caps& caps = {});

/// Marginal of dist onto the given dimension indices (0-based, within [n)).
WeightedSet restrict_to(const WeightedSet& dist, const std::vector<std::uint32_t>& indices);

/// In-place multidimensional DFT of `values` over the coordinate axes of
/// `spec` (each axis one cyclic factor). Forward, unnormalized.
void mixed_radix_dft(const GroupSpec& spec, std::vector<cplx>& values);

/// Serial reference implementations of the parallel kernels above.
/// Kept for equivalence tests and benchmarking; contracts identical.
namespace serial_ref {
BiasResult bias_brute_force(const WeightedSet& dist, const Caps& caps = {});
BiasResult bias_via_dft(const WeightedSet& dist, const Caps& caps = {});
void mixed_radix_dft(const GroupSpec& spec, std::vector<cplx>& values);
} // namespace serial_ref

} // namespace forge
