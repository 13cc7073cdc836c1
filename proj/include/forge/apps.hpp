#pragma once

#include <cstdint>
#include <optional>

#include "forge/group.hpp"
#include "forge/verifier.hpp"
#include "forge/wide_walk.hpp"

namespace forge {

/// Square matrices over Z_q (ring) or F_q (field; q must be prime).
struct MatrixTriple {
    std::uint32_t n = 0;
    std::uint32_t q = 2;
    enum class Algebra { ring_zq, field_fq } algebra = Algebra::ring_zq;
    std::vector<std::uint32_t> a, b, c; // row-major n*n, entries reduced mod q

    std::uint32_t at(const std::vector<std::uint32_t>& mat, std::uint32_t row, std::uint32_t col) const {
        return mat[static_cast<std::size_t>(row) * n + col];
    }
    void validate() const;
};

/// Almost k-wise independent distribution over G^n: a biased set built at
/// target epsilon / sqrt(|G|^k).
struct KwiseResult {
    WeightedSet set;
    BuildReport build_report;
    double derived_bias_target = 0.0;
};

KwiseResult build_kwise(const GroupSpec& group, std::uint32_t k, double epsilon,
                        PlanMode mode = PlanMode::desk_search, const Caps& caps = {});

enum class Verdict { accept, reject };

struct FreivaldsResult {
    Verdict verdict = Verdict::accept;
    std::uint64_t samples_checked = 0;
    double detecting_weight = 0.0; // total weight of samples with ABx != Cx
    double total_weight = 0.0;
    std::uint32_t random_bits = 0; // bits to index one sample
    std::optional<std::uint64_t> witness_entry; // first detecting support entry
};

/// Full-support sweep: checks A(Bx) = Cx for every x in the sample set.
/// Never rejects a true product; rejects iff some sample detects.
FreivaldsResult freivalds_sweep(const MatrixTriple& triple, const WeightedSet& samples);

/// Single indexed sample (the index is an explicit input, not entropy).
FreivaldsResult freivalds_single(const MatrixTriple& triple, const WeightedSet& samples,
                                 std::uint64_t sample_index);

} // namespace forge
