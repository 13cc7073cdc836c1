#include "forge/apps.hpp"

#include <cmath>
#include <sstream>

#include <omp.h>

namespace forge {

namespace {

bool is_prime(std::uint32_t q) {
    if (q < 2) return false;
    for (std::uint32_t p = 2; static_cast<std::uint64_t>(p) * p <= q; ++p) {
        if (q % p == 0) return false;
    }
    return true;
}

} // namespace

void MatrixTriple::validate() const {
    if (n == 0) throw domain_error("matrices must be nonempty");
    if (q < 2) throw domain_error("modulus must be at least 2");
    if (algebra == Algebra::field_fq && !is_prime(q)) {
        throw domain_error("field algebra needs a prime modulus");
    }
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    if (a.size() != cells || b.size() != cells || c.size() != cells) {
        throw structural_error("matrix data has wrong shape");
    }
    for (const auto* mat : {&a, &b, &c}) {
        for (auto v : *mat) {
            if (v >= q) throw domain_error("matrix entries must be reduced mod q");
        }
    }
}

KwiseResult build_kwise(const GroupSpec& group, std::uint32_t k, double epsilon, PlanMode mode,
                        const Caps& caps) {
    if (k < 1) throw domain_error("k must be at least 1");
    if (k > group.dimension()) throw domain_error("k must not exceed the dimension n");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw domain_error("epsilon must lie in (0,1)");
    double gk = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) gk *= static_cast<double>(group.base_order());
    KwiseResult out;
    out.derived_bias_target = epsilon / std::sqrt(gk);
    BuildResult built = build_biased_set(group, out.derived_bias_target, mode, caps);
    if (!built.report.materialized) {
        throw capacity_error("k-wise construction needs a materializable biased set at this scale");
    }
    out.set = std::move(built.set);
    out.build_report = std::move(built.report);
    return out;
}

namespace {

/// A(Bx) vs Cx with three matrix-vector products mod q.
bool sample_detects(const MatrixTriple& t, const std::vector<std::uint32_t>& x) {
    const std::uint32_t n = t.n;
    const std::uint64_t q = t.q;
    std::vector<std::uint32_t> bx(n), abx(n), cx(n);
    for (std::uint32_t r = 0; r < n; ++r) {
        std::uint64_t acc_b = 0, acc_c = 0;
        const std::size_t row = static_cast<std::size_t>(r) * n;
        for (std::uint32_t col = 0; col < n; ++col) {
            acc_b += static_cast<std::uint64_t>(t.b[row + col]) * x[col] % q;
            acc_c += static_cast<std::uint64_t>(t.c[row + col]) * x[col] % q;
        }
        bx[r] = static_cast<std::uint32_t>(acc_b % q);
        cx[r] = static_cast<std::uint32_t>(acc_c % q);
    }
    for (std::uint32_t r = 0; r < n; ++r) {
        std::uint64_t acc = 0;
        const std::size_t row = static_cast<std::size_t>(r) * n;
        for (std::uint32_t col = 0; col < n; ++col) {
            acc += static_cast<std::uint64_t>(t.a[row + col]) * bx[col] % q;
        }
        abx[r] = static_cast<std::uint32_t>(acc % q);
    }
    for (std::uint32_t r = 0; r < n; ++r) {
        if (abx[r] != cx[r]) return true;
    }
    return false;
}

void check_sample_space(const MatrixTriple& t, const WeightedSet& samples) {
    t.validate();
    const GroupSpec& spec = samples.spec();
    if (spec.num_factors() != 1 || spec.largest_factor() != t.q || spec.dimension() != t.n) {
        std::ostringstream os;
        os << "sample space must live over Z_" << t.q << "^" << t.n;
        throw structural_error(os.str());
    }
    if (samples.empty()) throw domain_error("sample set is empty");
}

std::uint32_t index_bits(std::uint64_t support) {
    std::uint32_t bits = 0;
    while ((1ull << bits) < support) ++bits;
    return bits;
}

} // namespace

FreivaldsResult freivalds_sweep(const MatrixTriple& triple, const WeightedSet& samples) {
    check_sample_space(triple, samples);
    const GroupSpec& spec = samples.spec();
    const auto& entries = samples.entries();

    std::vector<char> detects(entries.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(entries.size()); ++e) {
        detects[e] = sample_detects(triple, spec.coords_of(entries[e].first)) ? 1 : 0;
    }

    FreivaldsResult out;
    out.samples_checked = entries.size();
    out.total_weight = samples.total_weight();
    out.random_bits = index_bits(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
        if (detects[e]) {
            out.detecting_weight += entries[e].second;
            if (!out.witness_entry) out.witness_entry = e;
        }
    }
    out.verdict = out.detecting_weight > 0.0 ? Verdict::reject : Verdict::accept;
    return out;
}

FreivaldsResult freivalds_single(const MatrixTriple& triple, const WeightedSet& samples,
                                 std::uint64_t sample_index) {
    check_sample_space(triple, samples);
    if (sample_index >= samples.entries().size()) throw domain_error("sample index out of range");
    const auto& entry = samples.entries()[sample_index];
    FreivaldsResult out;
    out.samples_checked = 1;
    out.total_weight = entry.second;
    out.random_bits = index_bits(samples.entries().size());
    if (sample_detects(triple, samples.spec().coords_of(entry.first))) {
        out.detecting_weight = entry.second;
        out.witness_entry = sample_index;
        out.verdict = Verdict::reject;
    }
    return out;
}

} // namespace forge
