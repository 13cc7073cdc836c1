#include <doctest.h>

#include <cmath>

#include "forge/apps.hpp"
#include "forge/bias.hpp"

using namespace forge;

namespace {

/// Deterministic fixture matrices from a fixed multiplicative sequence.
MatrixTriple product_fixture(std::uint32_t n, std::uint32_t q, std::uint64_t seed, bool correct) {
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
    if (!correct) t.c[0] = (t.c[0] + 1) % q;
    return t;
}

} // namespace

TEST_CASE("matrix triple validation") {
    MatrixTriple t = product_fixture(3, 4, 1, true);
    CHECK_NOTHROW(t.validate());
    t.algebra = MatrixTriple::Algebra::field_fq;
    CHECK_THROWS_AS(t.validate(), domain_error); // 4 is not prime
    t.algebra = MatrixTriple::Algebra::ring_zq;
    t.a[0] = 7;
    CHECK_THROWS_AS(t.validate(), domain_error); // entry not reduced mod q
}

TEST_CASE("k-wise construction guards") {
    GroupSpec g(std::vector<std::uint32_t>{2}, 4);
    CHECK_THROWS_AS(build_kwise(g, 0, 0.5), domain_error);
    CHECK_THROWS_AS(build_kwise(g, 5, 0.5), domain_error);
    CHECK_THROWS_AS(build_kwise(g, 2, 0.0), domain_error);
}

TEST_CASE("k-wise set passes its design check") {
    GroupSpec g(std::vector<std::uint32_t>{2}, 4);
    const KwiseResult r = build_kwise(g, 2, 0.5);
    CHECK(r.derived_bias_target == doctest::Approx(0.25));
    const KwiseCheck check = kwise_check(r.set, 2);
    CHECK(check.ok);
    CHECK(check.max_restriction_distance <= 0.5 + 1e-9);
    // support equals the underlying biased set's support
    CHECK(r.set.support_size() == r.build_report.support_merged);
}

TEST_CASE("verification accepts true products") {
    GroupSpec g({3}, 4);
    const BuildResult samples = build_biased_set(g, 0.2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MatrixTriple t = product_fixture(4, 3, seed, true);
        const FreivaldsResult r = freivalds_sweep(t, samples.set);
        CHECK(r.verdict == Verdict::accept);
        CHECK(r.detecting_weight == 0.0);
    }
}

TEST_CASE("sweep detects inequality at the character rate") {
    GroupSpec g({3}, 4);
    const BuildResult samples = build_biased_set(g, 0.1);
    const double alpha = samples.report.exact_bias;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const MatrixTriple t = product_fixture(4, 3, seed, false);
        const FreivaldsResult r = freivalds_sweep(t, samples.set);
        CHECK(r.verdict == Verdict::reject);
        const double miss = 1.0 - r.detecting_weight / r.total_weight;
        CHECK(miss <= 1.0 / 3 + alpha + 1e-12);
    }
}

TEST_CASE("single-sample mode and randomness accounting") {
    GroupSpec g({2}, 3);
    const BuildResult samples = build_biased_set(g, 0.2);
    const MatrixTriple good = product_fixture(3, 2, 7, true);
    const FreivaldsResult r = freivalds_single(good, samples.set, 0);
    CHECK(r.verdict == Verdict::accept);
    CHECK(r.samples_checked == 1);
    std::uint32_t expected_bits = 0;
    while ((1ull << expected_bits) < samples.set.support_size()) ++expected_bits;
    CHECK(r.random_bits == expected_bits);
    CHECK_THROWS_AS(freivalds_single(good, samples.set, samples.set.support_size()), domain_error);
}

TEST_CASE("sample space shape mismatches are structural") {
    const MatrixTriple t = product_fixture(4, 3, 1, true);
    GroupSpec wrong_dim({3}, 5);
    WeightedSet samples(wrong_dim);
    samples.add_entry_index(0, 1.0);
    CHECK_THROWS_AS(freivalds_sweep(t, samples), structural_error);
    GroupSpec wrong_mod({5}, 4);
    WeightedSet samples2(wrong_mod);
    samples2.add_entry_index(0, 1.0);
    CHECK_THROWS_AS(freivalds_sweep(t, samples2), structural_error);
}
