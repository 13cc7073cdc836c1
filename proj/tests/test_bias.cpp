#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <omp.h>

#include "forge/bias.hpp"

using namespace forge;

namespace {

WeightedSet uniform_over(const GroupSpec& g, const std::vector<std::uint64_t>& support) {
    WeightedSet s(g);
    for (auto idx : support) s.add_entry_index(idx, 1.0);
    return s;
}

/// Test-local recomputation: direct character sums from std::polar, no
/// shared code with the library kernels.
double bias_by_hand(const WeightedSet& dist) {
    const GroupSpec& g = dist.spec();
    double worst = 0.0;
    for (std::uint64_t a = 1; a < g.order(); ++a) {
        cplx sum(0.0, 0.0);
        for (const auto& [idx, w] : dist.entries()) {
            const auto ac = g.coords_of(a);
            const auto xc = g.coords_of(idx);
            double angle = 0.0;
            for (std::uint32_t j = 0; j < g.num_coords(); ++j) {
                angle += 2.0 * std::numbers::pi * ac[j] * xc[j] / g.modulus(j);
            }
            sum += w * std::polar(1.0, angle);
        }
        worst = std::max(worst, std::abs(sum) / dist.total_weight());
    }
    return worst;
}

} // namespace

TEST_CASE("bias of uniform and point-mass distributions") {
    GroupSpec z5({5}, 1);
    const WeightedSet full = uniform_over(z5, {0, 1, 2, 3, 4});
    CHECK(bias_brute_force(full).bias <= 1e-12);
    CHECK(bias_via_dft(full).bias <= 1e-12);

    const WeightedSet point = uniform_over(z5, {0});
    CHECK(bias_brute_force(point).bias == doctest::Approx(1.0));

    GroupSpec z2n(std::vector<std::uint32_t>{2}, 8);
    WeightedSet all(z2n);
    for (std::uint64_t i = 0; i < z2n.order(); ++i) all.add_entry_index(i, 1.0);
    CHECK(bias_via_dft(all).bias <= 1e-12);
}

TEST_CASE("three-point set in Z4 has bias one third") {
    GroupSpec z4({4}, 1);
    const WeightedSet s = uniform_over(z4, {0, 1, 2});
    CHECK(bias_by_hand(s) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    const BiasResult brute = bias_brute_force(s);
    const BiasResult dft = bias_via_dft(s);
    CHECK(brute.bias == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(dft.bias == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(brute.witness_index == 1); // all three nontrivial characters tie; first wins
    CHECK(dft.witness_index == 1);
}

TEST_CASE("transform path agrees with the brute-force path") {
    const std::vector<GroupSpec> groups{GroupSpec({4}, 2), GroupSpec({2, 6}, 1), GroupSpec({3}, 3),
                                        GroupSpec({2}, 6), GroupSpec({2, 2, 4}, 1)};
    for (const auto& g : groups) {
        WeightedSet s(g);
        for (std::uint64_t i = 0; i < 2 * g.order() / 3 + 1; ++i) {
            s.add_entry_index((i * 2654435761ull + 3) % g.order(), 1.0 + (i % 3));
        }
        const BiasResult a = bias_brute_force(s);
        const BiasResult b = bias_via_dft(s);
        CHECK(std::abs(a.bias - b.bias) < 1e-9);
        CHECK(a.witness_index == b.witness_index);
        CHECK(a.bias == doctest::Approx(bias_by_hand(s)).epsilon(1e-9));
        // serial reference implementations agree bit-for-bit on the values
        const BiasResult as = serial_ref::bias_brute_force(s);
        const BiasResult bs = serial_ref::bias_via_dft(s);
        CHECK(as.bias == a.bias);
        CHECK(as.witness_index == a.witness_index);
        CHECK(bs.bias == b.bias);
        CHECK(bs.witness_index == b.witness_index);
    }
}

TEST_CASE("bias is invariant under support translation") {
    GroupSpec g({2, 4}, 1);
    const WeightedSet s = uniform_over(g, {0, 1, 3, 6});
    const double b0 = bias_brute_force(s).bias;
    for (std::uint64_t shift : {1ull, 3ull, 5ull}) {
        WeightedSet t(g);
        for (const auto& [idx, w] : s.entries()) t.add_entry_index(g.add(idx, shift), w);
        CHECK(bias_brute_force(t).bias == doctest::Approx(b0).epsilon(1e-12));
    }
}

TEST_CASE("bias stays within the unit interval") {
    GroupSpec g({6}, 1);
    for (std::uint64_t pattern = 1; pattern < 64; ++pattern) {
        WeightedSet s(g);
        for (std::uint32_t i = 0; i < 6; ++i) {
            if (pattern & (1u << i)) s.add_entry_index(i, 1.0 + (pattern % 5));
        }
        const double b = bias_brute_force(s).bias;
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
    }
}

TEST_CASE("results do not depend on the worker count") {
    GroupSpec g({2, 6}, 1);
    WeightedSet s(g);
    for (std::uint64_t i = 0; i < 9; ++i) s.add_entry_index((i * 5 + 1) % g.order(), 1.0 + i % 2);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const BiasResult one_brute = bias_brute_force(s);
    const BiasResult one_dft = bias_via_dft(s);
    omp_set_num_threads(saved);
    const BiasResult many_brute = bias_brute_force(s);
    const BiasResult many_dft = bias_via_dft(s);
    CHECK(one_brute.bias == many_brute.bias);
    CHECK(one_brute.witness_index == many_brute.witness_index);
    CHECK(one_dft.bias == many_dft.bias);
    CHECK(one_dft.witness_index == many_dft.witness_index);
}

TEST_CASE("bias errors") {
    GroupSpec g({4}, 1);
    WeightedSet empty(g);
    CHECK_THROWS_AS(bias_brute_force(empty), domain_error);
    Caps tight;
    tight.enum_cap = 2;
    CHECK_THROWS_WITH_AS(bias_brute_force(uniform_over(g, {0, 1}), tight),
                         doctest::Contains("enum_cap"), capacity_error);
    tight.dft_cap = 2;
    CHECK_THROWS_WITH_AS(bias_via_dft(uniform_over(g, {0, 1}), tight),
                         doctest::Contains("dft_cap"), capacity_error);
}

TEST_CASE("statistical distance") {
    GroupSpec z4({4}, 1);
    const WeightedSet p = uniform_over(z4, {0, 1});
    CHECK(statistical_distance(p, p) == doctest::Approx(0.0));

    GroupSpec z2({2}, 1);
    const WeightedSet a = uniform_over(z2, {0});
    const WeightedSet b = uniform_over(z2, {1});
    CHECK(statistical_distance(a, b) == doctest::Approx(1.0));
    CHECK(statistical_distance(b, a) == doctest::Approx(1.0));

    const WeightedSet full = uniform_over(z4, {0, 1, 2, 3});
    CHECK(statistical_distance(p, full) == doctest::Approx(0.5));

    GroupSpec other({2}, 2);
    WeightedSet q(other);
    q.add_entry_index(0, 1.0);
    CHECK_THROWS_AS(statistical_distance(p, q), structural_error);
}

TEST_CASE("restriction to index subsets") {
    GroupSpec g({2}, 2);
    WeightedSet s(g);
    s.add_entry_index(0, 1.0);
    s.add_entry_index(3, 1.0);
    s.add_entry_index(3, 1.0);

    const WeightedSet whole = restrict_to(s, {0, 1});
    CHECK(whole.support_size() == 2); // duplicates merged
    CHECK(whole.total_weight() == doctest::Approx(3.0));

    GroupSpec z2({2}, 1);
    const WeightedSet first = restrict_to(uniform_over(g, {0, 1, 2, 3}), {1});
    CHECK(first.spec() == z2);
    CHECK(bias_brute_force(first).bias <= 1e-12);

    CHECK_THROWS_AS(restrict_to(s, {}), domain_error);
    CHECK_THROWS_AS(restrict_to(s, {2}), domain_error);
}

TEST_CASE("restriction never increases bias") {
    GroupSpec g({3}, 3);
    WeightedSet s(g);
    for (std::uint64_t i = 0; i < 11; ++i) s.add_entry_index((i * 7 + 2) % g.order(), 1.0);
    const double whole = bias_brute_force(s).bias;
    for (const auto& idx : std::vector<std::vector<std::uint32_t>>{{0}, {1}, {2}, {0, 2}, {1, 2}}) {
        CHECK(bias_brute_force(restrict_to(s, idx)).bias <= whole + 1e-9);
    }
}
