#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

using cplx = std::complex<double>;

/// Resource caps shared across the toolkit. All enumeration-style
/// operations check the relevant cap before allocating.
struct Caps {
    std::uint64_t enum_cap = 1ull << 20;      // brute-force bias / full enumeration
    std::uint64_t dft_cap = 1ull << 24;       // transform-based bias
    std::uint64_t walk_enum_cap = 1ull << 24; // materialized walk outputs
    std::uint32_t dense_norm_cap = 2048;      // dense operator-norm dimension
    std::uint64_t zeta_cap = 1ull << 31;      // D2^s * D1^s exhaustive budget
};

/// A finite abelian group G^n where G = Z_{d1} + ... + Z_{dk} in
/// invariant-factor form (d_i | d_{i+1}). Elements are coordinate vectors
/// of length k*n laid out as n consecutive blocks of k coordinates.
class GroupSpec {
public:
    GroupSpec() = default;
    GroupSpec(std::vector<std::uint32_t> invariant_factors, std::uint32_t dimension);

    const std::vector<std::uint32_t>& factors() const { return factors_; }
    std::uint32_t dimension() const { return n_; }
    std::uint32_t num_factors() const { return static_cast<std::uint32_t>(factors_.size()); }
    std::uint32_t num_coords() const { return num_factors() * n_; }
    std::uint32_t largest_factor() const { return factors_.back(); }

    /// |G|^n. Construction rejects groups whose order overflows.
    std::uint64_t order() const { return order_; }

    /// |G| (one copy).
    std::uint64_t base_order() const { return base_order_; }

    std::uint32_t modulus(std::uint32_t coord) const { return factors_[coord % factors_.size()]; }

    /// Mixed-radix element index; coordinate 0 is the most significant
    /// digit, so index order coincides with lexicographic coordinate order.
    std::uint64_t index_of(const std::vector<std::uint32_t>& coords) const;
    std::vector<std::uint32_t> coords_of(std::uint64_t index) const;

    /// index of x+y, coordinate-wise modular addition
    std::uint64_t add(std::uint64_t x, std::uint64_t y) const;
    /// index of -x
    std::uint64_t negate(std::uint64_t x) const;

    bool operator==(const GroupSpec& other) const {
        return factors_ == other.factors_ && n_ == other.n_;
    }
    bool operator!=(const GroupSpec& other) const { return !(*this == other); }

private:
    std::vector<std::uint32_t> factors_;
    std::uint32_t n_ = 0;
    std::uint64_t order_ = 0;
    std::uint64_t base_order_ = 0;
    std::vector<std::uint64_t> strides_; // per coordinate, coords[0] most significant
};

/// Reduce an arbitrary list of cyclic orders (e.g. Z6+Z4) to
/// invariant-factor form via prime-power regrouping.
std::vector<std::uint32_t> normalize_factors(const std::vector<std::uint32_t>& cyclic_orders);

/// Element of G^n as a reduced coordinate vector.
struct GroupElement {
    std::vector<std::uint32_t> coords;

    bool operator==(const GroupElement& other) const { return coords == other.coords; }
};

GroupElement element_of(const GroupSpec& spec, std::uint64_t index);
GroupElement add(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);
GroupElement negate(const GroupSpec& spec, const GroupElement& a);
GroupElement identity(const GroupSpec& spec);

/// Character chi_a of G^n indexed by a group element a. Evaluation maps
/// into the d_k-th roots of unity, d_k the largest invariant factor.
struct Character {
    GroupSpec group;
    GroupElement index;

    bool trivial() const;
};

/// chi_a(x). Both arguments must share a GroupSpec.
cplx char_eval(const Character& chi, const GroupElement& x);

/// Exponent e with chi_a(x) = omega_{d_k}^e; the index-based fast path.
std::uint32_t char_exponent(const GroupSpec& spec, std::uint64_t a_index, std::uint64_t x_index);

/// Forward iteration over all |G|^n characters in lexicographic index
/// order (trivial character first).
class CharacterRange {
public:
    CharacterRange(GroupSpec spec, const Caps& caps);

    class iterator {
    public:
        iterator(const GroupSpec* spec, std::uint64_t i) : spec_(spec), i_(i) {}
        Character operator*() const { return Character{*spec_, element_of(*spec_, i_)}; }
        iterator& operator++() { ++i_; return *this; }
        bool operator!=(const iterator& o) const { return i_ != o.i_; }

    private:
        const GroupSpec* spec_;
        std::uint64_t i_;
    };

    iterator begin() const { return iterator(&spec_, 0); }
    iterator end() const { return iterator(&spec_, spec_.order()); }

private:
    GroupSpec spec_;
};

CharacterRange enumerate_characters(const GroupSpec& spec, const Caps& caps = {});

/// Finite weighted multiset over G^n; normalizing by total_weight gives
/// the distribution whose bias the toolkit measures.
class WeightedSet {
public:
    WeightedSet() = default;
    explicit WeightedSet(GroupSpec spec) : spec_(std::move(spec)) {}

    const GroupSpec& spec() const { return spec_; }
    void add_entry(const GroupElement& x, double weight);
    void add_entry_index(std::uint64_t index, double weight);

    const std::vector<std::pair<std::uint64_t, double>>& entries() const { return entries_; }
    double total_weight() const { return total_weight_; }
    std::uint64_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Merge duplicate support points (weights summed, index order).
    WeightedSet merged() const;

    /// Dense normalized mass function indexed by element index.
    /// Requires order <= cap.
    std::vector<double> normalized_mass(std::uint64_t cap) const;

    GroupElement element_at(std::uint64_t entry) const { return element_of(spec_, entries_[entry].first); }

private:
    GroupSpec spec_;
    std::vector<std::pair<std::uint64_t, double>> entries_;
    double total_weight_ = 0.0;
};

/// Uniform distribution over the whole group.
WeightedSet uniform_set(const GroupSpec& spec, const Caps& caps = {});

} // namespace forge
