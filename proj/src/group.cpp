#include "forge/group.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace forge {

namespace {

constexpr std::uint64_t kMaxOrder = 1ull << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kMaxOrder / a) {
        throw domain_error("group order overflows the accepted size range");
    }
    return a * b;
}

} // namespace

GroupSpec::GroupSpec(std::vector<std::uint32_t> invariant_factors, std::uint32_t dimension)
    : factors_(std::move(invariant_factors)), n_(dimension) {
    if (factors_.empty()) throw domain_error("invariant factor list is empty");
    if (n_ < 1) throw domain_error("dimension must be at least 1");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i] < 2) throw domain_error("invariant factors must be at least 2");
        if (i + 1 < factors_.size() && factors_[i + 1] % factors_[i] != 0) {
            std::ostringstream os;
            os << "not in invariant-factor form: " << factors_[i] << " does not divide " << factors_[i + 1];
            throw domain_error(os.str());
        }
    }
    base_order_ = 1;
    for (auto d : factors_) base_order_ = checked_mul(base_order_, d);
    order_ = 1;
    for (std::uint32_t b = 0; b < n_; ++b) order_ = checked_mul(order_, base_order_);

    const std::uint32_t nc = num_coords();
    strides_.assign(nc, 1);
    for (std::uint32_t j = nc; j-- > 1;) {
        strides_[j - 1] = strides_[j] * modulus(j);
    }
}

std::uint64_t GroupSpec::index_of(const std::vector<std::uint32_t>& coords) const {
    if (coords.size() != num_coords()) throw structural_error("coordinate vector has wrong length");
    std::uint64_t idx = 0;
    for (std::uint32_t j = 0; j < coords.size(); ++j) {
        if (coords[j] >= modulus(j)) throw domain_error("coordinate not reduced modulo its factor");
        idx += coords[j] * strides_[j];
    }
    return idx;
}

std::vector<std::uint32_t> GroupSpec::coords_of(std::uint64_t index) const {
    std::vector<std::uint32_t> coords(num_coords());
    for (std::uint32_t j = 0; j < coords.size(); ++j) {
        coords[j] = static_cast<std::uint32_t>((index / strides_[j]) % modulus(j));
    }
    return coords;
}

std::uint64_t GroupSpec::add(std::uint64_t x, std::uint64_t y) const {
    std::uint64_t out = 0;
    for (std::uint32_t j = 0; j < num_coords(); ++j) {
        const std::uint32_t d = modulus(j);
        const std::uint64_t cx = (x / strides_[j]) % d;
        const std::uint64_t cy = (y / strides_[j]) % d;
        out += ((cx + cy) % d) * strides_[j];
    }
    return out;
}

std::uint64_t GroupSpec::negate(std::uint64_t x) const {
    std::uint64_t out = 0;
    for (std::uint32_t j = 0; j < num_coords(); ++j) {
        const std::uint32_t d = modulus(j);
        const std::uint64_t cx = (x / strides_[j]) % d;
        out += ((d - cx) % d) * strides_[j];
    }
    return out;
}

std::vector<std::uint32_t> normalize_factors(const std::vector<std::uint32_t>& cyclic_orders) {
    if (cyclic_orders.empty()) throw domain_error("factor list is empty");
    // Split each order into prime powers, then regroup: the j-th invariant
    // factor (from the top) multiplies the j-th largest power of each prime.
    std::map<std::uint32_t, std::vector<std::uint32_t>> prime_powers;
    for (auto d : cyclic_orders) {
        if (d < 2) throw domain_error("cyclic orders must be at least 2");
        std::uint32_t rest = d;
        for (std::uint32_t p = 2; p * p <= rest; ++p) {
            if (rest % p != 0) continue;
            std::uint32_t pk = 1;
            while (rest % p == 0) {
                pk *= p;
                rest /= p;
            }
            prime_powers[p].push_back(pk);
        }
        if (rest > 1) prime_powers[rest].push_back(rest);
    }
    std::size_t count = 0;
    for (auto& [p, powers] : prime_powers) {
        std::sort(powers.begin(), powers.end(), std::greater<>());
        count = std::max(count, powers.size());
    }
    std::vector<std::uint32_t> invariant(count, 1);
    for (auto& [p, powers] : prime_powers) {
        for (std::size_t i = 0; i < powers.size(); ++i) {
            invariant[i] = invariant[i] * powers[i]; // i-th largest lands in i-th-from-top factor
        }
    }
    std::reverse(invariant.begin(), invariant.end()); // ascending, d_i | d_{i+1}
    return invariant;
}

GroupElement element_of(const GroupSpec& spec, std::uint64_t index) {
    return GroupElement{spec.coords_of(index)};
}

GroupElement add(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
    return element_of(spec, spec.add(spec.index_of(a.coords), spec.index_of(b.coords)));
}

GroupElement negate(const GroupSpec& spec, const GroupElement& a) {
    return element_of(spec, spec.negate(spec.index_of(a.coords)));
}

GroupElement identity(const GroupSpec& spec) {
    return GroupElement{std::vector<std::uint32_t>(spec.num_coords(), 0)};
}

bool Character::trivial() const {
    return std::all_of(index.coords.begin(), index.coords.end(), [](std::uint32_t c) { return c == 0; });
}

std::uint32_t char_exponent(const GroupSpec& spec, std::uint64_t a_index, std::uint64_t x_index) {
    const std::uint32_t dk = spec.largest_factor();
    const auto a = spec.coords_of(a_index);
    const auto x = spec.coords_of(x_index);
    std::uint64_t e = 0;
    for (std::uint32_t j = 0; j < a.size(); ++j) {
        const std::uint64_t w = dk / spec.modulus(j);
        e = (e + (w * a[j]) % dk * x[j]) % dk;
    }
    return static_cast<std::uint32_t>(e);
}

cplx char_eval(const Character& chi, const GroupElement& x) {
    if (chi.group.num_coords() != x.coords.size()) {
        throw structural_error("character and element come from different group specs");
    }
    const GroupSpec& spec = chi.group;
    const std::uint32_t e =
        char_exponent(spec, spec.index_of(chi.index.coords), spec.index_of(x.coords));
    if (e == 0) return cplx(1.0, 0.0);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(e) / spec.largest_factor();
    return std::polar(1.0, angle);
}

CharacterRange::CharacterRange(GroupSpec spec, const Caps& caps) : spec_(std::move(spec)) {
    if (spec_.order() > caps.enum_cap) {
        std::ostringstream os;
        os << "character enumeration needs |G|^n = " << spec_.order() << " <= enum_cap = " << caps.enum_cap;
        throw capacity_error(os.str());
    }
}

CharacterRange enumerate_characters(const GroupSpec& spec, const Caps& caps) {
    return CharacterRange(spec, caps);
}

void WeightedSet::add_entry(const GroupElement& x, double weight) {
    add_entry_index(spec_.index_of(x.coords), weight);
}

void WeightedSet::add_entry_index(std::uint64_t index, double weight) {
    if (weight <= 0.0) throw domain_error("weighted set entries need positive weight");
    if (index >= spec_.order()) throw domain_error("element index out of range");
    entries_.emplace_back(index, weight);
    total_weight_ += weight;
}

WeightedSet WeightedSet::merged() const {
    std::vector<std::pair<std::uint64_t, double>> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    WeightedSet out(spec_);
    for (const auto& [idx, w] : sorted) {
        if (!out.entries_.empty() && out.entries_.back().first == idx) {
            out.entries_.back().second += w;
            out.total_weight_ += w;
        } else {
            out.add_entry_index(idx, w);
        }
    }
    return out;
}

std::vector<double> WeightedSet::normalized_mass(std::uint64_t cap) const {
    if (empty()) throw domain_error("weighted set is empty");
    if (spec_.order() > cap) {
        std::ostringstream os;
        os << "dense mass needs |G|^n = " << spec_.order() << " <= cap = " << cap;
        throw capacity_error(os.str());
    }
    std::vector<double> mass(spec_.order(), 0.0);
    for (const auto& [idx, w] : entries_) mass[idx] += w / total_weight_;
    return mass;
}

WeightedSet uniform_set(const GroupSpec& spec, const Caps& caps) {
    if (spec.order() > caps.enum_cap) {
        throw capacity_error("uniform set materialization exceeds enum_cap");
    }
    WeightedSet out(spec);
    for (std::uint64_t i = 0; i < spec.order(); ++i) out.add_entry_index(i, 1.0);
    return out;
}

} // namespace forge
