#include "forge/bias.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

namespace forge {

namespace {

std::vector<cplx> root_table(std::uint32_t d) {
    std::vector<cplx> roots(d);
    for (std::uint32_t r = 0; r < d; ++r) {
        roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / d);
    }
    roots[0] = cplx(1.0, 0.0);
    return roots;
}

/// |sum over entries of w * chi_a(x)| for every character index a.
/// Entry coordinates and per-character weights are hoisted; each
/// character's sum is accumulated serially in entry order, so the result
/// is identical for the serial and parallel schedules.
std::vector<double> char_scan(const WeightedSet& dist, const Caps& caps, bool parallel) {
    if (dist.empty()) throw domain_error("bias of an empty weighted set");
    const GroupSpec& spec = dist.spec();
    if (spec.order() > caps.enum_cap) {
        std::ostringstream os;
        os << "brute-force bias needs |G|^n = " << spec.order() << " <= enum_cap = " << caps.enum_cap;
        throw capacity_error(os.str());
    }
    const WeightedSet merged = dist.merged();
    const std::uint64_t order = spec.order();
    const std::uint32_t nc = spec.num_coords();
    const std::uint32_t dk = spec.largest_factor();
    const auto roots = root_table(dk);

    std::vector<std::uint32_t> entry_coords(merged.entries().size() * nc);
    std::vector<double> entry_weight(merged.entries().size());
    for (std::size_t e = 0; e < merged.entries().size(); ++e) {
        const auto coords = spec.coords_of(merged.entries()[e].first);
        std::copy(coords.begin(), coords.end(), entry_coords.begin() + e * nc);
        entry_weight[e] = merged.entries()[e].second / merged.total_weight();
    }

    std::vector<std::uint64_t> coord_weight(nc); // (d_k / d_j) per coordinate
    for (std::uint32_t j = 0; j < nc; ++j) coord_weight[j] = dk / spec.modulus(j);

    std::vector<double> out(order, 0.0);
    const auto body = [&](std::uint64_t a) {
        const auto ac = spec.coords_of(a);
        std::vector<std::uint32_t> wa(nc);
        for (std::uint32_t j = 0; j < nc; ++j) {
            wa[j] = static_cast<std::uint32_t>((coord_weight[j] * ac[j]) % dk);
        }
        cplx sum(0.0, 0.0);
        for (std::size_t e = 0; e < entry_weight.size(); ++e) {
            std::uint64_t exp = 0;
            const std::uint32_t* xc = &entry_coords[e * nc];
            for (std::uint32_t j = 0; j < nc; ++j) exp += static_cast<std::uint64_t>(wa[j]) * xc[j];
            sum += entry_weight[e] * roots[exp % dk];
        }
        out[a] = std::abs(sum);
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(order); ++a) body(a);
    } else {
        for (std::uint64_t a = 0; a < order; ++a) body(a);
    }
    return out;
}

/// Shared witness rule for both bias paths: the exact maximum, witnessed
/// by the first index within 1e-12 of it. Conjugate characters tie in
/// exact arithmetic but not bitwise across the two computation routes;
/// the tolerance keeps the reported witness route-independent.
BiasResult max_nontrivial(const std::vector<double>& magnitudes) {
    BiasResult r;
    r.bias = 0.0;
    r.witness_index = 0;
    for (std::uint64_t a = 1; a < magnitudes.size(); ++a) {
        r.bias = std::max(r.bias, magnitudes[a]);
    }
    for (std::uint64_t a = 1; a < magnitudes.size(); ++a) {
        if (magnitudes[a] >= r.bias - 1e-12) {
            r.witness_index = a;
            break;
        }
    }
    r.bias = std::min(r.bias, 1.0);
    return r;
}

void axis_transform(std::vector<cplx>& values, std::uint64_t stride, std::uint32_t d,
                    const std::vector<cplx>& table, bool parallel) {
    const std::uint64_t order = values.size();
    const std::uint64_t lines = order / d;
    const std::uint64_t block_span = stride * d;

    const auto body = [&](std::uint64_t line) {
        const std::uint64_t block = line / stride;
        const std::uint64_t offset = line % stride;
        const std::uint64_t base = block * block_span + offset;
        cplx in[64];
        for (std::uint32_t c = 0; c < d; ++c) in[c] = values[base + c * stride];
        for (std::uint32_t p = 0; p < d; ++p) {
            cplx acc(0.0, 0.0);
            const cplx* row = &table[static_cast<std::size_t>(p) * d];
            for (std::uint32_t c = 0; c < d; ++c) acc += row[c] * in[c];
            values[base + p * stride] = acc;
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t line = 0; line < static_cast<std::int64_t>(lines); ++line) body(line);
    } else {
        for (std::uint64_t line = 0; line < lines; ++line) body(line);
    }
}

void dft_impl(const GroupSpec& spec, std::vector<cplx>& values, bool parallel) {
    if (values.size() != spec.order()) throw structural_error("transform buffer has wrong length");
    const std::uint32_t nc = spec.num_coords();
    // strides mirror GroupSpec: coordinate 0 most significant
    std::vector<std::uint64_t> strides(nc, 1);
    for (std::uint32_t j = nc; j-- > 1;) strides[j - 1] = strides[j] * spec.modulus(j);

    std::uint32_t max_d = 0;
    for (std::uint32_t j = 0; j < nc; ++j) max_d = std::max(max_d, spec.modulus(j));
    if (max_d > 64) throw capacity_error("transform path supports cyclic factors up to 64");

    for (std::uint32_t j = 0; j < nc; ++j) {
        const std::uint32_t d = spec.modulus(j);
        std::vector<cplx> table(static_cast<std::size_t>(d) * d);
        const auto roots = root_table(d);
        for (std::uint32_t p = 0; p < d; ++p)
            for (std::uint32_t c = 0; c < d; ++c)
                table[static_cast<std::size_t>(p) * d + c] = roots[(static_cast<std::uint64_t>(p) * c) % d];
        axis_transform(values, strides[j], d, table, parallel);
    }
}

BiasResult dft_bias_impl(const WeightedSet& dist, const Caps& caps, bool parallel) {
    if (dist.empty()) throw domain_error("bias of an empty weighted set");
    const GroupSpec& spec = dist.spec();
    if (spec.order() > caps.dft_cap) {
        std::ostringstream os;
        os << "transform bias needs |G|^n = " << spec.order() << " <= dft_cap = " << caps.dft_cap;
        throw capacity_error(os.str());
    }
    const auto mass = dist.normalized_mass(caps.dft_cap);
    std::vector<cplx> values(mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) values[i] = cplx(mass[i], 0.0);
    dft_impl(spec, values, parallel);
    std::vector<double> magnitudes(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) magnitudes[i] = std::abs(values[i]);
    return max_nontrivial(magnitudes);
}

} // namespace

BiasResult bias_brute_force(const WeightedSet& dist, const Caps& caps) {
    return max_nontrivial(char_scan(dist, caps, true));
}

BiasResult bias_via_dft(const WeightedSet& dist, const Caps& caps) {
    return dft_bias_impl(dist, caps, true);
}

std::vector<double> char_sum_magnitudes(const WeightedSet& dist, const Caps& caps) {
    return char_scan(dist, caps, true);
}

void mixed_radix_dft(const GroupSpec& spec, std::vector<cplx>& values) {
    dft_impl(spec, values, true);
}

namespace serial_ref {

BiasResult bias_brute_force(const WeightedSet& dist, const Caps& caps) {
    return max_nontrivial(char_scan(dist, caps, false));
}

BiasResult bias_via_dft(const WeightedSet& dist, const Caps& caps) {
    return dft_bias_impl(dist, caps, false);
}

void mixed_radix_dft(const GroupSpec& spec, std::vector<cplx>& values) {
    dft_impl(spec, values, false);
}

} // namespace serial_ref

double statistical_distance(const WeightedSet& p, const WeightedSet& q, const Caps& caps) {
    if (p.spec() != q.spec()) throw structural_error("statistical distance needs matching group specs");
    const auto mp = p.normalized_mass(caps.enum_cap);
    const auto mq = q.normalized_mass(caps.enum_cap);
    double acc = 0.0;
    for (std::size_t i = 0; i < mp.size(); ++i) acc += std::abs(mp[i] - mq[i]);
    return 0.5 * acc;
}

WeightedSet restrict_to(const WeightedSet& dist, const std::vector<std::uint32_t>& indices) {
    if (indices.empty()) throw domain_error("restriction needs a nonempty index set");
    std::vector<std::uint32_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const GroupSpec& spec = dist.spec();
    for (auto i : sorted) {
        if (i >= spec.dimension()) throw domain_error("restriction index out of range");
    }
    GroupSpec sub(spec.factors(), static_cast<std::uint32_t>(sorted.size()));
    const std::uint32_t k = spec.num_factors();
    WeightedSet out(sub);
    for (const auto& [idx, w] : dist.entries()) {
        const auto coords = spec.coords_of(idx);
        std::vector<std::uint32_t> sub_coords(sub.num_coords());
        for (std::uint32_t b = 0; b < sorted.size(); ++b) {
            for (std::uint32_t i = 0; i < k; ++i) {
                sub_coords[b * k + i] = coords[sorted[b] * k + i];
            }
        }
        out.add_entry_index(sub.index_of(sub_coords), w);
    }
    return out.merged();
}

} // namespace forge
