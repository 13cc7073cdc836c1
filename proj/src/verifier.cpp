#include "forge/verifier.hpp"

#include "forge/wide_walk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include <Eigen/Dense>

namespace forge {

namespace {

struct ProductDims {
    std::uint32_t n1;
    std::uint64_t n2;
    std::uint32_t m;
    std::uint64_t mask;
};

ProductDims product_dims(const LabeledExpander& gamma, const RotationGraph& h, std::uint32_t s) {
    if (!gamma.graph.local_inversion) throw structural_error("outer graph needs a local inversion");
    const std::uint32_t d1 = gamma.graph.degree;
    if (d1 == 0 || (d1 & (d1 - 1)) != 0) throw structural_error("outer degree must be a power of two");
    const std::uint32_t m = static_cast<std::uint32_t>(std::countr_zero(d1));
    const std::uint64_t n2 = 1ull << (static_cast<std::uint64_t>(m) * s);
    if (h.num_vertices != n2) throw structural_error("inner vertex count does not match (2^m)^s");
    if (gamma.labels.size() != gamma.graph.num_vertices) throw structural_error("label table has wrong length");
    return ProductDims{gamma.graph.num_vertices, n2, m, (1ull << m) - 1};
}

std::vector<cplx> char_diag(const Character& chi, const LabeledExpander& gamma) {
    if (chi.group != gamma.spec) throw structural_error("character and labels come from different group specs");
    const GroupSpec& spec = gamma.spec;
    const std::uint32_t dk = spec.largest_factor();
    std::vector<cplx> roots(dk);
    for (std::uint32_t r = 0; r < dk; ++r) {
        roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / dk);
    }
    roots[0] = cplx(1.0, 0.0);
    const std::uint64_t a = spec.index_of(chi.index.coords);
    std::vector<cplx> diag(gamma.labels.size());
    for (std::size_t v = 0; v < gamma.labels.size(); ++v) {
        diag[v] = roots[char_exponent(spec, a, gamma.labels[v])];
    }
    return diag;
}

/// One transfer pass: v <- Pi u; then per step v <- Pi Gamma_ell H v.
/// Returns |<u, v>| with u the normalized all-ones vector.
double transfer_run(const std::vector<cplx>& diag, const LabeledExpander& gamma, const RotationGraph& h,
                    std::uint32_t s, std::uint64_t t, bool parallel) {
    const ProductDims dims = product_dims(gamma, h, s);
    const std::uint64_t size = static_cast<std::uint64_t>(dims.n1) * dims.n2;
    const auto& phi = *gamma.graph.local_inversion;
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));

    std::vector<cplx> v(size), w(size);
    for (std::uint64_t a = 0; a < dims.n1; ++a) {
        const cplx val = diag[a] * scale;
        for (std::uint64_t b = 0; b < dims.n2; ++b) v[a * dims.n2 + b] = val;
    }

    const double hstep = 1.0 / h.degree;
    for (std::uint64_t step = 0; step < t; ++step) {
        const std::uint32_t ell = static_cast<std::uint32_t>(step % s);
        const std::uint64_t shift = static_cast<std::uint64_t>(ell) * dims.m;
        // H on the inner component, then the deterministic product step,
        // then the diagonal; fused per output entry
#pragma omp parallel for schedule(static) if (parallel)
        for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(size); ++idx) {
            const std::uint32_t a = static_cast<std::uint32_t>(idx / dims.n2);
            const std::uint64_t b = static_cast<std::uint64_t>(idx) % dims.n2;
            // gather through the involution step map
            const std::uint32_t j = static_cast<std::uint32_t>((b >> shift) & dims.mask);
            const std::uint32_t src_a = gamma.graph.neighbor(a, j);
            const std::uint64_t src_b =
                (b & ~(dims.mask << shift)) | (static_cast<std::uint64_t>(phi[j]) << shift);
            // H applied at the source inner vertex
            cplx acc(0.0, 0.0);
            for (std::uint32_t i = 0; i < h.degree; ++i) {
                acc += v[static_cast<std::uint64_t>(src_a) * dims.n2 +
                         h.neighbor(static_cast<std::uint32_t>(src_b), i)];
            }
            w[idx] = diag[a] * (acc * hstep);
        }
        v.swap(w);
    }

    cplx dot(0.0, 0.0);
    for (std::uint64_t idx = 0; idx < size; ++idx) dot += v[idx];
    return std::abs(dot * scale);
}

} // namespace

double transfer_bias(const Character& chi, const LabeledExpander& gamma, const RotationGraph& h,
                     std::uint32_t s, std::uint64_t t) {
    return transfer_run(char_diag(chi, gamma), gamma, h, s, t, true);
}

BiasResult transfer_bias_all(const LabeledExpander& gamma, const RotationGraph& h, std::uint32_t s,
                             std::uint64_t t, const Caps& caps) {
    const GroupSpec& spec = gamma.spec;
    if (spec.order() > caps.enum_cap) {
        throw capacity_error("per-character transfer sweep needs |G|^n within enum_cap");
    }
    const std::uint64_t order = spec.order();
    const ProductDims dims = product_dims(gamma, h, s);
    const bool outer_parallel = static_cast<std::uint64_t>(dims.n1) * dims.n2 < (1ull << 16);

    std::vector<double> values(order, 0.0);
#pragma omp parallel for schedule(dynamic) if (outer_parallel)
    for (std::int64_t a = 1; a < static_cast<std::int64_t>(order); ++a) {
        const Character chi{spec, element_of(spec, static_cast<std::uint64_t>(a))};
        values[a] = transfer_run(char_diag(chi, gamma), gamma, h, s, t, !outer_parallel);
    }

    BiasResult r;
    r.bias = 0.0;
    r.witness_index = order > 1 ? 1 : 0;
    for (std::uint64_t a = 1; a < order; ++a) r.bias = std::max(r.bias, values[a]);
    for (std::uint64_t a = 1; a < order; ++a) {
        if (values[a] >= r.bias - 1e-12) {
            r.witness_index = a;
            break;
        }
    }
    return r;
}

namespace {

double spectral_norm(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.adjoint() * m, Eigen::EigenvaluesOnly);
    const double top = solver.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

} // namespace

NormCheck check_pi_gamma_squared(const Character& chi, const LabeledExpander& gamma, const Caps& caps) {
    const std::uint32_t n1 = gamma.graph.num_vertices;
    if (n1 > caps.dense_norm_cap) {
        throw capacity_error("dense norm check needs N1 within dense_norm_cap");
    }
    const auto diag = char_diag(chi, gamma);

    Eigen::MatrixXcd walk = Eigen::MatrixXcd::Zero(n1, n1);
    const double step = 1.0 / gamma.graph.degree;
    for (std::uint32_t v = 0; v < n1; ++v) {
        for (std::uint32_t i = 0; i < gamma.graph.degree; ++i) {
            walk(gamma.graph.neighbor(v, i), v) += step;
        }
    }
    Eigen::MatrixXcd pg = Eigen::MatrixXcd::Zero(n1, n1);
    for (std::uint32_t r = 0; r < n1; ++r) pg.row(r) = diag[r] * walk.row(r);

    NormCheck out;
    out.value = spectral_norm(pg * pg);
    if (chi.trivial()) {
        out.skipped = true;
        out.bound = 1.0;
        out.ok = out.value <= out.bound + 1e-8;
        return out;
    }
    WeightedSet labels(gamma.spec);
    for (auto l : gamma.labels) labels.add_entry_index(l, 1.0);
    const double eps0 = bias_brute_force(labels, caps).bias;
    const double lambda = second_eigenvalue(gamma.graph).lambda;
    out.bound = eps0 + 2.0 * lambda;
    out.ok = out.value <= out.bound + 1e-8;
    return out;
}

NormCheck check_wide_norm(const Character& chi, const LabeledExpander& gamma, const RotationGraph& h,
                          const WideCheckContext& ctx, const Caps& caps) {
    if (ctx.eps0 + 2.0 * ctx.lambda_gamma > ctx.lambda_h * ctx.lambda_h + 1e-12) {
        std::ostringstream os;
        os << "plan hypothesis violated: eps0 + 2*lambda_Gamma = " << ctx.eps0 + 2.0 * ctx.lambda_gamma
           << " > lambda_H^2 = " << ctx.lambda_h * ctx.lambda_h;
        throw plan_error(os.str());
    }
    const ProductDims dims = product_dims(gamma, h, ctx.s);
    const std::uint64_t size = static_cast<std::uint64_t>(dims.n1) * dims.n2;
    if (size > caps.dense_norm_cap) {
        throw capacity_error("dense wide-norm check needs N1*N2 within dense_norm_cap");
    }
    const auto diag = char_diag(chi, gamma);
    const auto& phi = *gamma.graph.local_inversion;
    const double hstep = 1.0 / h.degree;

    const auto apply_block = [&](std::vector<cplx>& v, std::vector<cplx>& w) {
        for (std::uint32_t ell = 0; ell < ctx.s; ++ell) {
            const std::uint64_t shift = static_cast<std::uint64_t>(ell) * dims.m;
            for (std::uint64_t idx = 0; idx < size; ++idx) {
                const std::uint32_t a = static_cast<std::uint32_t>(idx / dims.n2);
                const std::uint64_t b = idx % dims.n2;
                const std::uint32_t j = static_cast<std::uint32_t>((b >> shift) & dims.mask);
                const std::uint32_t src_a = gamma.graph.neighbor(a, j);
                const std::uint64_t src_b =
                    (b & ~(dims.mask << shift)) | (static_cast<std::uint64_t>(phi[j]) << shift);
                cplx acc(0.0, 0.0);
                for (std::uint32_t i = 0; i < h.degree; ++i) {
                    acc += v[static_cast<std::uint64_t>(src_a) * dims.n2 +
                             h.neighbor(static_cast<std::uint32_t>(src_b), i)];
                }
                w[idx] = diag[a] * (acc * hstep);
            }
            v.swap(w);
        }
    };

    Eigen::MatrixXcd mat(size, size);
#pragma omp parallel
    {
        std::vector<cplx> v(size), w(size);
#pragma omp for schedule(dynamic)
        for (std::int64_t col = 0; col < static_cast<std::int64_t>(size); ++col) {
            std::fill(v.begin(), v.end(), cplx(0.0, 0.0));
            v[col] = cplx(1.0, 0.0);
            apply_block(v, w);
            for (std::uint64_t row = 0; row < size; ++row) mat(row, col) = v[row];
        }
    }

    NormCheck out;
    out.value = spectral_norm(mat);
    if (chi.trivial()) {
        out.skipped = true;
        out.bound = 1.0;
        out.ok = out.value <= out.bound + 1e-8;
        return out;
    }
    out.bound = wide_block_bound_simplified(ctx.s, ctx.lambda_h, ctx.zeta);
    out.ok = out.value <= out.bound + 1e-8;
    return out;
}

LemmaCheck xor_lemma_check(const WeightedSet& dist, const Caps& caps) {
    LemmaCheck out;
    const WeightedSet uniform = uniform_set(dist.spec(), caps);
    out.lhs = statistical_distance(dist, uniform, caps);
    const double bias = bias_via_dft(dist, caps).bias;
    out.rhs = bias * std::sqrt(static_cast<double>(dist.spec().order()));
    out.ok = out.lhs <= out.rhs + 1e-9;
    return out;
}

KwiseCheck kwise_check(const WeightedSet& dist, std::uint32_t k, const Caps& caps) {
    const GroupSpec& spec = dist.spec();
    if (k < 1 || k > spec.dimension()) throw domain_error("k must lie in [1, n]");
    double subsets = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) {
        subsets *= static_cast<double>(spec.dimension() - i) / (i + 1);
    }
    double sub_order = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) sub_order *= static_cast<double>(spec.base_order());
    if (subsets * sub_order > static_cast<double>(caps.enum_cap) * 64.0) {
        throw capacity_error("k-wise sweep exceeds the enumeration budget");
    }

    const double bias = bias_via_dft(dist, caps).bias;
    KwiseCheck out;
    out.bound = bias * std::sqrt(sub_order);

    std::vector<std::uint32_t> idx(k);
    for (std::uint32_t i = 0; i < k; ++i) idx[i] = i;
    const GroupSpec sub(spec.factors(), k);
    const WeightedSet sub_uniform = uniform_set(sub, caps);
    while (true) {
        const WeightedSet marginal = restrict_to(dist, idx);
        const double dist_u = statistical_distance(marginal, sub_uniform, caps);
        if (dist_u > out.max_restriction_distance) {
            out.max_restriction_distance = dist_u;
            out.worst_indices = idx;
        }
        // next combination in lexicographic order
        std::int32_t pos = static_cast<std::int32_t>(k) - 1;
        while (pos >= 0 && idx[pos] == spec.dimension() - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (std::uint32_t p = pos + 1; p < k; ++p) idx[p] = idx[p - 1] + 1;
    }
    out.ok = out.max_restriction_distance <= out.bound + 1e-9;
    return out;
}

} // namespace forge
