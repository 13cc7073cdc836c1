#include "forge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include <Eigen/Dense>

namespace forge {

void RotationGraph::validate() const {
    if (num_vertices == 0 || degree == 0) throw structural_error("rotation graph has no vertices or ports");
    const std::size_t slots = static_cast<std::size_t>(num_vertices) * degree;
    if (rot_vertex.size() != slots || rot_port.size() != slots) {
        throw structural_error("rotation map has wrong number of entries");
    }
    for (std::uint32_t v = 0; v < num_vertices; ++v) {
        for (std::uint32_t i = 0; i < degree; ++i) {
            const std::uint32_t w = neighbor(v, i);
            const std::uint32_t j = return_port(v, i);
            if (w >= num_vertices || j >= degree) throw structural_error("rotation entry out of range");
            if (neighbor(w, j) != v || return_port(w, j) != i) {
                std::ostringstream os;
                os << "rotation map is not an involution at (" << v << "," << i << ")";
                throw structural_error(os.str());
            }
        }
    }
    if (local_inversion) {
        const auto& phi = *local_inversion;
        if (phi.size() != degree) throw structural_error("local inversion has wrong length");
        std::vector<bool> seen(degree, false);
        for (auto p : phi) {
            if (p >= degree || seen[p]) throw structural_error("local inversion is not a permutation");
            seen[p] = true;
        }
        for (std::uint32_t v = 0; v < num_vertices; ++v) {
            for (std::uint32_t i = 0; i < degree; ++i) {
                if (return_port(v, i) != phi[i]) {
                    throw structural_error("rotation map violates the local inversion law");
                }
            }
        }
    }
}

std::string to_string(SpectralCert::Method m) {
    return m == SpectralCert::Method::exact_dense ? "exact-dense" : "power-iteration";
}

RotationGraph build_cayley_graph(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                 const Caps& caps) {
    if (generators.empty()) throw domain_error("Cayley graph needs at least one generator");
    if (group.order() > caps.enum_cap) {
        throw capacity_error("Cayley graph vertex count exceeds enum_cap");
    }
    const std::uint32_t degree = static_cast<std::uint32_t>(generators.size());
    std::vector<std::uint64_t> gen_idx(degree);
    for (std::uint32_t i = 0; i < degree; ++i) gen_idx[i] = group.index_of(generators[i].coords);

    // Pair each port with the first unpaired port holding the inverse
    // generator; involutions pair with themselves.
    std::vector<std::uint32_t> phi(degree, degree);
    for (std::uint32_t i = 0; i < degree; ++i) {
        if (phi[i] != degree) continue;
        const std::uint64_t inv = group.negate(gen_idx[i]);
        if (inv == gen_idx[i]) {
            phi[i] = i;
            continue;
        }
        bool found = false;
        for (std::uint32_t j = i + 1; j < degree; ++j) {
            if (phi[j] == degree && gen_idx[j] == inv) {
                phi[i] = j;
                phi[j] = i;
                found = true;
                break;
            }
        }
        if (!found) {
            throw domain_error("generator multiset is not symmetric (missing an inverse)");
        }
    }

    const std::uint32_t v_count = static_cast<std::uint32_t>(group.order());
    RotationGraph g;
    g.num_vertices = v_count;
    g.degree = degree;
    g.rot_vertex.resize(static_cast<std::size_t>(v_count) * degree);
    g.rot_port.resize(static_cast<std::size_t>(v_count) * degree);
    for (std::uint32_t v = 0; v < v_count; ++v) {
        for (std::uint32_t i = 0; i < degree; ++i) {
            const std::size_t slot = static_cast<std::size_t>(v) * degree + i;
            g.rot_vertex[slot] = static_cast<std::uint32_t>(group.add(v, gen_idx[i]));
            g.rot_port[slot] = phi[i];
        }
    }
    g.local_inversion = phi;
    return g;
}

namespace {

constexpr std::uint32_t kDenseLimit = 4096;
constexpr std::uint32_t kPowerIterCap = 100000;
constexpr double kPowerTol = 1e-8;

SpectralCert dense_cert(const RotationGraph& g) {
    const std::uint32_t n = g.num_vertices;
    Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(n, n);
    const double step = 1.0 / g.degree;
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t i = 0; i < g.degree; ++i) {
            walk(g.neighbor(v, i), v) += step;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(walk, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues(); // ascending
    SpectralCert cert;
    cert.method = SpectralCert::Method::exact_dense;
    cert.tolerance = 1e-10;
    if (n == 1) {
        cert.lambda = 0.0;
        return cert;
    }
    cert.lambda = std::min(1.0, std::max(std::abs(ev(0)), std::abs(ev(n - 2))));
    return cert;
}

SpectralCert power_cert(const RotationGraph& g) {
    const std::uint32_t n = g.num_vertices;
    std::vector<double> v(n), w(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        v[i] = static_cast<double>((i * 2654435761ull + 104729) % 1000003) / 1000003.0 - 0.5;
    }
    const auto deflate = [&](std::vector<double>& x) {
        double mean = 0.0;
        for (double xi : x) mean += xi;
        mean /= n;
        for (double& xi : x) xi -= mean;
    };
    const auto norm = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return std::sqrt(s);
    };
    deflate(v);
    double nv = norm(v);
    for (double& xi : v) xi /= nv;

    double est = 0.0;
    const double step = 1.0 / g.degree;
    for (std::uint32_t iter = 0; iter < kPowerIterCap; ++iter) {
        std::fill(w.begin(), w.end(), 0.0);
#pragma omp parallel for schedule(static)
        for (std::int64_t vert = 0; vert < static_cast<std::int64_t>(n); ++vert) {
            double acc = 0.0;
            for (std::uint32_t i = 0; i < g.degree; ++i) {
                acc += v[g.neighbor(static_cast<std::uint32_t>(vert), i)];
            }
            w[vert] = acc * step;
        }
        deflate(w);
        const double nw = norm(w);
        if (nw < 1e-300) {
            est = 0.0;
            break;
        }
        const double next = nw; // ||Mv|| with ||v|| = 1
        for (std::uint32_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (iter > 4 && std::abs(next - est) <= kPowerTol * std::max(1.0, next)) {
            est = next;
            break;
        }
        est = next;
    }
    SpectralCert cert;
    cert.method = SpectralCert::Method::power_iteration;
    cert.tolerance = kPowerTol;
    cert.lambda = std::min(1.0, est + kPowerTol);
    return cert;
}

} // namespace

SpectralCert second_eigenvalue(const RotationGraph& g) {
    g.validate();
    return g.num_vertices <= kDenseLimit ? dense_cert(g) : power_cert(g);
}

double cayley_lambda_from_charsums(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                   const Caps& caps) {
    WeightedSet gens(group);
    for (const auto& g : generators) gens.add_entry(g, 1.0);
    return bias_brute_force(gens, caps).bias;
}

namespace {

/// Greedy growth of a symmetric multiset over Z_2^r, tracking integer
/// Walsh sums so every candidate's effect on the worst character is exact.
struct XorGreedy {
    std::uint32_t r;
    std::vector<std::int32_t> walsh; // per character c: sum over gens of (-1)^{c.g}
    std::vector<std::uint64_t> picks;

    explicit XorGreedy(std::uint32_t r_) : r(r_), walsh(1ull << r_, 0) {}

    double lambda() const {
        if (picks.empty()) return 1.0;
        std::int32_t worst = 0;
        for (std::size_t c = 1; c < walsh.size(); ++c) worst = std::max(worst, std::abs(walsh[c]));
        return static_cast<double>(worst) / static_cast<double>(picks.size());
    }

    // fourth-moment score; the max norm ties across candidates because
    // most characters are untouched by any single generator
    unsigned __int128 candidate_score(std::uint64_t g) const {
        unsigned __int128 total = 0;
        for (std::size_t c = 1; c < walsh.size(); ++c) {
            const std::int64_t s = walsh[c] + (__builtin_parityll(c & g) ? -1 : 1);
            const std::uint64_t sq = static_cast<std::uint64_t>(s * s);
            total += static_cast<unsigned __int128>(sq) * sq;
        }
        return total;
    }

    void add(std::uint64_t g) {
        for (std::size_t c = 0; c < walsh.size(); ++c) {
            walsh[c] += __builtin_parityll(c & g) ? -1 : 1;
        }
        picks.push_back(g);
    }

    void grow_one() {
        const std::uint64_t space = 1ull << r;
        std::vector<std::uint64_t> candidates;
        if (r <= 9) {
            candidates.reserve(space - 1);
            for (std::uint64_t g = 1; g < space; ++g) candidates.push_back(g);
        } else {
            // fixed multiplicative probe sequence; keeps rounds affordable
            for (std::uint64_t i = 0; i < 192; ++i) {
                candidates.push_back((i * 2654435761ull + 97) % (space - 1) + 1);
            }
            std::sort(candidates.begin(), candidates.end());
            candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        }
        std::vector<unsigned __int128> scores(candidates.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
            scores[i] = candidate_score(candidates[i]);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (scores[i] < scores[best]) best = i;
        }
        add(candidates[best]);
    }
};

RotationGraph xor_cayley(std::uint32_t r, const std::vector<std::uint64_t>& gens) {
    RotationGraph g;
    g.num_vertices = 1u << r;
    g.degree = static_cast<std::uint32_t>(gens.size());
    g.rot_vertex.resize(static_cast<std::size_t>(g.num_vertices) * g.degree);
    g.rot_port.resize(static_cast<std::size_t>(g.num_vertices) * g.degree);
    for (std::uint32_t v = 0; v < g.num_vertices; ++v) {
        for (std::uint32_t i = 0; i < g.degree; ++i) {
            const std::size_t slot = static_cast<std::size_t>(v) * g.degree + i;
            g.rot_vertex[slot] = v ^ static_cast<std::uint32_t>(gens[i]);
            g.rot_port[slot] = i; // every generator is an involution
        }
    }
    g.local_inversion = std::vector<std::uint32_t>(g.degree);
    for (std::uint32_t i = 0; i < g.degree; ++i) (*g.local_inversion)[i] = i;
    return g;
}

InnerGraph finish_inner(std::uint32_t m, std::uint32_t s, XorGreedy&& greedy) {
    InnerGraph out;
    out.m = m;
    out.s = s;
    out.generators = std::move(greedy.picks);
    out.graph = xor_cayley(m * s, out.generators);
    out.cert.method = SpectralCert::Method::exact_dense; // integer character sums
    out.cert.tolerance = 1e-12;
    std::int32_t worst = 0;
    for (std::size_t c = 1; c < greedy.walsh.size(); ++c) worst = std::max(worst, std::abs(greedy.walsh[c]));
    out.cert.lambda = static_cast<double>(worst) / static_cast<double>(out.generators.size());
    return out;
}

void check_inner_size(std::uint32_t m, std::uint32_t s) {
    if (m == 0 || s == 0) throw domain_error("inner graph needs m >= 1 and s >= 1");
    if (static_cast<std::uint64_t>(m) * s > 24) {
        throw capacity_error("inner graph cap m*s <= 24 exceeded");
    }
}

} // namespace

InnerGraph build_inner_graph(std::uint32_t m, std::uint32_t s, double target_lambda,
                             std::uint32_t max_degree, const Caps&) {
    check_inner_size(m, s);
    const std::uint32_t r = m * s;
    XorGreedy greedy(r);
    while (greedy.picks.size() < max_degree) {
        greedy.grow_one();
        if (greedy.picks.size() >= 2 && greedy.lambda() <= target_lambda) {
            return finish_inner(m, s, std::move(greedy));
        }
    }
    if (greedy.lambda() <= target_lambda) return finish_inner(m, s, std::move(greedy));
    std::ostringstream os;
    os << "inner graph search budget exhausted: best lambda " << greedy.lambda() << " at degree "
       << greedy.picks.size() << ", target " << target_lambda;
    throw capacity_error(os.str());
}

InnerGraph build_inner_graph_fixed_degree(std::uint32_t m, std::uint32_t s, std::uint32_t degree,
                                          const Caps&) {
    check_inner_size(m, s);
    if (degree == 0) throw domain_error("inner graph degree must be positive");
    const std::uint32_t r = m * s;
    XorGreedy greedy(r);
    const std::uint64_t space = 1ull << r;
    if (degree % space == 0) {
        // exact multiple of the whole group: lambda is exactly 0
        for (std::uint64_t rep = 0; rep < degree / space; ++rep) {
            for (std::uint64_t g = 0; g < space; ++g) greedy.add(g);
        }
    } else {
        while (greedy.picks.size() < degree) greedy.grow_one();
    }
    return finish_inner(m, s, std::move(greedy));
}

namespace {

/// Greedy symmetric generator search over Z_N via exact character sums.
struct CyclicGreedy {
    std::uint32_t n;
    std::vector<cplx> sums; // per character c
    std::vector<cplx> omega;
    std::vector<std::uint32_t> picks; // residues, pair picks recorded as g then n-g

    explicit CyclicGreedy(std::uint32_t n_) : n(n_), sums(n_, cplx(0, 0)), omega(n_) {
        for (std::uint32_t r = 0; r < n_; ++r) {
            omega[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / n_);
        }
    }

    double lambda() const {
        if (picks.empty()) return 1.0;
        double worst = 0.0;
        for (std::uint32_t c = 1; c < n; ++c) worst = std::max(worst, std::abs(sums[c]));
        return worst / static_cast<double>(picks.size());
    }

    // adds {g, n-g} as a pair, or the single involution when 2g = 0 mod n
    void add(std::uint32_t g) {
        const std::uint32_t inv = (n - g) % n;
        for (std::uint32_t c = 0; c < n; ++c) {
            sums[c] += omega[(static_cast<std::uint64_t>(c) * g) % n];
            if (inv != g) sums[c] += omega[(static_cast<std::uint64_t>(c) * inv) % n];
        }
        picks.push_back(g);
        if (inv != g) picks.push_back(inv);
    }

    // fourth moment, for the same tie-breaking reason as the binary search
    double candidate_score(std::uint32_t g) const {
        const std::uint32_t inv = (n - g) % n;
        double total = 0.0;
        for (std::uint32_t c = 1; c < n; ++c) {
            cplx s = sums[c] + omega[(static_cast<std::uint64_t>(c) * g) % n];
            if (inv != g) s += omega[(static_cast<std::uint64_t>(c) * inv) % n];
            const double sq = s.real() * s.real() + s.imag() * s.imag();
            total += sq * sq;
        }
        return total;
    }
};

} // namespace

OuterGraph build_outer_graph(std::uint32_t num_vertices, std::uint32_t degree, double target_lambda,
                             const Caps& caps) {
    if (degree >= num_vertices) throw domain_error("outer graph needs degree < num_vertices");
    if (num_vertices > caps.enum_cap) throw capacity_error("outer graph vertex count exceeds enum_cap");
    // rigorous trace floor: lambda >= sqrt((N-D)/(D*(N-1))) for any D-regular graph
    const double floor = std::sqrt(static_cast<double>(num_vertices - degree) /
                                   (static_cast<double>(degree) * (num_vertices - 1)));
    if (target_lambda < floor - 1e-12) {
        std::ostringstream os;
        os << "target " << target_lambda << " is below the spectral floor " << floor << " for ("
           << num_vertices << "," << degree << ")-regular graphs";
        throw capacity_error(os.str());
    }

    CyclicGreedy greedy(num_vertices);
    while (greedy.picks.size() < degree) {
        const std::uint32_t remaining = degree - static_cast<std::uint32_t>(greedy.picks.size());
        std::vector<std::uint32_t> candidates;
        const std::uint32_t half = num_vertices / 2;
        if (remaining >= 2) {
            for (std::uint32_t g = 1; g <= half; ++g) {
                const bool involution = (2ull * g) % num_vertices == 0;
                if (!involution) candidates.push_back(g);
            }
        }
        if (remaining == 1 || candidates.empty()) {
            // only involutions fit: n/2 when even, else the identity loop
            candidates.clear();
            if (num_vertices % 2 == 0) candidates.push_back(half);
            else candidates.push_back(0);
        }
        std::vector<double> scores(candidates.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
            scores[i] = greedy.candidate_score(candidates[i]);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (scores[i] < scores[best]) best = i;
        }
        greedy.add(candidates[best]);
    }

    GroupSpec zn({num_vertices}, 1);
    std::vector<GroupElement> gens;
    gens.reserve(greedy.picks.size());
    for (auto g : greedy.picks) gens.push_back(GroupElement{{g}});
    OuterGraph out;
    out.generators = greedy.picks;
    out.graph = build_cayley_graph(zn, gens, caps);
    out.cert = second_eigenvalue(out.graph);
    if (out.cert.lambda > target_lambda + 1e-9) {
        std::ostringstream os;
        os << "outer graph search reached lambda " << out.cert.lambda << " > target " << target_lambda
           << " for (" << num_vertices << "," << degree << ")";
        throw capacity_error(os.str());
    }
    return out;
}

} // namespace forge
