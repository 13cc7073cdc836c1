// Timing comparison between the OpenMP kernels and their serial reference
// implementations. Run with no arguments for the default sizes.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "forge/base_set.hpp"
#include "forge/bias.hpp"
#include "forge/graph.hpp"
#include "forge/wide_walk.hpp"

namespace {

struct Timing {
    double serial_s = 0.0;
    double parallel_s = 0.0;
};

void report(const char* name, const Timing& t) {
    std::printf("%-26s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name, t.serial_s,
                t.parallel_s, t.serial_s / std::max(1e-9, t.parallel_s));
}

template <typename F>
double timed(F&& f) {
    const double t0 = omp_get_wtime();
    f();
    return omp_get_wtime() - t0;
}

} // namespace

int main(int argc, char** argv) {
    int scale = 1;
    if (argc > 1) scale = std::max(1, std::atoi(argv[1]));
    forge::Caps caps;
    std::printf("threads: %d, scale: %d\n", omp_get_max_threads(), scale);

    {
        // brute-force character scan over Z_3^9 with a midsize support
        forge::GroupSpec g({3}, 9);
        forge::WeightedSet dist(g);
        for (std::uint64_t i = 0; i < 4000; ++i) {
            dist.add_entry_index((i * 2654435761ull + 17) % g.order(), 1.0);
        }
        Timing t;
        forge::BiasResult a, b;
        t.serial_s = timed([&] { a = forge::serial_ref::bias_brute_force(dist, caps); });
        t.parallel_s = timed([&] { b = forge::bias_brute_force(dist, caps); });
        report("bias char scan", t);
        if (a.bias != b.bias || a.witness_index != b.witness_index) {
            std::printf("MISMATCH in bias scan results\n");
            return 1;
        }
    }

    {
        // transform over Z_2^(18+2*scale)
        forge::GroupSpec g(std::vector<std::uint32_t>{2}, 18 + 2 * scale);
        forge::WeightedSet dist(g);
        for (std::uint64_t i = 0; i < 5000; ++i) {
            dist.add_entry_index((i * 40503ull + 11) % g.order(), 1.0);
        }
        Timing t;
        forge::BiasResult a, b;
        t.serial_s = timed([&] { a = forge::serial_ref::bias_via_dft(dist, caps); });
        t.parallel_s = timed([&] { b = forge::bias_via_dft(dist, caps); });
        report("mixed-radix transform", t);
        if (a.bias != b.bias || a.witness_index != b.witness_index) {
            std::printf("MISMATCH in transform results\n");
            return 1;
        }
    }

    {
        // pseudorandomness scan, m=3 s=3 D2=8
        forge::InnerGraph h = forge::build_inner_graph_fixed_degree(3, 3, 8, caps);
        std::vector<std::uint32_t> phi(8);
        for (std::uint32_t i = 0; i < 8; ++i) phi[i] = i ^ 1u;
        Timing t;
        double a = 0, b = 0;
        t.serial_s = timed([&] { a = forge::serial_ref::zeta_pseudorandomness(phi, h.graph, 3, caps); });
        t.parallel_s = timed([&] { b = forge::zeta_pseudorandomness(phi, h.graph, 3, caps); });
        report("pseudorandomness scan", t);
        if (a != b) {
            std::printf("MISMATCH in zeta results\n");
            return 1;
        }
    }

    {
        // walk materialization on a small product
        forge::GroupSpec g({6}, 1);
        forge::BaseSetResult base = forge::build_base_set(g, 0.1, caps);
        forge::RotationGraph outer;
        {
            forge::GroupSpec zn({static_cast<std::uint32_t>(base.picks.size())}, 1);
            std::vector<forge::GroupElement> gens{forge::GroupElement{{1}},
                                                  forge::GroupElement{{static_cast<std::uint32_t>(
                                                      base.picks.size() - 1)}}};
            outer = forge::build_cayley_graph(zn, gens, caps);
        }
        forge::WideInstance inst;
        inst.gamma = forge::label_with_picks(g, outer, base.picks);
        inst.h = forge::build_inner_graph_fixed_degree(1, 2, 4, caps).graph;
        inst.s = 2;
        inst.m = 1;
        inst.t = 8 + scale;
        Timing t;
        forge::WeightedSet a, b;
        t.serial_s = timed([&] { a = forge::serial_ref::materialize_walk_outputs(inst, caps); });
        t.parallel_s = timed([&] { b = forge::materialize_walk_outputs(inst, caps); });
        report("walk materialization", t);
        if (a.entries() != b.entries()) {
            std::printf("MISMATCH in walk outputs\n");
            return 1;
        }
    }

    return 0;
}
