#include "doctest.h"

#include "finact/graphing.hpp"

#include "testutil.hpp"

using namespace finact;
using testutil::Rng;

namespace {

Action cycle_action(std::size_t n) {
    Perm p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>((i + 1) % n);
    return Action::with_default_names(AtomSpace::uniform(n), {p});
}

// Independent exhaustive minimum-cut oracle over all undirected edge subsets.
Rat min_cut_oracle(const Graphing& g, std::uint32_t bound) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t x = 0; x < g.size(); ++x)
        for (const auto& [y, c] : g.neighbors(x)) {
            (void)c;
            if (x < y) edges.emplace_back(x, y);
        }
    REQUIRE(edges.size() <= 22);
    Rat best = rat(-1);
    for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << edges.size()); ++sel) {
        std::vector<std::vector<std::uint32_t>> adj(g.size());
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (!(sel >> i & 1)) {
                adj[edges[i].first].push_back(edges[i].second);
                adj[edges[i].second].push_back(edges[i].first);
            }
        std::vector<int> comp(g.size(), -1);
        bool ok = true;
        for (std::uint32_t s = 0; s < g.size() && ok; ++s) {
            if (comp[s] >= 0) continue;
            std::vector<std::uint32_t> stack{s};
            comp[s] = static_cast<int>(s);
            std::size_t count = 0;
            while (!stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                ++count;
                for (auto y : adj[v])
                    if (comp[y] < 0) {
                        comp[y] = static_cast<int>(s);
                        stack.push_back(y);
                    }
            }
            if (count > bound) ok = false;
        }
        if (!ok) continue;
        Rat w = 0;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (sel >> i & 1) w += g.space()->weight(edges[i].first) + g.space()->weight(edges[i].second);
        if (best < 0 || w < best) best = w;
    }
    return best;
}

} // namespace

TEST_CASE("schreier graphing structure on the 4-cycle") {
    Graphing g = build_schreier(cycle_action(4), {Word({1})});
    // Inverse closure appends g'.
    REQUIRE(g.words().size() == 2);
    CHECK(g.words()[0] == Word({1}));
    CHECK(g.words()[1] == Word({-1}));
    CHECK(g.edge_color(0, 1) == 0b01);
    CHECK(g.edge_color(1, 0) == 0b10);
    CHECK(g.edge_color(0, 2) == 0);
    CHECK(g.degree_bound() == 2);
    CHECK(g.edge_count() == 8);

    // Full edge set has measure 2 on uniform quarters.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
    for (std::uint32_t x = 0; x < 4; ++x)
        for (const auto& [y, c] : g.neighbors(x)) {
            (void)c;
            all.emplace_back(x, y);
        }
    auto em = edge_measure(g, make_edge_set(g, all));
    CHECK(em.mu_e == rat(2));
    CHECK(em.mu_left == em.mu_right);

    EdgeSet z = make_edge_set(g, {{0, 1}});
    CHECK(z.size() == 2); // swap closure
    CHECK(edge_measure(g, z).mu_e == rat(1, 2));
    CHECK(incident_vertices(g, z) == Event::of_atoms(g.space(), {0, 1}));

    CHECK_THROWS_AS(make_edge_set(g, {{0, 2}}), PreconditionError);
}

TEST_CASE("parallel word colors merge on one edge") {
    Graphing g = build_schreier(cycle_action(4), {Word({1}), Word({1, 1})});
    // Words: g, g^2, g', g^-2 (g^2 and its inverse both step by two).
    REQUIRE(g.words().size() == 4);
    CHECK(g.edge_color(0, 2) == ((std::uint64_t{1} << 1) | (std::uint64_t{1} << 3)));
    CHECK(g.edge_color(0, 1) == 0b001);
    CHECK(g.degree_bound() == 3);
    // Identity words never contribute edges.
    Graphing gid = build_schreier(cycle_action(4), {Word(), Word({1})});
    CHECK(gid.words().size() == 2);
}

TEST_CASE("vertex colors follow the parameter events") {
    Action a = cycle_action(4);
    Event p0 = Event::of_atoms(a.space(), {0, 1});
    Event p1 = Event::of_atoms(a.space(), {1});
    Graphing g = build_schreier(a, {Word({1})}, {p0, p1});
    CHECK(g.vertex_color(0) == 0b01);
    CHECK(g.vertex_color(1) == 0b11);
    CHECK(g.vertex_color(2) == 0);
}

TEST_CASE("components after removing an edge set") {
    Graphing g = build_schreier(cycle_action(4), {Word({1})});
    EdgeSet z = make_edge_set(g, {{0, 1}, {2, 3}});
    Subalgebra parts = components(g, z);
    REQUIRE(parts.block_count() == 2);
    CHECK(parts.block(0) == Event::of_atoms(g.space(), {0, 3}));
    CHECK(parts.block(1) == Event::of_atoms(g.space(), {1, 2}));
    CHECK(components(g, EdgeSet{}).block_count() == 1);
}

TEST_CASE("sandwich inequalities for random edge sets") {
    Rng rng(20240816);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 10);
        const std::size_t n = nd(rng);
        auto sp = AtomSpace::uniform(n);
        std::vector<Perm> gens{testutil::random_perm(n, rng), testutil::random_perm(n, rng)};
        Graphing g = build_schreier(Action::with_default_names(sp, gens),
                                    {Word({1}), Word({2})});
        // Random subset of edges.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen;
        std::uniform_int_distribution<int> coin(0, 1);
        for (std::uint32_t x = 0; x < g.size(); ++x)
            for (const auto& [y, c] : g.neighbors(x)) {
                (void)c;
                if (x < y && coin(rng)) chosen.emplace_back(x, y);
            }
        EdgeSet z = make_edge_set(g, chosen);
        const Rat me = edge_measure(g, z).mu_e;
        const Rat vi = incident_vertices(g, z).measure();
        CHECK(rat(1, 2) * vi <= me);
        CHECK(me <= rat(static_cast<long>(g.degree_bound())) * vi);
        CHECK(vi <= rat(2) * me);
    }
}

TEST_CASE("hyperfinite decomposition: pinned cycle costs") {
    // 12-cycle with M = 4: three cuts, mu_e = 1/2.
    Graphing g12 = build_schreier(cycle_action(12), {Word({1})});
    auto exact = hyperfinite_decomposition(g12, 4, DecompositionStrategy::exact);
    CHECK(exact.mu_e == rat(1, 2));
    CHECK(exact.component_partition.block_count() == 3);
    auto greedy = hyperfinite_decomposition(g12, 4, DecompositionStrategy::greedy);
    CHECK(greedy.mu_e >= exact.mu_e);
    for (std::uint32_t b = 0; b < greedy.component_partition.block_count(); ++b)
        CHECK(greedy.component_partition.block(b).count() <= 4);

    // 4-cycle with M = 2 forces two cuts: mu_e = 1.
    Graphing g4 = build_schreier(cycle_action(4), {Word({1})});
    CHECK(hyperfinite_decomposition(g4, 2, DecompositionStrategy::exact).mu_e == rat(1));
    // M >= n: nothing to cut.
    CHECK(hyperfinite_decomposition(g4, 4, DecompositionStrategy::exact).z.empty());
    CHECK(hyperfinite_decomposition(g4, 4, DecompositionStrategy::greedy).z.empty());
}

TEST_CASE("greedy hits the optimum on the long cycle") {
    Graphing g = build_schreier(cycle_action(100), {Word({1})});
    auto cert = hyperfinite_decomposition(g, 20, DecompositionStrategy::greedy);
    CHECK(cert.mu_e == rat(1, 10)); // five undirected cuts
    CHECK(incident_vertices(g, cert.z).measure() == rat(1, 10));
    for (std::uint32_t b = 0; b < cert.component_partition.block_count(); ++b)
        CHECK(cert.component_partition.block(b).count() <= 20);
}

TEST_CASE("exact decomposition matches the exhaustive oracle") {
    Rng rng(20240817);
    // Cycles up to 12: closed form against brute force.
    for (std::size_t len = 3; len <= 12; ++len) {
        Graphing g = build_schreier(cycle_action(len), {Word({1})});
        for (std::uint32_t bound : {1u, 2u, 3u, 5u}) {
            auto cert = hyperfinite_decomposition(g, bound, DecompositionStrategy::exact);
            CHECK(cert.mu_e == min_cut_oracle(g, bound));
            auto gr = hyperfinite_decomposition(g, bound, DecompositionStrategy::greedy);
            CHECK(gr.mu_e >= cert.mu_e);
        }
    }
    // Small random multi-generator graphings: general-shape exhaustive branch.
    for (int trial = 0; trial < 12; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(3, 7);
        const std::size_t n = nd(rng);
        auto sp = AtomSpace::uniform(n);
        std::vector<Perm> gens{testutil::random_perm(n, rng), testutil::random_perm(n, rng)};
        Graphing g = build_schreier(Action::with_default_names(sp, gens), {Word({1}), Word({2})});
        std::uniform_int_distribution<std::uint32_t> bd(1, 4);
        const std::uint32_t bound = bd(rng);
        auto cert = hyperfinite_decomposition(g, bound, DecompositionStrategy::exact, 22);
        CHECK(cert.mu_e == min_cut_oracle(g, bound));
        auto gr = hyperfinite_decomposition(g, bound, DecompositionStrategy::greedy);
        CHECK(gr.mu_e >= cert.mu_e);
        for (std::uint32_t b = 0; b < gr.component_partition.block_count(); ++b)
            CHECK(gr.component_partition.block(b).count() <= bound);
    }
}

TEST_CASE("decomposition certificate is internally consistent") {
    Graphing g = build_schreier(cycle_action(10), {Word({1})});
    auto cert = hyperfinite_decomposition(g, 3, DecompositionStrategy::greedy);
    CHECK(cert.bound == 3);
    CHECK(cert.mu_e == edge_measure(g, cert.z).mu_e);
    CHECK(cert.component_partition == components(g, cert.z));
    CHECK_THROWS_AS(hyperfinite_decomposition(g, 0, DecompositionStrategy::greedy),
                    PreconditionError);
}

TEST_CASE("resource guards") {
    // A complete-ish component with too many edges for the exact cap.
    auto sp = AtomSpace::uniform(10);
    std::vector<Perm> gens;
    Rng rng(7);
    for (int i = 0; i < 5; ++i) gens.push_back(testutil::random_perm(10, rng));
    Graphing g = build_schreier(Action::with_default_names(sp, gens),
                                {Word({1}), Word({2}), Word({3}), Word({4}), Word({5})});
    if (components(g, EdgeSet{}).block_count() == 1 && g.edge_count() / 2 > 8)
        CHECK_THROWS_AS(hyperfinite_decomposition(g, 2, DecompositionStrategy::exact, 8),
                        ResourceError);
}
