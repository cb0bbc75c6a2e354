#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pcsp/analysis.hpp"
#include "pcsp/catalog.hpp"

using namespace pcsp;

namespace {

void check_witness(const Relation& r, const BalanceWitness& w) {
    REQUIRE(w.counts.size() == r.tuples.size());
    for (const auto& c : w.counts) REQUIRE(c >= 1);
    // all row frequency vectors must coincide
    std::set<int> values;
    for (const auto& t : r.tuples) values.insert(t.begin(), t.end());
    for (int pos = 1; pos < r.arity; ++pos)
        for (int v : values) {
            Int lhs = 0, rhs = 0;
            for (std::size_t t = 0; t < r.tuples.size(); ++t) {
                if (r.tuples[t][0] == v) lhs += w.counts[t];
                if (r.tuples[t][static_cast<std::size_t>(pos)] == v) rhs += w.counts[t];
            }
            REQUIRE(lhs == rhs);
        }
}

Relation random_digraph(int vertices, double density, std::mt19937& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Tuple> edges;
    for (int u = 0; u < vertices; ++u)
        for (int v = 0; v < vertices; ++v)
            if (coin(rng) < density) edges.push_back({u, v});
    return Relation("E", 2, std::move(edges));
}

} // namespace

TEST_CASE("is_symmetric") {
    REQUIRE(is_symmetric(catalog_one_in_three()).symmetric);
    auto rep = is_symmetric(catalog_remark_5_3());
    REQUIRE_FALSE(rep.symmetric);
    REQUIRE(rep.tuple == Tuple{0, 1});
    REQUIRE(rep.missing == Tuple{1, 0});
    Structure empty_rel(3, {Relation("R", 2, {})});
    REQUIRE(is_symmetric(empty_rel).symmetric);
}

TEST_CASE("is_functional") {
    REQUIRE(is_functional(catalog_eqn(3, 1)).functional);
    REQUIRE(is_functional(catalog_one_in_three()).functional);
    auto rep = is_functional(catalog_nae());
    REQUIRE_FALSE(rep.functional);
    // a colliding pair differs in exactly the reported position
    int diff = 0;
    for (int i = 0; i < 3; ++i)
        if (rep.tuple_a[static_cast<std::size_t>(i)] != rep.tuple_b[static_cast<std::size_t>(i)]) {
            ++diff;
            REQUIRE(i == rep.position);
        }
    REQUIRE(diff == 1);
    REQUIRE(is_functional(catalog_remark_4_4()).functional);
    for (int m = 1; m <= 9; ++m) REQUIRE(is_functional(catalog_eqn(m, 1)).functional);
}

TEST_CASE("hypergraph metrics on the catalog") {
    auto m1 = hypergraph_metrics(catalog_one_in_three(), "R");
    REQUIRE(m1.connected);
    REQUIRE(m1.diameter == 1);

    auto m2 = hypergraph_metrics(catalog_eqn(3, 1), "R");
    REQUIRE(m2.connected);
    REQUIRE(m2.diameter == 1);

    auto m3 = hypergraph_metrics(catalog_remark_4_4(), "R");
    REQUIRE_FALSE(m3.connected);
    REQUIRE(m3.diameter == HypergraphMetrics::infinity);
    REQUIRE(m3.distances[0][2] == HypergraphMetrics::infinity);
    REQUIRE(m3.distances[0][1] == 1);

    REQUIRE_THROWS_AS(hypergraph_metrics(catalog_one_in_three(), "nope"), Error);
}

TEST_CASE("is_balanced on the worked fixtures") {
    auto w = is_balanced(catalog_one_in_three().relations[0]);
    REQUIRE(w.has_value());
    check_witness(catalog_one_in_three().relations[0], *w);
    REQUIRE(w->counts == std::vector<Int>{1, 1, 1});
    REQUIRE(w->matrix.size() == 3);
    for (const auto& row : w->matrix) REQUIRE(row.size() == 3);

    REQUIRE_FALSE(is_balanced(catalog_remark_5_3().relations[0]).has_value());
    REQUIRE_FALSE(is_balanced(catalog_remark_5_2().relations[0]).has_value());

    REQUIRE_THROWS_AS(is_balanced(Relation("R", 2, {})), Error);
}

TEST_CASE("balanced witnesses exist for symmetric relations") {
    for (const Structure& s : {catalog_nae(), catalog_eqn(2, 1), catalog_eqn(3, 1),
                               catalog_cyclic_plus(4)}) {
        auto w = is_balanced(s.relations[0]);
        REQUIRE(w.has_value());
        check_witness(s.relations[0], *w);
    }
}

TEST_CASE("digraph SCC criterion basics") {
    REQUIRE(digraph_balanced_via_scc(Relation("E", 2, {{0, 1}, {1, 0}})));
    REQUIRE_FALSE(digraph_balanced_via_scc(catalog_remark_5_3().relations[0]));
    // two disjoint directed 3-cycles
    Relation two_cycles("E", 2, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    REQUIRE(digraph_balanced_via_scc(two_cycles));
    REQUIRE(is_balanced(two_cycles).has_value());
    REQUIRE_THROWS_AS(digraph_balanced_via_scc(Relation("R", 3, {{0, 0, 0}})), Error);
}

TEST_CASE("digraph balancedness equals the SCC criterion exhaustively on 3 vertices") {
    for (unsigned mask = 1; mask < (1u << 9); ++mask) {
        std::vector<Tuple> edges;
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                if (mask & (1u << (u * 3 + v))) edges.push_back({u, v});
        Relation r("E", 2, std::move(edges));
        bool lp = is_balanced(r).has_value();
        bool scc = digraph_balanced_via_scc(r);
        INFO("mask=" << mask);
        REQUIRE(lp == scc);
    }
}

TEST_CASE("digraph balancedness equals the SCC criterion on random 5-vertex digraphs") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        Relation r = random_digraph(5, 0.3, rng);
        if (r.tuples.empty()) continue;
        REQUIRE(is_balanced(r).has_value() == digraph_balanced_via_scc(r));
    }
}

TEST_CASE("transitive group probes") {
    // symmetric relation, full symmetric group
    auto probe = transitive_group_preserves(catalog_nae().relations[0],
                                            symmetric_group_generators(3));
    REQUIRE(probe.preserved);
    REQUIRE(probe.transitive);
    REQUIRE(probe.closure.size() == 6);

    // cyclic relation of cyclic_plus with the shift generator
    auto cyc = transitive_group_preserves(catalog_cyclic_plus(4).relations[0],
                                          cyclic_shift_generators(3));
    REQUIRE(cyc.preserved);
    REQUIRE(cyc.transitive);
    REQUIRE(cyc.closure.size() == 3);

    // strongly connected non-symmetric digraph: balanced but the swap does not preserve it
    Relation cycle3("E", 2, {{0, 1}, {1, 2}, {2, 0}});
    auto swap_probe = transitive_group_preserves(cycle3, symmetric_group_generators(2));
    REQUIRE(swap_probe.transitive);
    REQUIRE_FALSE(swap_probe.preserved);
    REQUIRE(is_balanced(cycle3).has_value());

    REQUIRE_THROWS_AS(transitive_group_preserves(cycle3, {Tuple{0, 0}}), Error);
}

TEST_CASE("preserved transitive group implies balanced") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        Relation r = random_digraph(4, 0.4, rng);
        if (r.tuples.empty()) continue;
        auto probe = transitive_group_preserves(r, symmetric_group_generators(2));
        if (probe.preserved && probe.transitive) REQUIRE(is_balanced(r).has_value());
    }
    // and on a ternary symmetric relation via the cyclic group
    auto probe = transitive_group_preserves(catalog_eqn(3, 1).relations[0],
                                            cyclic_shift_generators(3));
    REQUIRE((probe.preserved && probe.transitive));
    REQUIRE(is_balanced(catalog_eqn(3, 1).relations[0]).has_value());
}
