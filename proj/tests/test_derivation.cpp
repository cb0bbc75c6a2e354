#include <catch2/catch_amalgamated.hpp>

#include "pcsp/analysis.hpp"
#include "pcsp/catalog.hpp"
#include "pcsp/derivation.hpp"

using namespace pcsp;

TEST_CASE("gamma patterns") {
    Structure a2(2, {Relation("R", 1, {{0}})});
    auto g = gamma(a2);
    REQUIRE(g.size() == 6);
    std::set<Tuple> gs(g.begin(), g.end());
    REQUIRE(gs.count({0, 1, 0}));
    REQUIRE_FALSE(gs.count({1, 1, 0}));

    Structure a1(1, {Relation("R", 1, {{0}})});
    REQUIRE(gamma(a1) == std::vector<Tuple>{{0, 0, 0}});
}

TEST_CASE("delta tuple counts") {
    Structure a2(2, {Relation("R", 1, {{0}})});
    REQUIRE(delta(a2, 4).size() == 16);
    Structure a3(3, {Relation("R", 1, {{0}})});
    REQUIRE(delta(a3, 3).size() == 21); // 27 minus the 6 rainbow permutations
    REQUIRE(delta(a3, 1).size() == 3);
    REQUIRE_THROWS_AS(delta(a3, 0), Error);
}

TEST_CASE("single rule-4 step derives (0,0,1) over 1in3 from gamma") {
    Structure a = catalog_one_in_three();
    DerivationContext ctx(a, "R", 3);
    auto premises = gamma(a);
    std::set<Tuple> premise_set(premises.begin(), premises.end());
    REQUIRE_FALSE(premise_set.count({0, 0, 1}));
    auto result = derivable_set(ctx, premises);
    REQUIRE(result.found());
    REQUIRE(result.value->count({0, 0, 1}));
}

TEST_CASE("full premises are a fixpoint") {
    Structure a = catalog_one_in_three();
    DerivationContext ctx(a, "R", 3);
    std::vector<Tuple> all;
    for_each_tuple(2, 3, [&](const Tuple& t) { all.push_back(t); return true; });
    auto result = derivable_set(ctx, all);
    REQUIRE(result.found());
    REQUIRE(result.value->size() == 8);
}

TEST_CASE("binary-only structures stay inside the premise closure") {
    Structure p = catalog_remark_5_3(); // P = {(0,1)}
    DerivationContext ctx(p, "P", 3);
    auto result = derivable_set(ctx, gamma(p));
    REQUIRE(result.found());
    REQUIRE_FALSE(result.value->count({0, 0, 1}));
}

TEST_CASE("monotonicity of the derivable set") {
    Structure a = catalog_eqn(3, 1);
    DerivationContext ctx(a, "R", 3);
    auto small = derivable_set(ctx, {{0, 0, 0}, {1, 1, 1}});
    auto big = derivable_set(ctx, gamma(a));
    REQUIRE(small.found());
    REQUIRE(big.found());
    // gamma contains the premises of `small`
    for (const auto& t : *small.value) REQUIRE(big.value->count(t));
}

TEST_CASE("derives returns a validating proof tree for (1,1,0)") {
    Structure a = catalog_one_in_three();
    DerivationContext ctx(a, "R", 3);
    auto premises = gamma(a);
    auto result = derives(ctx, premises, {1, 1, 0});
    REQUIRE(result.found());
    const ProofTree& tree = *result.value;
    REQUIRE(tree.tuple == Tuple{1, 1, 0});
    REQUIRE(validate_proof_tree(a, "R", premises, tree));
    // depth 2: the root uses a derived child
    REQUIRE(tree.children.size() == 2);
    int depth = 0;
    for (const auto& c : tree.children)
        if (!c.children.empty()) depth = 1;
    REQUIRE(depth == 1);

    // single-node tree for a premise
    auto leaf = derives(ctx, premises, {0, 1, 1});
    REQUIRE(leaf.found());
    REQUIRE(leaf.value->children.empty());
    REQUIRE(validate_proof_tree(a, "R", premises, *leaf.value));

    // JSON shape
    auto j = proof_tree_to_json(tree);
    REQUIRE(j.contains("columns"));
    REQUIRE(j["children"].size() == 2);
}

TEST_CASE("equivariance: replaying a tree under a map keeps it valid") {
    Structure a = catalog_one_in_three();
    DerivationContext ctx(a, "R", 3);
    auto premises = gamma(a);
    auto result = derives(ctx, premises, {1, 1, 0});
    REQUIRE(result.found());
    // pi : [3] -> [3], tuple composition t o pi
    std::vector<int> pi{1, 2, 0};
    std::vector<Tuple> mapped_premises;
    for (const auto& t : premises) {
        Tuple u(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) u[i] = t[static_cast<std::size_t>(pi[i])];
        mapped_premises.push_back(u);
    }
    auto replay = [&](auto&& self, const ProofTree& node) -> ProofTree {
        ProofTree out;
        out.tuple.resize(node.tuple.size());
        for (std::size_t i = 0; i < node.tuple.size(); ++i)
            out.tuple[i] = node.tuple[static_cast<std::size_t>(pi[i])];
        for (std::size_t j = 0; j < node.columns.size(); ++j)
            out.columns.push_back(node.columns[static_cast<std::size_t>(pi[j])]);
        for (const auto& c : node.children) out.children.push_back(self(self, c));
        return out;
    };
    ProofTree mapped = replay(replay, *result.value);
    REQUIRE(validate_proof_tree(a, "R", mapped_premises, mapped));
}

TEST_CASE("garbage value: derived tuples extend by supported coordinates") {
    Structure a = catalog_one_in_three();
    DerivationContext ctx3(a, "R", 3);
    auto premises = gamma(a);
    auto base = derivable_set(ctx3, premises);
    REQUIRE(base.found());
    REQUIRE(base.value->count({1, 1, 0}));
    // premises for length 4: gamma x supp(R) = gamma x {0,1}
    std::vector<Tuple> extended;
    for (const auto& t : premises)
        for (int x = 0; x < 2; ++x) {
            Tuple u = t;
            u.push_back(x);
            extended.push_back(u);
        }
    DerivationContext ctx4(a, "R", 4);
    auto lifted = derivable_set(ctx4, extended);
    REQUIRE(lifted.found());
    for (int x = 0; x < 2; ++x) REQUIRE(lifted.value->count({1, 1, 0, x}));
}

TEST_CASE("super-connectedness of the worked catalog structures") {
    auto one = is_super_connected(catalog_one_in_three());
    REQUIRE(one.found());
    REQUIRE(*one.value == "R");
    REQUIRE(is_super_connected(catalog_nae()).found());
    REQUIRE(is_super_connected(catalog_eqn(3, 1)).found());

    auto disconnected = is_super_connected(catalog_remark_4_4());
    REQUIRE(disconnected.outcome == Outcome::None);
}

TEST_CASE("supp(R) covers the domain for super-connected structures") {
    for (const Structure& s : {catalog_one_in_three(), catalog_nae(), catalog_eqn(3, 1),
                               catalog_eqn(2, 1), catalog_cyclic_plus(3)}) {
        auto sc = is_super_connected(s);
        if (!sc.found() || s.domain_size <= 1) continue;
        const Relation& r = s.relation(*sc.value);
        std::vector<char> seen(static_cast<std::size_t>(s.domain_size), 0);
        for (const auto& t : r.tuples)
            for (int v : t) seen[static_cast<std::size_t>(v)] = 1;
        for (char c : seen) REQUIRE(c == 1);
    }
}

TEST_CASE("diameter-1 and connected arity-3/4 catalog relations are super-connected") {
    using pcsp::hypergraph_metrics;
    for (const Structure& s : {catalog_one_in_three(), catalog_nae(), catalog_eqn(2, 1),
                               catalog_eqn(3, 1), catalog_cyclic_plus(3), catalog_cyclic_plus(4),
                               catalog_q_in_r(2, 4)}) {
        bool route = false;
        for (const auto& rel : s.relations) {
            if (rel.arity < 3 || rel.tuples.empty()) continue;
            auto m = pcsp::hypergraph_metrics(s, rel.name);
            if ((m.diameter != pcsp::HypergraphMetrics::infinity && m.diameter <= 1) ||
                ((rel.arity == 3 || rel.arity == 4) && m.connected))
                route = true;
        }
        if (route) REQUIRE(is_super_connected(s).found());
    }
}

TEST_CASE("sufficient conditions report") {
    auto sc = check_sufficient_conditions(catalog_one_in_three());
    REQUIRE(sc.additive_sufficient == std::optional<bool>(true));
    REQUIRE(sc.dependent_sufficient == std::optional<bool>(true));

    Structure a1(1, {Relation("R", 1, {{0}})});
    auto unary = check_sufficient_conditions(a1);
    REQUIRE(unary.additive_sufficient == std::optional<bool>(true));
    REQUIRE(unary.dependent_sufficient == std::optional<bool>(true));

    auto p = check_sufficient_conditions(catalog_remark_5_3());
    REQUIRE(p.additive_sufficient == std::optional<bool>(false));
    REQUIRE(p.dependent_sufficient == std::optional<bool>(true)); // (0,1) lies in Delta^2
}

TEST_CASE("resource outcomes are distinct") {
    Structure big = catalog_remark_4_4();
    Limits tiny;
    tiny.max_enumeration = 10;
    auto r = is_super_connected(big, tiny);
    REQUIRE(r.outcome == Outcome::Resource);
}
