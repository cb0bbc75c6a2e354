#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pcsp/catalog.hpp"
#include "pcsp/hom_search.hpp"
#include "pcsp/structure.hpp"

#include "oracles.hpp"

using namespace pcsp;

TEST_CASE("parse_structure accepts the catalog document for 1in3") {
    std::string text = R"({"domain":["0","1"],"relations":[{"arity":3,"name":"R","tuples":[[1,0,0],[0,1,0],[0,0,1]]}]})";
    Structure s = parse_structure(text);
    REQUIRE(s.domain_size == 2);
    REQUIRE(s.relations.size() == 1);
    REQUIRE(s.relations[0].tuples.size() == 3);
    REQUIRE(s == catalog_one_in_three());
}

TEST_CASE("parse_structure round-trips canonically") {
    Structure s = catalog_eqn(3, 1);
    std::string text = serialize_structure(s);
    Structure back = parse_structure(text);
    REQUIRE(back == s);
    REQUIRE(serialize_structure(back) == text);
}

TEST_CASE("parse_structure handles the vacuous relation list") {
    Structure s = parse_structure(R"({"domain":["a","b"],"relations":[]})");
    REQUIRE(s.domain_size == 2);
    REQUIRE(s.relations.empty());
}

TEST_CASE("parse_structure rejects bad documents") {
    REQUIRE_THROWS_AS(parse_structure(R"({"domain":["0","1"],"relations":[{"arity":3,"name":"R","tuples":[[0,0,2]]}]})"),
                      Error);
    REQUIRE_THROWS_AS(parse_structure(R"({"domain":["0"],"relations":[{"arity":1,"name":"R","tuples":[[0]]},{"arity":1,"name":"R","tuples":[[0]]}]})"),
                      Error);
    REQUIRE_THROWS_AS(parse_structure("not json"), Error);
    REQUIRE_THROWS_AS(parse_structure(R"({"relations":[]})"), Error);
}

TEST_CASE("is_homomorphism on the 1in3 / NAE pair") {
    Structure a = catalog_one_in_three();
    Structure nae = catalog_nae();
    Homomorphism id{{0, 1}};
    REQUIRE(is_homomorphism(id, a, nae));
    Homomorphism const0{{0, 0}};
    REQUIRE_FALSE(is_homomorphism(const0, a, a));
}

TEST_CASE("find_homomorphism matches the exhaustive oracle on small pairs") {
    std::vector<Structure> pool{catalog_one_in_three(), catalog_nae(), catalog_eqn(2, 1),
                                catalog_eqn(3, 1), catalog_remark_5_2()};
    for (const auto& x : pool)
        for (const auto& b : pool) {
            if (!similar(x, b)) continue;
            auto expected = oracle::exhaustive_homomorphism(x, b);
            auto got = find_homomorphism(x, b);
            REQUIRE(got.outcome != Outcome::Resource);
            REQUIRE(got.found() == expected.has_value());
            if (got.found()) REQUIRE(is_homomorphism(*got.value, x, b));
        }
}

TEST_CASE("find_homomorphism: (1in3, NAE) some; (eqn(3,1), NAE) none") {
    REQUIRE(find_homomorphism(catalog_one_in_three(), catalog_nae()).found());
    // the pairs (a,b) with (a,a,b) in eqn(3,1) form an odd cycle, not 2-colorable
    auto r = find_homomorphism(catalog_eqn(3, 1), catalog_nae());
    REQUIRE(r.outcome == Outcome::None);
    REQUIRE_FALSE(oracle::exhaustive_homomorphism(catalog_eqn(3, 1), catalog_nae()).has_value());
}

TEST_CASE("homomorphisms compose") {
    std::mt19937 rng(7);
    Structure a = catalog_one_in_three(), nae = catalog_nae();
    Structure x = oracle::planted_instance(a, 5, 4, rng);
    auto h = find_homomorphism(x, a);
    REQUIRE(h.found());
    Homomorphism id{{0, 1}};
    Homomorphism composed = compose(*h.value, id);
    REQUIRE(is_homomorphism(composed, x, nae));
}

TEST_CASE("product is the categorical product") {
    Structure a = catalog_one_in_three();
    Structure p = product(a, a);
    REQUIRE(p.domain_size == 4);
    // brute-force membership: a tuple is present iff both projections are
    std::vector<Tuple> expected;
    for_each_tuple(4, 3, [&](const Tuple& t) {
        Tuple left(3), right(3);
        for (int i = 0; i < 3; ++i) {
            left[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] / 2;
            right[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] % 2;
        }
        if (a.relations[0].contains(left) && a.relations[0].contains(right)) expected.push_back(t);
        return true;
    });
    REQUIRE(p.relations[0].tuples == expected);
    REQUIRE(p.relations[0].tuples.size() == 9);

    auto [p1, p2] = product_projections(a, a);
    REQUIRE(is_homomorphism(p1, p, a));
    REQUIRE(is_homomorphism(p2, p, a));
}

TEST_CASE("product with the one-element full structure is an isomorphic copy") {
    Structure a = catalog_eqn(3, 1);
    Structure unit(1, {Relation("R", 3, {{0, 0, 0}})});
    Structure p = product(a, unit);
    REQUIRE(p.domain_size == a.domain_size);
    REQUIRE(p.relations[0].tuples.size() == a.relations[0].tuples.size());
}

TEST_CASE("product of eqn(3,1) and NAE re-verifies by brute force") {
    Structure e = catalog_eqn(3, 1), nae = catalog_nae();
    Structure p = product(e, nae);
    REQUIRE(p.domain_size == 6);
    std::size_t count = 0;
    for_each_tuple(6, 3, [&](const Tuple& t) {
        Tuple left(3), right(3);
        for (int i = 0; i < 3; ++i) {
            left[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] / 2;
            right[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] % 2;
        }
        bool in = e.relations[0].contains(left) && nae.relations[0].contains(right);
        REQUIRE(in == p.relations[0].contains(t));
        if (in) ++count;
        return true;
    });
    REQUIRE(p.relations[0].tuples.size() == count);
}

TEST_CASE("disjoint union of the arity-6 pair has 32 + 243 tuples") {
    Structure b = catalog_remark_4_4();
    REQUIRE(b.domain_size == 5);
    REQUIRE(b.relations[0].tuples.size() == 32 + 243);
    REQUIRE(catalog_remark_4_4_a1().relations[0].tuples.size() == 32);
    REQUIRE(catalog_remark_4_4_a2().relations[0].tuples.size() == 243);

    // injections are homomorphisms
    Homomorphism inj1{{0, 1}}, inj2{{2, 3, 4}};
    REQUIRE(is_homomorphism(inj1, catalog_remark_4_4_a1(), b));
    REQUIRE(is_homomorphism(inj2, catalog_remark_4_4_a2(), b));
}

TEST_CASE("disjoint union with an empty-domain structure is the identity") {
    Structure a = catalog_one_in_three();
    Structure empty(std::vector<std::string>{}, {Relation("R", 3, {})});
    Structure u = disjoint_union(a, empty);
    REQUIRE(u.domain_size == a.domain_size);
    REQUIRE(u.relations == a.relations);
}

TEST_CASE("connected_components splits the disjoint union back") {
    Structure b = catalog_remark_4_4();
    auto split = connected_components(b);
    REQUIRE(split.components.size() == 2);
    REQUIRE(split.components[0].domain_size == 2);
    REQUIRE(split.components[1].domain_size == 3);
    REQUIRE(split.components[0].relations[0].tuples == catalog_remark_4_4_a1().relations[0].tuples);
    REQUIRE(split.components[1].relations[0].tuples == catalog_remark_4_4_a2().relations[0].tuples);

    REQUIRE(connected_components(catalog_one_in_three()).components.size() == 1);

    Structure loose(3, {Relation("R", 2, {})});
    REQUIRE(connected_components(loose).components.size() == 3);
}

TEST_CASE("largest_symmetric_substructure") {
    Structure sym = catalog_nae();
    REQUIRE(largest_symmetric_substructure(sym) == sym);

    Structure p = catalog_remark_5_3(); // {(0,1)}
    Structure lp = largest_symmetric_substructure(p);
    REQUIRE(lp.relations[0].tuples.empty());

    Structure q(2, {Relation("Q", 2, {{0, 1}, {1, 0}, {1, 1}})});
    REQUIRE(largest_symmetric_substructure(q) == q);

    // maximality: adding back any removed tuple breaks symmetry
    Structure mixed(2, {Relation("R", 2, {{0, 1}, {1, 1}})});
    Structure reduced = largest_symmetric_substructure(mixed);
    REQUIRE(reduced.relations[0].tuples == std::vector<Tuple>{{1, 1}});
    for (const auto& t : mixed.relations[0].tuples) {
        if (reduced.relations[0].contains(t)) continue;
        std::vector<Tuple> tuples = reduced.relations[0].tuples;
        tuples.push_back(t);
        Structure grown(2, {Relation("R", 2, tuples)});
        Tuple perm = t;
        std::sort(perm.begin(), perm.end());
        bool symmetric = true;
        do {
            if (!grown.relations[0].contains(perm)) symmetric = false;
        } while (std::next_permutation(perm.begin(), perm.end()));
        REQUIRE_FALSE(symmetric);
    }
}

TEST_CASE("find_homomorphism reports resource exhaustion distinctly") {
    Structure x = catalog_eqn(5, 1);
    Structure b = catalog_eqn(5, 2);
    SearchConfig cfg;
    cfg.max_nodes = 1;
    auto r = find_homomorphism(x, b, cfg);
    REQUIRE((r.outcome == Outcome::Resource || r.outcome == Outcome::Found));
}
