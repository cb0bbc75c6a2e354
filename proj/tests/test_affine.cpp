#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pcsp/affine.hpp"
#include "pcsp/catalog.hpp"
#include "pcsp/hom_search.hpp"

using namespace pcsp;

TEST_CASE("subgroup basis matches the closure oracle") {
    std::mt19937 rng(21);
    for (int m : {2, 3, 4, 5, 6, 8, 12}) {
        for (int trial = 0; trial < 20; ++trial) {
            std::uniform_int_distribution<int> dim_pick(1, 4), count_pick(0, 3),
                val(0, m - 1);
            int dim = dim_pick(rng);
            std::vector<std::vector<int>> gens;
            int count = count_pick(rng);
            for (int g = 0; g < count; ++g) {
                std::vector<int> v(static_cast<std::size_t>(dim));
                for (auto& x : v) x = val(rng);
                gens.push_back(std::move(v));
            }
            ZmBasis basis = subgroup_basis(gens, m, dim);
            auto closure = subgroup_closure(gens, m, dim, 1u << 20);
            INFO("m=" << m << " dim=" << dim << " gens=" << count);
            REQUIRE(basis.span_size() == closure.size());
            for (const auto& v : closure) REQUIRE(basis.contains(v));
            auto enumerated = basis.enumerate(1u << 20);
            REQUIRE(enumerated == closure);
            // membership rejects a vector outside the span
            std::vector<int> probe(static_cast<std::size_t>(dim));
            for (auto& x : probe) x = val(rng);
            bool in_closure = std::binary_search(closure.begin(), closure.end(), probe);
            REQUIRE(basis.contains(probe) == in_closure);
        }
    }
}

TEST_CASE("subgroup basis edge cases") {
    ZmBasis empty = subgroup_basis({}, 4, 3);
    REQUIRE(empty.span_size() == 1);
    REQUIRE(empty.contains({0, 0, 0}));
    REQUIRE_FALSE(empty.contains({1, 0, 0}));

    // generators spanning all of Z_2^3
    ZmBasis full = subgroup_basis({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 2, 3);
    REQUIRE(full.span_size() == 8);

    // trivial modulus
    ZmBasis one = subgroup_basis({{0}}, 1, 1);
    REQUIRE(one.span_size() == 1);
}

TEST_CASE("affine structure of 1in3 at m = 1, 2, 3") {
    Structure a = catalog_one_in_three();

    AffineStructure a1 = build_affine_structure(a, 1);
    auto s1 = affine_to_structure(a1);
    REQUIRE(s1.found());
    REQUIRE(s1.value->domain_size == 1);
    REQUIRE(s1.value->relations[0].tuples == std::vector<Tuple>{{0, 0, 0}});

    AffineStructure a2 = build_affine_structure(a, 2);
    auto s2 = affine_to_structure(a2);
    REQUIRE(s2.found());
    REQUIRE(s2.value->domain_size == 4);
    REQUIRE(a2.cosets[0].basis.span_size() == 4);
    REQUIRE(s2.value->relations[0].tuples.size() == 4);

    AffineStructure a3 = build_affine_structure(a, 3);
    auto s3 = affine_to_structure(a3);
    REQUIRE(s3.found());
    REQUIRE(s3.value->domain_size == 9);
    REQUIRE(s3.value->relations[0].tuples.size() == 9);
    auto hom = find_homomorphism(*s3.value, catalog_eqn(3, 1));
    REQUIRE(hom.found());
}

TEST_CASE("unit embedding is a verified homomorphism into the affine structure") {
    for (const Structure& a : {catalog_one_in_three(), catalog_nae(), catalog_eqn(2, 1),
                               catalog_remark_5_2(), catalog_remark_5_3()}) {
        for (int m : {1, 2, 3}) {
            AffineStructure affine = build_affine_structure(a, m);
            auto mat = affine_to_structure(affine);
            REQUIRE(mat.found());
            Homomorphism h = unit_embedding(a, m);
            REQUIRE(is_homomorphism(h, a, *mat.value));
        }
    }
    // index form of the embedding over Z_2^2: 0 -> (1,0) -> 2, 1 -> (0,1) -> 1
    Homomorphism h = unit_embedding(catalog_one_in_three(), 2);
    REQUIRE(h.mapping == std::vector<int>{2, 1});
}

TEST_CASE("tuple-by-tuple coset membership across the whole catalog") {
    // usable even where the coset is too large to materialize
    for (const Structure& a :
         {catalog_one_in_three(), catalog_q_in_r(2, 4), catalog_nae(), catalog_eqn(2, 1),
          catalog_eqn(3, 1), catalog_cyclic_plus(3), catalog_cyclic_plus(4), catalog_remark_4_4(),
          catalog_remark_4_4_a1(), catalog_remark_4_4_a2(), catalog_remark_5_1(),
          catalog_remark_5_2(), catalog_remark_5_3()}) {
        for (int m : {1, 2, 3}) {
            AffineStructure affine = build_affine_structure(a, m);
            for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
                const Relation& rel = a.relations[ri];
                for (const auto& t : rel.tuples) {
                    std::vector<int> flat(static_cast<std::size_t>(a.domain_size) * t.size(), 0);
                    for (std::size_t i = 0; i < t.size(); ++i)
                        flat[i * static_cast<std::size_t>(a.domain_size) +
                             static_cast<std::size_t>(t[i])] = 1 % m;
                    REQUIRE(affine.cosets[ri].contains(flat));
                }
            }
        }
    }
}

TEST_CASE("materialized relations equal the membership filter") {
    for (const Structure& a : {catalog_one_in_three(), catalog_remark_5_3()}) {
        for (int m : {2, 3}) {
            AffineStructure affine = build_affine_structure(a, m);
            auto mat = affine_to_structure(affine);
            REQUIRE(mat.found());
            for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
                const int r = a.relations[ri].arity;
                const int dim = a.domain_size * r;
                std::set<Tuple> filtered;
                for_each_tuple(affine.domain_size(), r, [&](const Tuple& t) {
                    std::vector<int> flat(static_cast<std::size_t>(dim));
                    for (int i = 0; i < r; ++i) {
                        auto vec = affine.unindex_vector(t[static_cast<std::size_t>(i)]);
                        for (int j = 0; j < a.domain_size; ++j)
                            flat[static_cast<std::size_t>(i * a.domain_size + j)] =
                                vec[static_cast<std::size_t>(j)];
                    }
                    if (!affine.empty_relation[ri] && affine.cosets[ri].contains(flat))
                        filtered.insert(t);
                    return true;
                });
                std::set<Tuple> listed(mat.value->relations[ri].tuples.begin(),
                                       mat.value->relations[ri].tuples.end());
                REQUIRE(filtered == listed);
            }
        }
    }
}

TEST_CASE("empty relations stay empty in the affine structure") {
    Structure a(2, {Relation("R", 2, {})});
    AffineStructure affine = build_affine_structure(a, 3);
    REQUIRE(affine.empty_relation[0] == 1);
    auto mat = affine_to_structure(affine);
    REQUIRE(mat.found());
    REQUIRE(mat.value->relations[0].tuples.empty());
}

TEST_CASE("alternating witness tables over the affine domain") {
    Structure a = catalog_one_in_three();
    AffineStructure a2 = build_affine_structure(a, 2);
    auto mat = affine_to_structure(a2);
    REQUIRE(mat.found());

    auto ident = alternating_witness(a2, 0);
    REQUIRE(ident.found());
    REQUIRE(ident.value->arity == 1);
    for (int i = 0; i < 4; ++i) REQUIRE((*ident.value)(Tuple{i}) == i);

    auto w = alternating_witness(a2, 1);
    REQUIRE(w.found());
    REQUIRE(w.value->arity == 3);
    REQUIRE(symmetry_kind(*w.value).kind == SymmetryKind::Alternating);
    auto chk = is_polymorphism(*w.value, *mat.value, *mat.value);
    REQUIRE(chk.outcome == Outcome::Found);
    REQUIRE(chk.holds);
}
