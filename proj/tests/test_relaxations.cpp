#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pcsp/catalog.hpp"
#include "pcsp/hom_search.hpp"
#include "pcsp/relaxations.hpp"

#include "oracles.hpp"

using namespace pcsp;

namespace {
// the single-variable instance with one constraint R(x,x,x)
Structure loop_instance() { return Structure(1, {Relation("R", 3, {{0, 0, 0}})}); }
} // namespace

TEST_CASE("build_relaxation_system counts variables and equalities") {
    Structure x = loop_instance();
    Structure a = catalog_one_in_three();
    LinearSystem sys = build_relaxation_system(x, a);
    REQUIRE(sys.num_vars() == 2 + 3);
    REQUIRE(sys.rows.size() == 1 + 1 + 6);
}

TEST_CASE("canonical instance X = A is feasible with a 0/1 point") {
    Structure a = catalog_eqn(3, 1);
    LinearSystem sys = build_relaxation_system(a, a);
    auto p = lp_feasible(sys);
    REQUIRE(p.has_value());
}

TEST_CASE("instance with no constraints yields only the mu rows") {
    Structure x(3, {Relation("R", 3, {})});
    LinearSystem sys = build_relaxation_system(x, catalog_one_in_three());
    REQUIRE(sys.rows.size() == 3);
    REQUIRE(lp_feasible(sys).has_value());
}

TEST_CASE("the R(x,x,x) fixture separates BLP from AIP and BLP+AIP") {
    Structure x = loop_instance();
    Structure a = catalog_one_in_three();

    auto blp = solve_blp(x, a);
    REQUIRE(blp.accepted);
    // the uniform point: lambda = 1/3 each, mu = (2/3, 1/3)
    REQUIRE(blp.rational_certificate.has_value());

    auto aip = solve_aip(x, a);
    REQUIRE_FALSE(aip.accepted);

    auto both = solve_blp_aip(x, a);
    REQUIRE_FALSE(both.accepted);
}

TEST_CASE("empty template relation under use rejects everywhere") {
    Structure x = loop_instance();
    Structure a(2, {Relation("R", 3, {})});
    REQUIRE_FALSE(solve_blp(x, a).accepted);
    REQUIRE_FALSE(solve_aip(x, a).accepted);
    REQUIRE_FALSE(solve_blp_aip(x, a).accepted);
}

TEST_CASE("completeness: planted instances are accepted by all three solvers") {
    std::mt19937 rng(11);
    for (const Structure& tmpl : {catalog_one_in_three(), catalog_nae(), catalog_eqn(2, 1),
                                  catalog_eqn(3, 1), catalog_remark_5_2(), catalog_remark_5_3()}) {
        for (int trial = 0; trial < 4; ++trial) {
            Structure x = oracle::planted_instance(tmpl, 5, 4, rng);
            INFO(serialize_structure(x));
            REQUIRE(solve_blp(x, tmpl).accepted);
            REQUIRE(solve_aip(x, tmpl).accepted);
            REQUIRE(solve_blp_aip(x, tmpl).accepted);
        }
    }
}

TEST_CASE("monotonicity: BLP+AIP acceptance implies BLP and AIP acceptance") {
    std::mt19937 rng(12);
    Structure tmpl = catalog_one_in_three();
    for (int trial = 0; trial < 12; ++trial) {
        // random (not necessarily satisfiable) instances
        std::uniform_int_distribution<int> nv(2, 5), nc(1, 5), var(0, 4);
        int n = nv(rng);
        std::vector<Tuple> cons;
        int k = nc(rng);
        for (int i = 0; i < k; ++i) {
            Tuple t(3);
            for (auto& e : t) e = var(rng) % n;
            cons.push_back(t);
        }
        Structure x(n, {Relation("R", 3, cons)});
        if (solve_blp_aip(x, tmpl).accepted) {
            REQUIRE(solve_blp(x, tmpl).accepted);
            REQUIRE(solve_aip(x, tmpl).accepted);
        }
    }
}

TEST_CASE("satisfiable eqn(3,1) instances are accepted by AIP") {
    std::mt19937 rng(13);
    Structure tmpl = catalog_eqn(3, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Structure x = oracle::planted_instance(tmpl, 6, 5, rng);
        REQUIRE(solve_aip(x, tmpl).accepted);
    }
}

TEST_CASE("certificates re-verify exactly") {
    Structure x = loop_instance();
    Structure a = catalog_one_in_three();
    LinearSystem blp_sys = build_relaxation_system(x, a, true);
    auto blp = solve_blp(x, a);
    REQUIRE(blp_sys.check_point(*blp.rational_certificate));

    std::mt19937 rng(14);
    Structure planted = oracle::planted_instance(a, 4, 3, rng);
    LinearSystem aip_sys = build_relaxation_system(planted, a, false);
    auto aip = solve_aip(planted, a);
    REQUIRE(aip.accepted);
    REQUIRE(aip_sys.check_integer_point(*aip.integer_certificate));
}
