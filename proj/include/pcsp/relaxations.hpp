#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/linear.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

/// Marginal formulation shared by BLP and AIP:
///   mu_x(a)      per instance element x and template element a
///   lambda_C(t)  per constraint occurrence C and template tuple t
/// with sum_a mu_x(a) = 1, sum_t lambda_C(t) = 1, and marginal consistency
/// sum_{t : t_i = a} lambda_C(t) = mu_{s_i}(a). Nonnegativity flags are set
/// only in BLP mode; AIP solves the same equalities over unrestricted Z.
inline LinearSystem build_relaxation_system(const Structure& x, const Structure& a,
                                            bool blp_mode) {
    require_similar(x, a);
    LinearSystem sys;
    const int ad = a.domain_size;
    // mu variables, grouped by instance element
    std::vector<int> mu_base(static_cast<std::size_t>(x.domain_size));
    for (int v = 0; v < x.domain_size; ++v) {
        mu_base[static_cast<std::size_t>(v)] = sys.num_vars();
        for (int val = 0; val < ad; ++val)
            sys.add_var("mu[" + x.element_labels[static_cast<std::size_t>(v)] + "][" +
                            std::to_string(val) + "]",
                        blp_mode);
    }
    struct Occurrence {
        std::size_t relation;
        const Tuple* scope;
        int lambda_base;
    };
    std::vector<Occurrence> occs;
    for (std::size_t ri = 0; ri < x.relations.size(); ++ri) {
        const Relation& rx = x.relations[ri];
        const Relation& ra = a.relations[ri];
        for (const auto& scope : rx.tuples) {
            if (ra.tuples.empty()) {
                sys.trivially_infeasible = true;
                continue;
            }
            int base = sys.num_vars();
            for (std::size_t t = 0; t < ra.tuples.size(); ++t)
                sys.add_var("lambda[" + rx.name + ":" + tuple_to_string(scope) + "][" +
                                std::to_string(t) + "]",
                            blp_mode);
            occs.push_back({ri, &scope, base});
        }
    }
    // sum_a mu_x(a) = 1
    for (int v = 0; v < x.domain_size; ++v) {
        std::vector<Int> row(static_cast<std::size_t>(sys.num_vars()), Int(0));
        for (int val = 0; val < ad; ++val)
            row[static_cast<std::size_t>(mu_base[static_cast<std::size_t>(v)] + val)] = 1;
        sys.add_row(std::move(row), Int(1));
    }
    for (const auto& occ : occs) {
        const Relation& ra = a.relations[occ.relation];
        const int ntup = static_cast<int>(ra.tuples.size());
        // sum_t lambda_C(t) = 1
        std::vector<Int> row(static_cast<std::size_t>(sys.num_vars()), Int(0));
        for (int t = 0; t < ntup; ++t)
            row[static_cast<std::size_t>(occ.lambda_base + t)] = 1;
        sys.add_row(std::move(row), Int(1));
        // marginal consistency per position and template value
        for (int pos = 0; pos < ra.arity; ++pos) {
            int elem = (*occ.scope)[static_cast<std::size_t>(pos)];
            for (int val = 0; val < ad; ++val) {
                std::vector<Int> mrow(static_cast<std::size_t>(sys.num_vars()), Int(0));
                for (int t = 0; t < ntup; ++t)
                    if (ra.tuples[static_cast<std::size_t>(t)][static_cast<std::size_t>(pos)] == val)
                        mrow[static_cast<std::size_t>(occ.lambda_base + t)] = 1;
                mrow[static_cast<std::size_t>(mu_base[static_cast<std::size_t>(elem)] + val)] = -1;
                sys.add_row(std::move(mrow), Int(0));
            }
        }
    }
    return sys;
}

inline LinearSystem build_relaxation_system(const Structure& x, const Structure& a) {
    return build_relaxation_system(x, a, /*blp_mode=*/true);
}

struct RelaxationVerdict {
    bool accepted = false;
    std::optional<std::vector<Rat>> rational_certificate;
    std::optional<std::vector<Int>> integer_certificate;
    std::string rejected_reason;
};

inline RelaxationVerdict solve_blp(const Structure& x, const Structure& a) {
    LinearSystem sys = build_relaxation_system(x, a, true);
    RelaxationVerdict v;
    auto point = lp_feasible(sys);
    if (point) {
        v.accepted = true;
        v.rational_certificate = std::move(point);
    } else {
        v.rejected_reason = sys.trivially_infeasible
                                ? "instance uses a relation that is empty in the template"
                                : "no nonnegative rational solution";
    }
    return v;
}

inline RelaxationVerdict solve_aip(const Structure& x, const Structure& a) {
    LinearSystem sys = build_relaxation_system(x, a, false);
    RelaxationVerdict v;
    auto point = integer_feasible(sys);
    if (point) {
        v.accepted = true;
        v.integer_certificate = std::move(point);
    } else {
        v.rejected_reason = sys.trivially_infeasible
                                ? "instance uses a relation that is empty in the template"
                                : "no integer solution to the equality system";
    }
    return v;
}

/// BLP first; then the integer phase restricted to the BLP relative-interior
/// support (variables forced to zero in the LP stay pinned to zero).
inline RelaxationVerdict solve_blp_aip(const Structure& x, const Structure& a) {
    LinearSystem sys = build_relaxation_system(x, a, true);
    RelaxationVerdict v;
    if (sys.trivially_infeasible || !lp_feasible(sys)) {
        v.rejected_reason = "BLP phase infeasible";
        return v;
    }
    std::vector<Rat> interior = relative_interior_solution(sys);
    LinearSystem restricted = sys;
    for (int var = 0; var < sys.num_vars(); ++var) {
        if (!sys.nonneg[static_cast<std::size_t>(var)]) continue;
        if (interior[static_cast<std::size_t>(var)] == 0) {
            std::vector<Int> row(static_cast<std::size_t>(sys.num_vars()), Int(0));
            row[static_cast<std::size_t>(var)] = 1;
            restricted.add_row(std::move(row), Int(0));
        }
    }
    auto point = integer_feasible(restricted);
    if (point) {
        v.accepted = true;
        v.integer_certificate = std::move(point);
    } else {
        v.rejected_reason = "integer phase infeasible on the BLP support";
    }
    return v;
}

} // namespace pcsp
