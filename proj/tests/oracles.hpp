#pragma once

// Test-only brute-force oracles, kept independent of the library's search and
// solver paths they are used to check.

#include <optional>
#include <random>
#include <vector>

#include "pcsp/rational.hpp"
#include "pcsp/structure.hpp"

namespace pcsp::oracle {

/// Exhaustive scan of all |B|^|X| maps.
inline std::optional<Homomorphism> exhaustive_homomorphism(const Structure& x,
                                                           const Structure& b) {
    const int n = x.domain_size, bd = b.domain_size;
    if (n == 0) return Homomorphism{};
    if (bd == 0) return std::nullopt;
    Homomorphism h;
    h.mapping.assign(static_cast<std::size_t>(n), 0);
    while (true) {
        bool ok = true;
        for (std::size_t ri = 0; ri < x.relations.size() && ok; ++ri) {
            const Relation& rx = x.relations[ri];
            const Relation& rb = b.relations[ri];
            Tuple img(static_cast<std::size_t>(rx.arity));
            for (const auto& t : rx.tuples) {
                for (std::size_t i = 0; i < t.size(); ++i)
                    img[i] = h.mapping[static_cast<std::size_t>(t[i])];
                if (!rb.contains(img)) { ok = false; break; }
            }
        }
        if (ok) return h;
        int i = n - 1;
        while (i >= 0 && h.mapping[static_cast<std::size_t>(i)] == bd - 1) {
            h.mapping[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) return std::nullopt;
        ++h.mapping[static_cast<std::size_t>(i)];
    }
}

/// Random instance with a planted homomorphism into the template: every
/// constraint is the image of a random template tuple under a random section.
inline Structure planted_instance(const Structure& tmpl, int num_vars, int num_constraints,
                                  std::mt19937& rng) {
    std::uniform_int_distribution<int> pick_val(0, tmpl.domain_size - 1);
    std::vector<int> assignment(static_cast<std::size_t>(num_vars));
    std::vector<std::vector<int>> pool(static_cast<std::size_t>(tmpl.domain_size));
    while (true) {
        for (auto& p : pool) p.clear();
        for (int v = 0; v < num_vars; ++v) {
            assignment[static_cast<std::size_t>(v)] = pick_val(rng);
            pool[static_cast<std::size_t>(assignment[static_cast<std::size_t>(v)])].push_back(v);
        }
        bool all_hit = true;
        for (const auto& p : pool)
            if (p.empty()) all_hit = false;
        if (all_hit || num_vars < tmpl.domain_size) break;
    }
    std::vector<std::size_t> usable;
    for (std::size_t ri = 0; ri < tmpl.relations.size(); ++ri)
        if (!tmpl.relations[ri].tuples.empty()) usable.push_back(ri);
    std::vector<Relation> rels;
    for (const auto& r : tmpl.relations) rels.emplace_back(r.name, r.arity, std::vector<Tuple>{});
    std::uniform_int_distribution<std::size_t> pick_rel(0, usable.size() - 1);
    int made = 0, guard = 0;
    while (made < num_constraints && ++guard < 100 * num_constraints) {
        std::size_t ri = usable[pick_rel(rng)];
        const Relation& rt = tmpl.relations[ri];
        std::uniform_int_distribution<std::size_t> pick_tuple(0, rt.tuples.size() - 1);
        const Tuple& t = rt.tuples[pick_tuple(rng)];
        Tuple scope(t.size());
        bool ok = true;
        for (std::size_t i = 0; i < t.size() && ok; ++i) {
            const auto& candidates = pool[static_cast<std::size_t>(t[i])];
            if (candidates.empty()) { ok = false; break; }
            std::uniform_int_distribution<std::size_t> pick_var(0, candidates.size() - 1);
            scope[i] = candidates[pick_var(rng)];
        }
        if (!ok) continue;
        rels[ri].tuples.push_back(scope);
        ++made;
    }
    for (auto& r : rels) r.normalize();
    Structure out(num_vars, std::move(rels));
    return out;
}

/// Bounded box search for integer solutions of M x = b.
inline std::optional<std::vector<Int>> boxed_integer_search(
    const std::vector<std::vector<Int>>& m, const std::vector<Int>& b, int bound) {
    if (m.empty()) return std::vector<Int>{};
    const int cols = static_cast<int>(m[0].size());
    std::vector<Int> x(static_cast<std::size_t>(cols), Int(-bound));
    while (true) {
        bool ok = true;
        for (std::size_t r = 0; r < m.size() && ok; ++r) {
            Int acc = 0;
            for (int c = 0; c < cols; ++c) acc += m[r][static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
            if (acc != b[r]) ok = false;
        }
        if (ok) return x;
        int i = cols - 1;
        while (i >= 0 && x[static_cast<std::size_t>(i)] == bound) {
            x[static_cast<std::size_t>(i)] = -bound;
            --i;
        }
        if (i < 0) return std::nullopt;
        ++x[static_cast<std::size_t>(i)];
    }
}

} // namespace pcsp::oracle
