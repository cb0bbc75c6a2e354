#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "pcsp/common.hpp"

namespace pcsp {

/// Canonical (Howell-style) basis of a subgroup of Z_m^d. Rows are in echelon
/// form with pivot values dividing m, entries above pivots reduced; membership
/// and span enumeration follow from successive reduction.
struct ZmBasis {
    int m = 1;
    int dim = 0;
    std::vector<std::vector<int>> rows;
    std::vector<int> pivot_cols;
    std::vector<int> pivot_vals; // each divides m

    std::uint64_t span_size() const {
        std::uint64_t s = 1;
        for (int g : pivot_vals) s *= static_cast<std::uint64_t>(m / g);
        return s;
    }

    bool contains(std::vector<int> v) const {
        if (static_cast<int>(v.size()) != dim) throw Error("zm basis: dimension mismatch");
        for (int& x : v) x = ((x % m) + m) % m;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            int col = pivot_cols[i];
            int g = pivot_vals[i];
            int x = v[static_cast<std::size_t>(col)];
            if (x % g != 0) return false;
            int q = x / g;
            for (int j = 0; j < dim; ++j)
                v[static_cast<std::size_t>(j)] =
                    ((v[static_cast<std::size_t>(j)] - q * rows[i][static_cast<std::size_t>(j)]) % m + m) % m;
        }
        for (int x : v)
            if (x != 0) return false;
        return true;
    }

    /// All span elements, by iterating canonical coefficients per row.
    std::vector<std::vector<int>> enumerate(std::uint64_t cap) const {
        if (span_size() > cap) throw Error("zm basis: span enumeration over cap");
        std::vector<std::vector<int>> out{std::vector<int>(static_cast<std::size_t>(dim), 0)};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            int reps = m / pivot_vals[i];
            std::vector<std::vector<int>> next;
            next.reserve(out.size() * static_cast<std::size_t>(reps));
            for (const auto& base : out) {
                std::vector<int> cur = base;
                for (int c = 0; c < reps; ++c) {
                    next.push_back(cur);
                    for (int j = 0; j < dim; ++j)
                        cur[static_cast<std::size_t>(j)] =
                            (cur[static_cast<std::size_t>(j)] + rows[i][static_cast<std::size_t>(j)]) % m;
                }
            }
            out = std::move(next);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

namespace detail {

inline long long extgcd_ll(long long a, long long b, long long& x, long long& y) {
    if (b == 0) {
        x = a < 0 ? -1 : 1;
        y = 0;
        return a < 0 ? -a : a;
    }
    long long x1, y1;
    long long g = extgcd_ll(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// unit u mod m with u*e == gcd(e, m) (mod m); the standard stabilization lift
inline long long unit_multiplier(long long e, long long m) {
    long long g = std::gcd(e, m);
    long long e1 = e / g, m1 = m / g;
    long long x, y;
    extgcd_ll(e1 % m1, m1, x, y);
    long long u = ((x % m1) + m1) % m1; // u*e1 == 1 (mod m1)
    while (std::gcd(u, m) != 1) u += m1;
    return u % m;
}

} // namespace detail

/// Echelon-form canonical basis of the subgroup of Z_m^d generated by the
/// given vectors, via integer elimination with gcd pivoting modulo m.
inline ZmBasis subgroup_basis(const std::vector<std::vector<int>>& generators, int m, int dim) {
    if (m < 1) throw Error("subgroup_basis: modulus must be >= 1");
    ZmBasis basis;
    basis.m = m;
    basis.dim = dim;
    if (m == 1) return basis; // trivial group

    auto reduce_vec = [&](std::vector<int> v) {
        if (static_cast<int>(v.size()) != dim) throw Error("subgroup_basis: generator dimension mismatch");
        for (int& x : v) x = ((x % m) + m) % m;
        return v;
    };
    std::vector<std::vector<int>> work;
    for (const auto& g : generators) {
        auto v = reduce_vec(g);
        if (std::any_of(v.begin(), v.end(), [](int x) { return x != 0; })) work.push_back(std::move(v));
    }

    auto leading = [&](const std::vector<int>& v) {
        for (int j = 0; j < dim; ++j)
            if (v[static_cast<std::size_t>(j)] != 0) return j;
        return dim;
    };

    for (int col = 0; col < dim; ++col) {
        // gather rows with leading entry at col
        std::vector<std::size_t> here;
        for (std::size_t i = 0; i < work.size(); ++i)
            if (leading(work[i]) == col) here.push_back(i);
        if (here.empty()) continue;
        // combine into a single row with gcd leading entry
        std::vector<int> pivot = work[here[0]];
        for (std::size_t idx = 1; idx < here.size(); ++idx) {
            std::vector<int>& other = work[here[idx]];
            long long e1 = pivot[static_cast<std::size_t>(col)];
            long long e2 = other[static_cast<std::size_t>(col)];
            long long s, t;
            long long g = detail::extgcd_ll(e1, e2, s, t);
            std::vector<int> combined(static_cast<std::size_t>(dim));
            std::vector<int> remainder(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) {
                long long pj = pivot[static_cast<std::size_t>(j)];
                long long oj = other[static_cast<std::size_t>(j)];
                combined[static_cast<std::size_t>(j)] =
                    static_cast<int>((((s * pj + t * oj) % m) + m) % m);
                remainder[static_cast<std::size_t>(j)] =
                    static_cast<int>(((((e2 / g) * pj - (e1 / g) * oj) % m) + m) % m);
            }
            pivot = std::move(combined);
            other = std::move(remainder); // leading entry now 0 at col; reprocessed later
        }
        // normalize pivot so its leading entry divides m
        long long e = pivot[static_cast<std::size_t>(col)];
        long long g = std::gcd(e, static_cast<long long>(m));
        long long u = detail::unit_multiplier(e, m);
        for (int j = 0; j < dim; ++j)
            pivot[static_cast<std::size_t>(j)] =
                static_cast<int>((u * pivot[static_cast<std::size_t>(j)]) % m);
        pivot[static_cast<std::size_t>(col)] = static_cast<int>(g); // u*e == g mod m
        // annihilator row keeps the Howell property for non-prime moduli
        std::vector<int> ann(static_cast<std::size_t>(dim));
        bool ann_nonzero = false;
        for (int j = 0; j < dim; ++j) {
            long long v = (static_cast<long long>(m) / g) * pivot[static_cast<std::size_t>(j)] % m;
            ann[static_cast<std::size_t>(j)] = static_cast<int>(v);
            if (v != 0) ann_nonzero = true;
        }
        if (ann_nonzero) work.push_back(std::move(ann));
        basis.rows.push_back(pivot);
        basis.pivot_cols.push_back(col);
        basis.pivot_vals.push_back(static_cast<int>(g));
    }

    // reduce entries above pivots
    for (std::size_t i = basis.rows.size(); i-- > 0;) {
        int col = basis.pivot_cols[i];
        int g = basis.pivot_vals[i];
        for (std::size_t j = 0; j < i; ++j) {
            int e = basis.rows[j][static_cast<std::size_t>(col)];
            int q = e / g;
            if (q == 0) continue;
            for (int c = 0; c < dim; ++c)
                basis.rows[j][static_cast<std::size_t>(c)] =
                    ((basis.rows[j][static_cast<std::size_t>(c)] -
                      q * basis.rows[i][static_cast<std::size_t>(c)]) % m + m) % m;
        }
    }
    return basis;
}

/// Reference closure by breadth-first addition; for cross-checking the basis.
inline std::vector<std::vector<int>> subgroup_closure(const std::vector<std::vector<int>>& generators,
                                                      int m, int dim, std::uint64_t cap) {
    std::set<std::vector<int>> seen;
    std::vector<int> zero(static_cast<std::size_t>(dim), 0);
    seen.insert(zero);
    std::vector<std::vector<int>> queue{zero};
    while (!queue.empty()) {
        auto cur = queue.back();
        queue.pop_back();
        for (const auto& g : generators) {
            std::vector<int> next(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j)
                next[static_cast<std::size_t>(j)] =
                    ((cur[static_cast<std::size_t>(j)] + g[static_cast<std::size_t>(j)]) % m + m) % m;
            if (seen.insert(next).second) {
                if (seen.size() > cap) throw Error("subgroup_closure: cap exceeded");
                queue.push_back(std::move(next));
            }
        }
    }
    return {seen.begin(), seen.end()};
}

} // namespace pcsp
