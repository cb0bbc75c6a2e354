#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcsp/common.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

/// Explicit n-ary operation A^n -> B, values in row-major input order
/// (first coordinate most significant).
struct OperationTable {
    int source_domain = 0;
    int target_domain = 0;
    int arity = 0;
    std::vector<int> values;

    OperationTable() = default;
    OperationTable(int a, int b, int n, std::vector<int> vals)
        : source_domain(a), target_domain(b), arity(n), values(std::move(vals)) {
        std::uint64_t expect = 1;
        for (int i = 0; i < n; ++i) expect *= static_cast<std::uint64_t>(a);
        if (values.size() != expect)
            throw Error("operation table: value count does not match a^n");
        for (int v : values)
            if (v < 0 || v >= b) throw Error("operation table: value outside target domain");
    }

    std::size_t index(const Tuple& x) const {
        std::size_t idx = 0;
        for (int v : x) idx = idx * static_cast<std::size_t>(source_domain) + static_cast<std::size_t>(v);
        return idx;
    }

    int operator()(const Tuple& x) const { return values[index(x)]; }

    Tuple unindex(std::size_t idx) const {
        Tuple x(static_cast<std::size_t>(arity));
        for (int i = arity - 1; i >= 0; --i) {
            x[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(source_domain));
            idx /= static_cast<std::size_t>(source_domain);
        }
        return x;
    }

    bool operator==(const OperationTable&) const = default;
    auto operator<=>(const OperationTable&) const = default;
};

/// Builds a table by evaluating fn on every input tuple.
template <class Fn>
OperationTable make_table(int a, int b, int n, Fn&& fn) {
    std::vector<int> vals;
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(a);
    vals.reserve(total);
    for_each_tuple(a, n, [&](const Tuple& x) {
        vals.push_back(fn(x));
        return true;
    });
    return OperationTable(a, b, n, std::move(vals));
}

struct PolyViolation {
    std::string relation;
    std::vector<Tuple> columns; // n columns from R^A whose rows map outside R^B
};

struct PolyCheck {
    Outcome outcome = Outcome::Found; // Resource when the column scan was capped
    bool holds = false;
    std::optional<PolyViolation> violation;
};

/// Full check over all |R^A|^n column choices per relation.
inline PolyCheck is_polymorphism(const OperationTable& f, const Structure& a,
                                 const Structure& b, Limits limits = {}) {
    require_similar(a, b);
    if (f.source_domain != a.domain_size || f.target_domain != b.domain_size)
        throw Error("is_polymorphism: table domains do not match the template");
    const int n = f.arity;
    PolyCheck result;
    std::uint64_t nodes = 0;
    for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
        const Relation& ra = a.relations[ri];
        const Relation& rb = b.relations[ri];
        if (ra.tuples.empty()) continue;
        const int r = ra.arity;
        std::vector<const Tuple*> cols(static_cast<std::size_t>(n));
        std::vector<std::size_t> partial(static_cast<std::size_t>(r), 0);
        Tuple image(static_cast<std::size_t>(r));
        auto rec = [&](auto&& self, int depth) -> bool { // false: stop (capped)
            if (depth == n) {
                for (int i = 0; i < r; ++i)
                    image[static_cast<std::size_t>(i)] = f.values[partial[static_cast<std::size_t>(i)]];
                if (!rb.contains(image)) {
                    PolyViolation v;
                    v.relation = ra.name;
                    for (const Tuple* c : cols) v.columns.push_back(*c);
                    result.violation = std::move(v);
                }
                return !result.violation;
            }
            for (const auto& col : ra.tuples) {
                if (++nodes > limits.max_enumeration) {
                    result.outcome = Outcome::Resource;
                    return false;
                }
                cols[static_cast<std::size_t>(depth)] = &col;
                for (int i = 0; i < r; ++i)
                    partial[static_cast<std::size_t>(i)] =
                        partial[static_cast<std::size_t>(i)] * static_cast<std::size_t>(f.source_domain) +
                        static_cast<std::size_t>(col[static_cast<std::size_t>(i)]);
                bool ok = self(self, depth + 1);
                for (int i = 0; i < r; ++i)
                    partial[static_cast<std::size_t>(i)] =
                        (partial[static_cast<std::size_t>(i)] -
                         static_cast<std::size_t>(col[static_cast<std::size_t>(i)])) /
                        static_cast<std::size_t>(f.source_domain);
                if (!ok) return false;
            }
            return true;
        };
        if (!rec(rec, 0)) break;
    }
    if (result.violation) {
        result.outcome = Outcome::Found;
        result.holds = false;
    } else {
        result.holds = result.outcome != Outcome::Resource;
    }
    return result;
}

/// Complete, duplicate-free, lexicographically ordered by table values.
/// Backtracks over table entries; a column matrix is checked as soon as the
/// last row it touches is assigned.
inline SearchResult<std::vector<OperationTable>> enumerate_polymorphisms(const Structure& a,
                                                                         const Structure& b,
                                                                         int n,
                                                                         Limits limits = {}) {
    require_similar(a, b);
    std::uint64_t table_size = 1;
    for (int i = 0; i < n; ++i) {
        table_size *= static_cast<std::uint64_t>(a.domain_size);
        if (table_size > limits.max_set_size)
            return resource<std::vector<OperationTable>>("table domain a^n exceeds the cap");
    }
    struct Combo {
        std::vector<std::size_t> rows; // r input indices
        const Relation* target;
    };
    std::vector<std::vector<Combo>> by_last(table_size);
    std::uint64_t combos = 0;
    for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
        const Relation& ra = a.relations[ri];
        const Relation& rb = b.relations[ri];
        const int r = ra.arity;
        std::vector<const Tuple*> cols(static_cast<std::size_t>(n));
        auto rec = [&](auto&& self, int depth) -> bool {
            if (depth == n) {
                Combo c;
                c.rows.assign(static_cast<std::size_t>(r), 0);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < n; ++j)
                        c.rows[static_cast<std::size_t>(i)] =
                            c.rows[static_cast<std::size_t>(i)] * static_cast<std::size_t>(a.domain_size) +
                            static_cast<std::size_t>((*cols[static_cast<std::size_t>(j)])[static_cast<std::size_t>(i)]);
                c.target = &rb;
                std::size_t last = *std::max_element(c.rows.begin(), c.rows.end());
                by_last[last].push_back(std::move(c));
                return ++combos <= limits.max_enumeration;
            }
            for (const auto& col : ra.tuples) {
                cols[static_cast<std::size_t>(depth)] = &col;
                if (!self(self, depth + 1)) return false;
            }
            return true;
        };
        if (!rec(rec, 0))
            return resource<std::vector<OperationTable>>("column combination count exceeds the cap");
    }

    std::vector<OperationTable> out;
    std::vector<int> vals(table_size, 0);
    Tuple image;
    std::uint64_t nodes = 0;
    bool capped = false;
    auto fill = [&](auto&& self, std::size_t pos) -> void {
        if (capped) return;
        if (pos == table_size) {
            out.emplace_back(a.domain_size, b.domain_size, n, vals);
            return;
        }
        for (int v = 0; v < b.domain_size; ++v) {
            if (++nodes > limits.max_enumeration) { capped = true; return; }
            vals[pos] = v;
            bool ok = true;
            for (const Combo& c : by_last[pos]) {
                image.clear();
                for (std::size_t row : c.rows) image.push_back(vals[row]);
                if (!c.target->contains(image)) { ok = false; break; }
            }
            if (ok) self(self, pos + 1);
            if (capped) return;
        }
    };
    fill(fill, 0);
    if (capped) return resource<std::vector<OperationTable>>("enumeration node cap exceeded");
    return found(std::move(out));
}

/// Minor of f along pi : [n] -> [m] (0-based): g(x_1..x_m) = f(x_{pi(1)}..x_{pi(n)}).
inline OperationTable minor(const OperationTable& f, const std::vector<int>& pi, int m) {
    if (static_cast<int>(pi.size()) != f.arity)
        throw Error("minor: map length does not match arity");
    for (int p : pi)
        if (p < 0 || p >= m) throw Error("minor: map image outside [m]");
    return make_table(f.source_domain, f.target_domain, m, [&](const Tuple& x) {
        Tuple y(static_cast<std::size_t>(f.arity));
        for (int j = 0; j < f.arity; ++j)
            y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(pi[static_cast<std::size_t>(j)])];
        return f(y);
    });
}

/// f evaluated on two-element profiles: entry (i,j) is f at the characteristic
/// vector of S (j inside S, i outside).
struct FpMatrix {
    int a = 0;
    std::vector<int> values; // a*a, row-major (i,j)

    int at(int i, int j) const { return values[static_cast<std::size_t>(i * a + j)]; }

    FpMatrix transposed() const {
        FpMatrix t;
        t.a = a;
        t.values.resize(values.size());
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < a; ++j)
                t.values[static_cast<std::size_t>(j * a + i)] = values[static_cast<std::size_t>(i * a + j)];
        return t;
    }

    bool operator==(const FpMatrix&) const = default;
    auto operator<=>(const FpMatrix&) const = default;
};

inline FpMatrix evaluate_fp(const OperationTable& f, const std::vector<int>& subset) {
    std::vector<char> in_s(static_cast<std::size_t>(f.arity), 0);
    for (int k : subset) {
        if (k < 0 || k >= f.arity) throw Error("evaluate_fp: subset element outside [n]");
        in_s[static_cast<std::size_t>(k)] = 1;
    }
    FpMatrix m;
    m.a = f.source_domain;
    Tuple x(static_cast<std::size_t>(f.arity));
    for (int i = 0; i < m.a; ++i)
        for (int j = 0; j < m.a; ++j) {
            for (int k = 0; k < f.arity; ++k)
                x[static_cast<std::size_t>(k)] = in_s[static_cast<std::size_t>(k)] ? j : i;
            m.values.push_back(f(x));
        }
    return m;
}

/// f*(S_1..S_a) = (f^p(S_1), ..., f^p(S_a)) for a partition of [n].
inline std::vector<FpMatrix> evaluate_fstar(const OperationTable& f,
                                            const std::vector<std::vector<int>>& partition) {
    if (static_cast<int>(partition.size()) != f.source_domain)
        throw Error("evaluate_fstar: partition must have one part per domain element");
    std::vector<char> seen(static_cast<std::size_t>(f.arity), 0);
    for (const auto& part : partition)
        for (int k : part) {
            if (k < 0 || k >= f.arity) throw Error("evaluate_fstar: index outside [n]");
            if (seen[static_cast<std::size_t>(k)]++) throw Error("evaluate_fstar: parts overlap");
        }
    for (char c : seen)
        if (!c) throw Error("evaluate_fstar: parts do not cover [n]");
    std::vector<FpMatrix> out;
    out.reserve(partition.size());
    for (const auto& part : partition) out.push_back(evaluate_fp(f, part));
    return out;
}

/// Partition view of an input tuple: part i collects the coordinates set to i.
inline std::vector<std::vector<int>> tuple_partition(const Tuple& x, int a) {
    std::vector<std::vector<int>> parts(static_cast<std::size_t>(a));
    for (std::size_t k = 0; k < x.size(); ++k)
        parts[static_cast<std::size_t>(x[k])].push_back(static_cast<int>(k));
    return parts;
}

enum class SymmetryKind { None, TwoBlockSymmetric, Alternating };

struct SymmetryKindReport {
    SymmetryKind kind = SymmetryKind::None;
    std::string diagnostic;
};

/// Invariance under parity-preserving permutations, plus the trailing equal
/// pair collapse for the alternating kind. Odd arity only.
inline SymmetryKindReport symmetry_kind(const OperationTable& f) {
    if (f.arity % 2 == 0) return {SymmetryKind::None, "even arity"};
    const int n = f.arity;
    std::vector<std::vector<int>> generators;
    for (int i = 0; i + 2 < n; ++i) { // transpositions within a parity class
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i + 2)]);
        generators.push_back(std::move(p));
    }
    bool block_symmetric = true;
    for (const auto& g : generators) {
        bool invariant = true;
        for_each_tuple(f.source_domain, n, [&](const Tuple& x) {
            Tuple y(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(g[static_cast<std::size_t>(i)])];
            if (f(x) != f(y)) { invariant = false; return false; }
            return true;
        });
        if (!invariant) { block_symmetric = false; break; }
    }
    if (!block_symmetric)
        return {SymmetryKind::None, "not invariant under parity-preserving permutations"};
    if (n == 1) return {SymmetryKind::Alternating, ""};
    bool alternating = true;
    for_each_tuple(f.source_domain, n - 2, [&](const Tuple& prefix) {
        Tuple x(static_cast<std::size_t>(n));
        std::copy(prefix.begin(), prefix.end(), x.begin());
        int base = -1;
        for (int v = 0; v < f.source_domain; ++v) {
            x[static_cast<std::size_t>(n - 2)] = v;
            x[static_cast<std::size_t>(n - 1)] = v;
            int val = f(x);
            if (base < 0) base = val;
            else if (val != base) { alternating = false; return false; }
        }
        return true;
    });
    if (alternating) return {SymmetryKind::Alternating, ""};
    return {SymmetryKind::TwoBlockSymmetric, ""};
}

struct DegeneracyReport {
    // index k (2..max_k): witness value tuples for which no disjoint preimage
    // selection exists; k=0,1 slots stay empty
    std::vector<std::optional<std::vector<FpMatrix>>> k_degenerate_witnesses;
    std::vector<std::vector<int>> hard_sets; // subsets S with fp(T) != fp(empty) for all T >= S
};

/// Brute-force subset scan of f^p for small arities.
inline SearchResult<DegeneracyReport> degeneracy_probe(const OperationTable& f, int max_k,
                                                       int max_set_size, Limits limits = {}) {
    const int n = f.arity;
    if (n > 20 || (1u << n) > limits.max_enumeration)
        return resource<DegeneracyReport>("2^n subset scan exceeds the cap");
    const std::uint32_t full = 1u << n;
    std::vector<FpMatrix> fp_of(full);
    std::map<FpMatrix, std::vector<std::uint32_t>> classes;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        std::vector<int> subset;
        for (int k = 0; k < n; ++k)
            if (mask & (1u << k)) subset.push_back(k);
        fp_of[mask] = evaluate_fp(f, subset);
        classes[fp_of[mask]].push_back(mask);
    }
    std::vector<FpMatrix> range;
    for (const auto& [value, masks] : classes) range.push_back(value);

    DegeneracyReport rep;
    rep.k_degenerate_witnesses.resize(static_cast<std::size_t>(max_k) + 1);
    // disjoint representative search over value classes
    auto has_disjoint = [&](const std::vector<int>& value_ids) {
        auto rec = [&](auto&& self, std::size_t idx, std::uint32_t used) -> bool {
            if (idx == value_ids.size()) return true;
            for (std::uint32_t mask : classes[range[static_cast<std::size_t>(value_ids[idx])]])
                if (!(mask & used) && self(self, idx + 1, used | mask)) return true;
            return false;
        };
        return rec(rec, 0, 0);
    };
    for (int k = 2; k <= max_k; ++k) {
        std::vector<int> ids(static_cast<std::size_t>(k), 0);
        bool found_witness = false;
        auto pick = [&](auto&& self, int pos, int lo) -> bool {
            if (pos == k) {
                if (!has_disjoint(ids)) {
                    std::vector<FpMatrix> witness;
                    for (int id : ids) witness.push_back(range[static_cast<std::size_t>(id)]);
                    rep.k_degenerate_witnesses[static_cast<std::size_t>(k)] = std::move(witness);
                    return true;
                }
                return false;
            }
            for (int id = lo; id < static_cast<int>(range.size()); ++id) {
                ids[static_cast<std::size_t>(pos)] = id;
                if (self(self, pos + 1, id)) return true;
            }
            return false;
        };
        found_witness = pick(pick, 0, 0);
        (void)found_witness;
    }
    const FpMatrix& at_empty = fp_of[0];
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        if (std::popcount(mask) > max_set_size) continue;
        bool hard = true;
        std::uint32_t rest = full - 1 - mask;
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            if (fp_of[mask | sub] == at_empty) { hard = false; break; }
            if (sub == 0) break;
        }
        if (hard) {
            std::vector<int> subset;
            for (int k = 0; k < n; ++k)
                if (mask & (1u << k)) subset.push_back(k);
            rep.hard_sets.push_back(std::move(subset));
        }
    }
    return found(std::move(rep));
}

inline nlohmann::json operation_table_to_json(const OperationTable& f) {
    nlohmann::json j;
    j["source_domain"] = f.source_domain;
    j["target_domain"] = f.target_domain;
    j["arity"] = f.arity;
    j["values"] = f.values;
    return j;
}

inline OperationTable operation_table_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("source_domain") || !j.contains("target_domain") ||
        !j.contains("arity") || !j.contains("values"))
        throw Error("operation table document: missing fields");
    return OperationTable(j["source_domain"].get<int>(), j["target_domain"].get<int>(),
                          j["arity"].get<int>(), j["values"].get<std::vector<int>>());
}

} // namespace pcsp
