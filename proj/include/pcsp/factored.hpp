#pragma once

#include <algorithm>
#include <map>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcsp/analysis.hpp"
#include "pcsp/common.hpp"
#include "pcsp/polymorphism.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

using FreqVec = std::vector<int>;   // length a, frequency counts (may go negative in differences)
using FreqTuple = std::vector<int>; // flat r*a: row i occupies [i*a, (i+1)*a)

inline FreqTuple embed_tuple(const Tuple& t, int a) {
    FreqTuple v(t.size() * static_cast<std::size_t>(a), 0);
    for (std::size_t i = 0; i < t.size(); ++i)
        v[i * static_cast<std::size_t>(a) + static_cast<std::size_t>(t[i])] = 1;
    return v;
}

inline std::vector<FreqTuple> embed_relation(const Relation& r, int a) {
    std::vector<FreqTuple> out;
    out.reserve(r.tuples.size());
    for (const auto& t : r.tuples) out.push_back(embed_tuple(t, a));
    return out;
}

inline FreqTuple add_tuples(const FreqTuple& x, const FreqTuple& y) {
    FreqTuple out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

inline FreqTuple sub_tuples(const FreqTuple& x, const FreqTuple& y) {
    FreqTuple out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

/// Iterated Minkowski sum: the set of sums of k elements of rbar. k=0 yields
/// the singleton zero tuple. Coordinates are packed into machine words when
/// they fit, which keeps large powers affordable.
inline SearchResult<std::vector<FreqTuple>> minkowski_power(const std::vector<FreqTuple>& rbar,
                                                            int k, Limits limits = {}) {
    if (k < 0) throw Error("minkowski_power: k must be >= 0");
    if (rbar.empty()) return found(std::vector<FreqTuple>{});
    const std::size_t width = rbar[0].size();

    int max_coord = 0;
    for (const auto& g : rbar)
        for (int x : g) {
            if (x < 0) max_coord = -1; // packing handles nonnegative inputs only
            max_coord = std::max(max_coord, x);
        }
    int bits = 1;
    while (max_coord >= 0 && (1ll << bits) <= static_cast<long long>(max_coord) * k + 1) ++bits;
    const bool packable = max_coord >= 0 && width * static_cast<std::size_t>(bits) <= 64;

    if (packable) {
        // first coordinate in the high bits keeps packed order lexicographic
        auto pack = [&](const FreqTuple& t) {
            std::uint64_t p = 0;
            for (std::size_t i = 0; i < width; ++i)
                p |= static_cast<std::uint64_t>(t[i])
                     << (bits * static_cast<int>(width - 1 - i));
            return p;
        };
        std::vector<std::uint64_t> gens;
        gens.reserve(rbar.size());
        for (const auto& g : rbar) gens.push_back(pack(g));
        std::vector<std::uint64_t> cur{0};
        for (int step = 0; step < k; ++step) {
            std::vector<std::uint64_t> next;
            if (cur.size() * gens.size() > limits.max_set_size)
                return resource<std::vector<FreqTuple>>("Minkowski power exceeded the set cap");
            next.reserve(cur.size() * gens.size());
            for (std::uint64_t x : cur)
                for (std::uint64_t g : gens) next.push_back(x + g); // fields cannot overflow
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            cur = std::move(next);
        }
        std::vector<FreqTuple> out;
        out.reserve(cur.size());
        const std::uint64_t mask = (bits == 64 ? ~0ull : (1ull << bits) - 1);
        for (std::uint64_t p : cur) {
            FreqTuple t(width);
            for (std::size_t i = 0; i < width; ++i)
                t[i] = static_cast<int>((p >> (bits * static_cast<int>(width - 1 - i))) & mask);
            out.push_back(std::move(t));
        }
        return found(std::move(out));
    }

    std::vector<FreqTuple> cur{FreqTuple(width, 0)};
    for (int step = 0; step < k; ++step) {
        std::vector<FreqTuple> next;
        if (cur.size() * rbar.size() > limits.max_set_size)
            return resource<std::vector<FreqTuple>>("Minkowski power exceeded the set cap");
        next.reserve(cur.size() * rbar.size());
        for (const auto& x : cur)
            for (const auto& g : rbar) next.push_back(add_tuples(x, g));
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur = std::move(next);
    }
    return found(std::move(cur));
}

/// Nonnegative integer vectors of length a summing to k, in lexicographic order.
inline std::vector<FreqVec> enumerate_sk(int a, int k) {
    std::vector<FreqVec> out;
    FreqVec cur(static_cast<std::size_t>(a), 0);
    auto rec = [&](auto&& self, int pos, int rest) -> void {
        if (pos == a - 1) {
            cur[static_cast<std::size_t>(pos)] = rest;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, rest - v);
        }
    };
    if (a == 0) return out;
    rec(rec, 0, k);
    return out;
}

/// The difference set S_{k+1} - S_k: vectors summing to 1 with coordinates in
/// [-k, k+1] whose positive part fits in S_{k+1}.
inline std::vector<FreqVec> enumerate_sk_difference(int a, int k) {
    std::vector<FreqVec> out;
    FreqVec cur(static_cast<std::size_t>(a), 0);
    auto rec = [&](auto&& self, int pos, int rest) -> void {
        if (pos == a - 1) {
            if (rest < -k || rest > k + 1) return;
            cur[static_cast<std::size_t>(pos)] = rest;
            int pos_sum = 0;
            for (int c : cur) pos_sum += std::max(c, 0);
            if (pos_sum <= k + 1) out.push_back(cur);
            return;
        }
        for (int v = -k; v <= k + 1; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, rest - v);
        }
    };
    if (a == 0) return out;
    rec(rec, 0, 1);
    return out;
}

enum class FactoredKind { BlockSymmetric, Alternating };

/// Operation table in the symmetry-factored domain: alternating tables map
/// S_{k+1} - S_k to B; block-symmetric tables map S_k x S_{k+1} to B.
struct FactoredTable {
    FactoredKind kind = FactoredKind::Alternating;
    int k = 0;
    int source_domain = 0;
    int target_domain = 0;
    std::vector<FreqVec> alt_domain;
    std::vector<std::pair<FreqVec, FreqVec>> block_domain;
    std::vector<int> values;

    int value_at_alt(const FreqVec& x) const {
        auto it = std::lower_bound(alt_domain.begin(), alt_domain.end(), x);
        if (it == alt_domain.end() || *it != x)
            throw Error("factored table: vector outside the alternating domain");
        return values[static_cast<std::size_t>(it - alt_domain.begin())];
    }

    int value_at_block(const FreqVec& x, const FreqVec& y) const {
        std::pair<FreqVec, FreqVec> key{x, y};
        auto it = std::lower_bound(block_domain.begin(), block_domain.end(), key);
        if (it == block_domain.end() || *it != key)
            throw Error("factored table: pair outside the block domain");
        return values[static_cast<std::size_t>(it - block_domain.begin())];
    }
};

/// Analytic block-symmetric table from a callable on (x in S_k, y in S_{k+1}).
template <class Fn>
FactoredTable make_block_table(int a, int b, int k, Fn&& fn) {
    FactoredTable t;
    t.kind = FactoredKind::BlockSymmetric;
    t.k = k;
    t.source_domain = a;
    t.target_domain = b;
    for (const auto& x : enumerate_sk(a, k))
        for (const auto& y : enumerate_sk(a, k + 1)) t.block_domain.emplace_back(x, y);
    std::sort(t.block_domain.begin(), t.block_domain.end());
    for (const auto& [x, y] : t.block_domain) {
        int v = fn(x, y);
        if (v < 0 || v >= b) throw Error("make_block_table: value outside target domain");
        t.values.push_back(v);
    }
    return t;
}

/// Expands a factored table into the explicit operation of arity 2k+1.
/// Convention: the first symmetry block is the odd positions (k+1 inputs),
/// the second block is the even positions (k inputs).
inline SearchResult<OperationTable> expand_factored(const FactoredTable& t, Limits limits = {}) {
    const int n = 2 * t.k + 1;
    std::uint64_t size = 1;
    for (int i = 0; i < n; ++i) {
        size *= static_cast<std::uint64_t>(t.source_domain);
        if (size > limits.max_set_size)
            return resource<OperationTable>("expansion a^(2k+1) exceeds the cap");
    }
    const int a = t.source_domain;
    OperationTable out = make_table(a, t.target_domain, n, [&](const Tuple& x) {
        FreqVec odd(static_cast<std::size_t>(a), 0), even(static_cast<std::size_t>(a), 0);
        for (int i = 0; i < n; ++i) {
            if (i % 2 == 0) ++odd[static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
            else ++even[static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
        }
        if (t.kind == FactoredKind::Alternating) {
            FreqVec diff(static_cast<std::size_t>(a));
            for (int i = 0; i < a; ++i)
                diff[static_cast<std::size_t>(i)] =
                    odd[static_cast<std::size_t>(i)] - even[static_cast<std::size_t>(i)];
            return t.value_at_alt(diff);
        }
        return t.value_at_block(even, odd);
    });
    return found(std::move(out));
}

inline bool relation_is_symmetric(const Relation& r) {
    for (const auto& t : r.tuples) {
        Tuple perm = t;
        std::sort(perm.begin(), perm.end());
        do {
            if (!r.contains(perm)) return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return true;
}

namespace detail {

struct FactoredConstraint {
    std::vector<int> labels;  // r label ids; sorted when multiset
    bool multiset = false;
    const Relation* target = nullptr;
    const std::vector<FreqVec>* target_counts = nullptr; // value count vectors of target tuples
};

// Myhill-Nerode classes of count-vector prefixes of a symmetric relation:
// two prefixes are merged when they admit exactly the same completions.
struct ColumnClasses {
    int a = 0, r = 0;
    std::vector<std::map<FreqVec, int>> class_of; // per depth 0..r
    std::vector<std::vector<std::vector<int>>> trans; // [depth][class][value] -> class
    std::vector<std::vector<char>> alive;             // [depth][class]: accept reachable
    int start_class = 0;

    ColumnClasses(const Relation& rel, int a_) : a(a_), r(rel.arity) {
        std::set<FreqVec> counts;
        for (const auto& t : rel.tuples) {
            FreqVec c(static_cast<std::size_t>(a), 0);
            for (int v : t) ++c[static_cast<std::size_t>(v)];
            counts.insert(std::move(c));
        }
        class_of.resize(static_cast<std::size_t>(r) + 1);
        trans.resize(static_cast<std::size_t>(r));
        alive.resize(static_cast<std::size_t>(r) + 1);
        // depth r: accept / reject
        for (const auto& p : partials(r)) class_of[static_cast<std::size_t>(r)][p] = counts.count(p) ? 1 : 0;
        alive[static_cast<std::size_t>(r)] = {0, 1}; // class 1 accepts
        for (int d = r - 1; d >= 0; --d) {
            std::map<std::vector<int>, int> sig_to_id;
            std::vector<std::vector<int>> sigs;
            for (const auto& p : partials(d)) {
                std::vector<int> sig(static_cast<std::size_t>(a));
                for (int v = 0; v < a; ++v) {
                    FreqVec q = p;
                    ++q[static_cast<std::size_t>(v)];
                    sig[static_cast<std::size_t>(v)] = class_of[static_cast<std::size_t>(d) + 1].at(q);
                }
                auto [it, inserted] = sig_to_id.emplace(sig, static_cast<int>(sigs.size()));
                if (inserted) sigs.push_back(sig);
                class_of[static_cast<std::size_t>(d)][p] = it->second;
            }
            trans[static_cast<std::size_t>(d)] = sigs;
            alive[static_cast<std::size_t>(d)].resize(sigs.size(), 0);
            for (std::size_t c = 0; c < sigs.size(); ++c)
                for (int v = 0; v < a; ++v)
                    if (alive[static_cast<std::size_t>(d) + 1]
                             [static_cast<std::size_t>(sigs[c][static_cast<std::size_t>(v)])]) {
                        alive[static_cast<std::size_t>(d)][c] = 1;
                        break;
                    }
        }
        start_class = class_of[0].at(FreqVec(static_cast<std::size_t>(a), 0));
    }

    std::vector<FreqVec> partials(int d) const {
        std::vector<FreqVec> out;
        FreqVec cur(static_cast<std::size_t>(a), 0);
        auto rec = [&](auto&& self, int pos, int rest) -> void {
            if (pos == a - 1) {
                cur[static_cast<std::size_t>(pos)] = rest;
                out.push_back(cur);
                return;
            }
            for (int v = 0; v <= rest; ++v) {
                cur[static_cast<std::size_t>(pos)] = v;
                self(self, pos + 1, rest - v);
            }
        };
        if (a > 0) rec(rec, 0, d);
        return out;
    }
};

// Enumerates the realizable label multisets of one relation by a row-wise DP
// whose state is the multiset of column classes per block.
class MultisetConstraintGen {
  public:
    MultisetConstraintGen(const Relation& ra, int a, int n1, int n2, FactoredKind kind,
                          const std::map<FreqVec, int>& alt_index,
                          const std::map<std::pair<FreqVec, FreqVec>, int>& block_index,
                          Limits limits)
        : classes_(ra, a), a_(a), r_(ra.arity), n1_(n1), n2_(n2), kind_(kind),
          alt_index_(alt_index), block_index_(block_index), limits_(limits) {}

    // emit(labels): sorted label ids, one call per realizable multiset
    template <class Emit>
    Outcome run(Emit&& emit) {
        State start;
        start.g1.assign(static_cast<std::size_t>(n1_), classes_.start_class);
        start.g2.assign(static_cast<std::size_t>(n2_), classes_.start_class);
        std::vector<int> labels;
        return dfs(0, start, -1, labels, emit) ? Outcome::Found : Outcome::Resource;
    }

  private:
    struct State {
        std::vector<int> g1, g2; // sorted class ids per block
        bool operator<(const State& o) const { return std::tie(g1, g2) < std::tie(o.g1, o.g2); }
    };

    bool accepting(const State& s) const {
        for (int c : s.g1)
            if (c != 1) return false;
        for (int c : s.g2)
            if (c != 1) return false;
        return true;
    }

    // all (label, next state) edges from a state at the given row, deduplicated
    const std::vector<std::pair<int, State>>& edges(int row, const State& s) {
        auto key = std::make_pair(row, s);
        auto it = edge_cache_.find(key);
        if (it != edge_cache_.end()) return it->second;
        std::set<std::pair<int, State>> out;
        const auto& tr = classes_.trans[static_cast<std::size_t>(row)];
        const auto& alive_next = classes_.alive[static_cast<std::size_t>(row) + 1];
        FreqVec c1(static_cast<std::size_t>(a_), 0), c2(static_cast<std::size_t>(a_), 0);
        State next = s;
        // choose values per column; equal-class runs take nondecreasing values
        auto rec1 = [&](auto&& self, int col, int min_v) -> void {
            if (col == n1_ + n2_) {
                int label;
                if (kind_ == FactoredKind::Alternating) {
                    FreqVec diff(static_cast<std::size_t>(a_));
                    for (int i = 0; i < a_; ++i)
                        diff[static_cast<std::size_t>(i)] =
                            c1[static_cast<std::size_t>(i)] - c2[static_cast<std::size_t>(i)];
                    auto dit = alt_index_.find(diff);
                    if (dit == alt_index_.end()) return;
                    label = dit->second;
                } else {
                    auto bit = block_index_.find(std::make_pair(c1, c2));
                    if (bit == block_index_.end()) return;
                    label = bit->second;
                }
                State canon = next;
                std::sort(canon.g1.begin(), canon.g1.end());
                std::sort(canon.g2.begin(), canon.g2.end());
                out.emplace(label, std::move(canon));
                return;
            }
            bool first_block = col < n1_;
            int idx = first_block ? col : col - n1_;
            const auto& group = first_block ? s.g1 : s.g2;
            auto& counts = first_block ? c1 : c2;
            auto& ng = first_block ? next.g1 : next.g2;
            int cls = group[static_cast<std::size_t>(idx)];
            bool same_run = idx > 0 && group[static_cast<std::size_t>(idx - 1)] == cls;
            int lo = (same_run && first_block == (col - 1 < n1_)) ? min_v : 0;
            for (int v = lo; v < a_; ++v) {
                int ncls = tr[static_cast<std::size_t>(cls)][static_cast<std::size_t>(v)];
                if (!alive_next[static_cast<std::size_t>(ncls)]) continue;
                ++counts[static_cast<std::size_t>(v)];
                ng[static_cast<std::size_t>(idx)] = ncls;
                self(self, col + 1, v);
                --counts[static_cast<std::size_t>(v)];
            }
        };
        rec1(rec1, 0, 0);
        auto [ins, ok] = edge_cache_.emplace(std::move(key),
                                             std::vector<std::pair<int, State>>(out.begin(), out.end()));
        return ins->second;
    }

    bool reachable(int row, const State& s) {
        if (row == r_) return accepting(s);
        auto key = std::make_pair(row, s);
        auto it = reach_cache_.find(key);
        if (it != reach_cache_.end()) return it->second;
        reach_cache_[key] = false; // guards against re-entry; the DAG has no cycles
        bool ok = false;
        for (const auto& [label, next] : edges(row, s))
            if (reachable(row + 1, next)) { ok = true; break; }
        reach_cache_[key] = ok;
        return ok;
    }

    template <class Emit>
    bool dfs(int row, const State& s, int min_label, std::vector<int>& labels, Emit&& emit) {
        if (++nodes_ > limits_.max_enumeration) return false;
        if (row == r_) {
            if (accepting(s)) emit(labels);
            return true;
        }
        if (!reachable(row, s)) return true;
        for (const auto& [label, next] : edges(row, s)) {
            if (label < min_label) continue;
            labels.push_back(label);
            bool ok = dfs(row + 1, next, label, labels, emit);
            labels.pop_back();
            if (!ok) return false;
        }
        return true;
    }

    ColumnClasses classes_;
    int a_, r_, n1_, n2_;
    FactoredKind kind_;
    const std::map<FreqVec, int>& alt_index_;
    const std::map<std::pair<FreqVec, FreqVec>, int>& block_index_;
    Limits limits_;
    std::map<std::pair<int, State>, std::vector<std::pair<int, State>>> edge_cache_;
    std::map<std::pair<int, State>, bool> reach_cache_;
    std::uint64_t nodes_ = 0;
};

// Exact feasibility oracle for one symmetric relation, used when the multiset
// constraints are too many to materialize. Runs a forward DP over the row
// automaton crossed with the image value counts; unassigned labels act as
// wildcards, so partial checks overapproximate and complete checks are exact.
class DpPropagator {
  public:
    // cost model: construction plus one DP run per search node
    static std::uint64_t estimated_cost(const Relation& ra, int a, int bd, int n1, int n2,
                                        std::uint64_t nlabels) {
        ColumnClasses classes(ra, a);
        auto multisets = [](std::uint64_t options, int slots) {
            // C(options + slots - 1, slots)
            std::uint64_t num = 1, den = 1;
            for (int i = 0; i < slots; ++i) {
                num *= options + static_cast<std::uint64_t>(i);
                den *= static_cast<std::uint64_t>(i) + 1;
            }
            return num / den;
        };
        std::uint64_t states = 0;
        for (int d = 0; d < ra.arity; ++d) {
            std::uint64_t nclasses = classes.trans[static_cast<std::size_t>(d)].size();
            states = std::max(states, multisets(nclasses, n1) * multisets(nclasses, n2));
        }
        std::uint64_t nv = multisets(static_cast<std::uint64_t>(bd) + 2, ra.arity);
        std::uint64_t per_row_values = 1;
        for (int i = 0; i < n1 + n2; ++i) per_row_values *= static_cast<std::uint64_t>(a);
        std::uint64_t construction = states * per_row_values * static_cast<std::uint64_t>(ra.arity);
        std::uint64_t per_call = states * nv;
        std::uint64_t search_nodes = nlabels * static_cast<std::uint64_t>(bd) * 4;
        if (per_call > 0 && search_nodes > 0 &&
            per_call > std::numeric_limits<std::uint64_t>::max() / search_nodes)
            return std::numeric_limits<std::uint64_t>::max();
        return std::max(construction, per_call * search_nodes);
    }

    DpPropagator(const Relation& ra, const Relation& rb, int a, int bd, int n1, int n2,
                 FactoredKind kind, const std::map<FreqVec, int>& alt_index,
                 const std::map<std::pair<FreqVec, FreqVec>, int>& block_index)
        : bd_(bd), r_(ra.arity) {
        ColumnClasses classes(ra, a);
        struct State {
            std::vector<int> g1, g2;
            bool operator<(const State& o) const { return std::tie(g1, g2) < std::tie(o.g1, o.g2); }
        };
        State start;
        start.g1.assign(static_cast<std::size_t>(n1), classes.start_class);
        start.g2.assign(static_cast<std::size_t>(n2), classes.start_class);
        std::vector<std::vector<State>> states(static_cast<std::size_t>(r_) + 1);
        states[0].push_back(start);
        edges_.resize(static_cast<std::size_t>(r_));
        for (int row = 0; row < r_; ++row) {
            std::map<State, int> next_index;
            edges_[static_cast<std::size_t>(row)].resize(states[static_cast<std::size_t>(row)].size());
            for (std::size_t si = 0; si < states[static_cast<std::size_t>(row)].size(); ++si) {
                const State& s = states[static_cast<std::size_t>(row)][si];
                std::set<std::pair<int, State>> out;
                const auto& tr = classes.trans[static_cast<std::size_t>(row)];
                const auto& alive_next = classes.alive[static_cast<std::size_t>(row) + 1];
                FreqVec c1(static_cast<std::size_t>(a), 0), c2(static_cast<std::size_t>(a), 0);
                State next = s;
                auto rec = [&](auto&& self, int col, int min_v) -> void {
                    if (col == n1 + n2) {
                        int label;
                        if (kind == FactoredKind::Alternating) {
                            FreqVec diff(static_cast<std::size_t>(a));
                            for (int i = 0; i < a; ++i)
                                diff[static_cast<std::size_t>(i)] =
                                    c1[static_cast<std::size_t>(i)] - c2[static_cast<std::size_t>(i)];
                            auto dit = alt_index.find(diff);
                            if (dit == alt_index.end()) return;
                            label = dit->second;
                        } else {
                            auto bit = block_index.find(std::make_pair(c1, c2));
                            if (bit == block_index.end()) return;
                            label = bit->second;
                        }
                        State canon = next;
                        std::sort(canon.g1.begin(), canon.g1.end());
                        std::sort(canon.g2.begin(), canon.g2.end());
                        out.emplace(label, std::move(canon));
                        return;
                    }
                    bool first_block = col < n1;
                    int idx = first_block ? col : col - n1;
                    const auto& group = first_block ? s.g1 : s.g2;
                    auto& counts = first_block ? c1 : c2;
                    auto& ng = first_block ? next.g1 : next.g2;
                    int cls = group[static_cast<std::size_t>(idx)];
                    bool same_run = idx > 0 && group[static_cast<std::size_t>(idx - 1)] == cls;
                    int lo = same_run ? min_v : 0;
                    for (int v = lo; v < a; ++v) {
                        int ncls = tr[static_cast<std::size_t>(cls)][static_cast<std::size_t>(v)];
                        if (!alive_next[static_cast<std::size_t>(ncls)]) continue;
                        ++counts[static_cast<std::size_t>(v)];
                        ng[static_cast<std::size_t>(idx)] = ncls;
                        self(self, col + 1, v);
                        --counts[static_cast<std::size_t>(v)];
                    }
                };
                rec(rec, 0, 0);
                for (const auto& [label, ns] : out) {
                    auto [it, inserted] = next_index.emplace(ns, static_cast<int>(states[static_cast<std::size_t>(row) + 1].size()));
                    if (inserted) states[static_cast<std::size_t>(row) + 1].push_back(ns);
                    edges_[static_cast<std::size_t>(row)][si].push_back({label, it->second});
                }
            }
        }
        state_count_.resize(static_cast<std::size_t>(r_) + 1);
        for (int row = 0; row <= r_; ++row)
            state_count_[static_cast<std::size_t>(row)] =
                static_cast<int>(states[static_cast<std::size_t>(row)].size());
        accept_state_.assign(states[static_cast<std::size_t>(r_)].size(), 0);
        for (std::size_t si = 0; si < states[static_cast<std::size_t>(r_)].size(); ++si) {
            const State& s = states[static_cast<std::size_t>(r_)][si];
            bool acc = true;
            for (int c : s.g1)
                if (c != 1) acc = false;
            for (int c : s.g2)
                if (c != 1) acc = false;
            accept_state_[si] = acc ? 1 : 0;
        }

        // image value-count states over bd values plus one wildcard slot
        std::map<std::vector<int>, int> vindex;
        std::vector<std::vector<int>> vlist;
        std::vector<int> zero(static_cast<std::size_t>(bd) + 1, 0);
        vindex[zero] = 0;
        vlist.push_back(zero);
        for (std::size_t i = 0; i < vlist.size(); ++i) {
            std::vector<int> cur = vlist[i];
            int total = 0;
            for (int c : cur) total += c;
            vtrans_.emplace_back(static_cast<std::size_t>(bd) + 1, -1);
            if (total == r_) continue;
            for (int slot = 0; slot <= bd; ++slot) {
                std::vector<int> next = cur;
                ++next[static_cast<std::size_t>(slot)];
                auto [it, inserted] = vindex.emplace(next, static_cast<int>(vlist.size()));
                if (inserted) vlist.push_back(next);
                vtrans_.back()[static_cast<std::size_t>(slot)] = it->second;
            }
        }
        nv_ = static_cast<int>(vlist.size());


        std::set<FreqVec> target_counts;
        for (const auto& t : rb.tuples) {
            FreqVec c(static_cast<std::size_t>(bd), 0);
            for (int v : t) ++c[static_cast<std::size_t>(v)];
            target_counts.insert(std::move(c));
        }
        accept_v_.assign(static_cast<std::size_t>(nv_), 0);
        for (int vi = 0; vi < nv_; ++vi) {
            const auto& counts = vlist[static_cast<std::size_t>(vi)];
            int total = 0;
            for (int c : counts) total += c;
            if (total != r_) continue;
            int wildcards = counts[static_cast<std::size_t>(bd)];
            for (const auto& target : target_counts) {
                bool fits = true;
                int slack = 0;
                for (int v = 0; v < bd; ++v) {
                    int d = target[static_cast<std::size_t>(v)] - counts[static_cast<std::size_t>(v)];
                    if (d < 0) { fits = false; break; }
                    slack += d;
                }
                if (fits && slack == wildcards) { accept_v_[static_cast<std::size_t>(vi)] = 1; break; }
            }
        }
    }

    std::uint64_t dp_size() const {
        std::uint64_t worst = 0;
        for (int c : state_count_) worst = std::max<std::uint64_t>(worst, static_cast<std::uint64_t>(c));
        return worst * static_cast<std::uint64_t>(nv_);
    }

    bool feasible(const std::vector<int>& assignment) const {
        std::vector<char> cur(static_cast<std::size_t>(state_count_[0]) * static_cast<std::size_t>(nv_), 0);
        cur[0] = 1; // (start state, zero counts)
        for (int row = 0; row < r_; ++row) {
            std::vector<char> next(static_cast<std::size_t>(state_count_[static_cast<std::size_t>(row) + 1]) *
                                       static_cast<std::size_t>(nv_),
                                   0);
            const auto& row_edges = edges_[static_cast<std::size_t>(row)];
            for (int si = 0; si < state_count_[static_cast<std::size_t>(row)]; ++si) {
                const auto& es = row_edges[static_cast<std::size_t>(si)];
                if (es.empty()) continue;
                for (int vi = 0; vi < nv_; ++vi) {
                    if (!cur[static_cast<std::size_t>(si) * static_cast<std::size_t>(nv_) +
                             static_cast<std::size_t>(vi)])
                        continue;
                    for (const auto& e : es) {
                        int val = assignment[static_cast<std::size_t>(e.label)];
                        int slot = val < 0 ? bd_ : val;
                        int nvi = vtrans_[static_cast<std::size_t>(vi)][static_cast<std::size_t>(slot)];
                        if (nvi < 0) continue;
                        next[static_cast<std::size_t>(e.next) * static_cast<std::size_t>(nv_) +
                             static_cast<std::size_t>(nvi)] = 1;
                    }
                }
            }
            cur = std::move(next);
        }
        // a violation is a realizable matrix (accepting state) whose image
        // counts cannot be completed into any target tuple
        for (int si = 0; si < state_count_[static_cast<std::size_t>(r_)]; ++si) {
            if (!accept_state_[static_cast<std::size_t>(si)]) continue;
            for (int vi = 0; vi < nv_; ++vi)
                if (cur[static_cast<std::size_t>(si) * static_cast<std::size_t>(nv_) +
                        static_cast<std::size_t>(vi)] &&
                    !accept_v_[static_cast<std::size_t>(vi)])
                    return false;
        }
        return true;
    }

  private:
    struct Edge {
        int label;
        int next;
    };
    int bd_, r_;
    int nv_ = 0;
    std::vector<std::vector<std::vector<Edge>>> edges_; // [row][state] -> edges
    std::vector<int> state_count_;
    std::vector<char> accept_state_;
    std::vector<std::vector<int>> vtrans_;
    std::vector<char> accept_v_;
};

} // namespace detail

/// Searches for a factored polymorphism witness of arity 2k+1 for (A, B).
/// Constraints are generated per relation: pairwise over the Minkowski powers
/// in general, or through a row-DP multiset enumeration when both sides of the
/// relation are symmetric. Returns the lexicographically least table.
inline SearchResult<FactoredTable> exists_factored_polymorphism(const Structure& a,
                                                                const Structure& b,
                                                                FactoredKind kind, int k,
                                                                Limits limits = {}) {
    require_similar(a, b);
    if (k < 0) throw Error("exists_factored_polymorphism: k must be >= 0");
    const int ad = a.domain_size, bd = b.domain_size;

    FactoredTable table;
    table.kind = kind;
    table.k = k;
    table.source_domain = ad;
    table.target_domain = bd;

    std::map<FreqVec, int> alt_index;
    std::map<std::pair<FreqVec, FreqVec>, int> block_index;
    std::size_t nlabels = 0;
    if (kind == FactoredKind::Alternating) {
        table.alt_domain = enumerate_sk_difference(ad, k);
        std::sort(table.alt_domain.begin(), table.alt_domain.end());
        for (std::size_t i = 0; i < table.alt_domain.size(); ++i)
            alt_index[table.alt_domain[i]] = static_cast<int>(i);
        nlabels = table.alt_domain.size();
    } else {
        for (const auto& x : enumerate_sk(ad, k))
            for (const auto& y : enumerate_sk(ad, k + 1)) table.block_domain.emplace_back(x, y);
        std::sort(table.block_domain.begin(), table.block_domain.end());
        for (std::size_t i = 0; i < table.block_domain.size(); ++i)
            block_index[table.block_domain[i]] = static_cast<int>(i);
        nlabels = table.block_domain.size();
    }

    std::vector<detail::FactoredConstraint> constraints;
    std::vector<std::unique_ptr<detail::DpPropagator>> propagators;
    std::vector<std::vector<FreqVec>> count_store; // per relation, target count vectors
    count_store.reserve(a.relations.size());

    for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
        const Relation& ra = a.relations[ri];
        const Relation& rb = b.relations[ri];
        if (ra.tuples.empty()) { count_store.emplace_back(); continue; }
        const int r = ra.arity;
        const bool symmetric_path = relation_is_symmetric(ra) && relation_is_symmetric(rb);
        {
            std::set<FreqVec> counts;
            for (const auto& t : rb.tuples) {
                FreqVec c(static_cast<std::size_t>(bd), 0);
                for (int v : t) ++c[static_cast<std::size_t>(v)];
                counts.insert(std::move(c));
            }
            count_store.emplace_back(counts.begin(), counts.end());
        }
        if (symmetric_path) {
            int n1 = kind == FactoredKind::Alternating ? k + 1 : k;
            int n2 = kind == FactoredKind::Alternating ? k : k + 1;
            auto materialize = [&](std::uint64_t budget) -> Outcome {
                Limits mat_budget = limits;
                mat_budget.max_enumeration = budget;
                detail::MultisetConstraintGen gen(ra, ad, n1, n2, kind, alt_index, block_index,
                                                  mat_budget);
                std::set<std::vector<int>> emitted;
                Outcome out = gen.run([&](const std::vector<int>& labels) { emitted.insert(labels); });
                if (out != Outcome::Resource) {
                    for (const auto& labels : emitted) {
                        detail::FactoredConstraint c;
                        c.labels = labels;
                        c.multiset = true;
                        c.target = &rb;
                        c.target_counts = &count_store.back();
                        constraints.push_back(std::move(c));
                    }
                }
                return out;
            };
            std::uint64_t trial = std::min<std::uint64_t>(limits.max_enumeration, 4'000'000);
            if (materialize(trial) == Outcome::Resource) {
                // too many multisets to materialize cheaply: prefer the exact
                // row-DP oracle when its total search cost is affordable,
                // otherwise retry materialization with the full budget
                if (detail::DpPropagator::estimated_cost(ra, ad, bd, n1, n2, nlabels) <=
                    500'000'000ull) {
                    propagators.push_back(std::make_unique<detail::DpPropagator>(
                        ra, rb, ad, bd, n1, n2, kind, alt_index, block_index));
                } else if (trial >= limits.max_enumeration ||
                           materialize(limits.max_enumeration) == Outcome::Resource) {
                    return resource<FactoredTable>(
                        "multiset constraint enumeration exceeded the cap");
                }
            }
        } else {
            auto rbar = embed_relation(ra, ad);
            auto kr = minkowski_power(rbar, k, limits);
            auto k1r = minkowski_power(rbar, k + 1, limits);
            if (kr.outcome == Outcome::Resource || k1r.outcome == Outcome::Resource)
                return resource<FactoredTable>("Minkowski power exceeded the set cap");
            std::uint64_t pairs = static_cast<std::uint64_t>(kr.value->size()) *
                                  (k1r.value->empty() ? 0 : k1r.value->size());
            if (pairs > limits.max_enumeration)
                return resource<FactoredTable>("pairwise constraint enumeration exceeds the cap");
            std::set<std::vector<int>> emitted;
            for (const auto& y : *k1r.value)
                for (const auto& z : *kr.value) {
                    std::vector<int> labels;
                    labels.reserve(static_cast<std::size_t>(r));
                    for (int i = 0; i < r; ++i) {
                        if (kind == FactoredKind::Alternating) {
                            FreqVec diff(static_cast<std::size_t>(ad));
                            for (int j = 0; j < ad; ++j)
                                diff[static_cast<std::size_t>(j)] =
                                    y[static_cast<std::size_t>(i * ad + j)] -
                                    z[static_cast<std::size_t>(i * ad + j)];
                            labels.push_back(alt_index.at(diff));
                        } else {
                            FreqVec x(static_cast<std::size_t>(ad)), yy(static_cast<std::size_t>(ad));
                            for (int j = 0; j < ad; ++j) {
                                x[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(i * ad + j)];
                                yy[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(i * ad + j)];
                            }
                            labels.push_back(block_index.at(std::make_pair(x, yy)));
                        }
                    }
                    emitted.insert(std::move(labels));
                }
            for (const auto& labels : emitted) {
                detail::FactoredConstraint c;
                c.labels = labels;
                c.multiset = false;
                c.target = &rb;
                constraints.push_back(std::move(c));
            }
        }
    }

    // backtracking over label values, lexicographically least witness
    std::vector<int> assignment(nlabels, -1);
    std::vector<std::vector<std::size_t>> touching(nlabels);
    for (std::size_t ci = 0; ci < constraints.size(); ++ci)
        for (int l : constraints[ci].labels) touching[static_cast<std::size_t>(l)].push_back(ci);
    for (auto& t : touching) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }

    auto constraint_ok = [&](const detail::FactoredConstraint& c) -> bool {
        int unassigned = 0;
        for (int l : c.labels)
            if (assignment[static_cast<std::size_t>(l)] < 0) ++unassigned;
        if (c.multiset) {
            FreqVec have(static_cast<std::size_t>(bd), 0);
            for (int l : c.labels)
                if (assignment[static_cast<std::size_t>(l)] >= 0)
                    ++have[static_cast<std::size_t>(assignment[static_cast<std::size_t>(l)])];
            for (const auto& target : *c.target_counts) {
                bool fits = true;
                int slack = 0;
                for (int v = 0; v < bd; ++v) {
                    int d = target[static_cast<std::size_t>(v)] - have[static_cast<std::size_t>(v)];
                    if (d < 0) { fits = false; break; }
                    slack += d;
                }
                if (fits && slack == unassigned) return true;
            }
            return false;
        }
        for (const auto& t : c.target->tuples) {
            bool fits = true;
            for (std::size_t i = 0; i < c.labels.size(); ++i) {
                int val = assignment[static_cast<std::size_t>(c.labels[i])];
                if (val >= 0 && val != t[i]) { fits = false; break; }
            }
            if (fits) return true;
        }
        return false;
    };

    std::uint64_t nodes = 0;
    bool capped = false;
    auto search = [&](auto&& self, std::size_t pos) -> bool {
        if (pos == nlabels) return true;
        for (int v = 0; v < bd; ++v) {
            if (++nodes > limits.max_nodes) { capped = true; return false; }
            assignment[pos] = v;
            bool ok = true;
            for (std::size_t ci : touching[pos])
                if (!constraint_ok(constraints[ci])) { ok = false; break; }
            for (const auto& prop : propagators) {
                if (!ok) break;
                if (!prop->feasible(assignment)) ok = false;
            }
            if (ok && self(self, pos + 1)) return true;
            if (capped) return false;
        }
        assignment[pos] = -1;
        return false;
    };
    bool ok = search(search, 0);
    if (capped) return resource<FactoredTable>("factored search node cap exceeded");
    if (!ok) return none<FactoredTable>();
    table.values.assign(assignment.begin(), assignment.end());
    for (const auto& c : constraints)
        if (!constraint_ok(c)) throw Error("internal: factored witness violates a constraint");
    for (const auto& prop : propagators)
        if (!prop->feasible(assignment))
            throw Error("internal: factored witness fails the row-DP check");
    return found(std::move(table));
}

/// Matrix refutation of 2-block-symmetric polymorphisms of arity 2k+1: all
/// columns lie in a relation of B, all rows agree blockwise as multisets, and
/// that relation has no constant tuple. Any 2-block-symmetric operation would
/// then send every row to one shared value, which no tuple supports.
inline bool block_collapse_certificate(const Structure& b, const std::vector<Tuple>& matrix,
                                       int first_block) {
    if (matrix.empty()) throw Error("block_collapse_certificate: empty matrix");
    const int r = static_cast<int>(matrix.size());
    const int width = static_cast<int>(matrix[0].size());
    if (width % 2 == 0 || first_block < 1 || first_block >= width)
        throw Error("block_collapse_certificate: bad shape or block split");
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != width)
            throw Error("block_collapse_certificate: ragged matrix");
        for (int v : row)
            if (v < 0 || v >= b.domain_size)
                throw Error("block_collapse_certificate: entry outside the domain");
    }
    auto block_profiles = [&](const Tuple& row) {
        Tuple b1(row.begin(), row.begin() + first_block);
        Tuple b2(row.begin() + first_block, row.end());
        std::sort(b1.begin(), b1.end());
        std::sort(b2.begin(), b2.end());
        return std::make_pair(b1, b2);
    };
    auto expected = block_profiles(matrix[0]);
    for (const auto& row : matrix)
        if (block_profiles(row) != expected) return false;

    for (const auto& rel : b.relations) {
        if (rel.arity != r) continue;
        bool columns_ok = true;
        for (int j = 0; j < width && columns_ok; ++j) {
            Tuple col(static_cast<std::size_t>(r));
            for (int i = 0; i < r; ++i)
                col[static_cast<std::size_t>(i)] = matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!rel.contains(col)) columns_ok = false;
        }
        if (!columns_ok) continue;
        bool has_constant = false;
        for (int v = 0; v < b.domain_size && !has_constant; ++v)
            if (rel.contains(Tuple(static_cast<std::size_t>(r), v))) has_constant = true;
        if (!has_constant) return true;
    }
    return false;
}

/// Collapse: from a block-symmetric table at arity 2kN+1 and a
/// balance witness with N columns, produce the alternating table
/// x -> g(kc, x + kc) at arity 2k+1, where c is the witness row profile.
inline FactoredTable collapse_transform(const FactoredTable& g, const Relation& rel,
                                        const BalanceWitness& witness, int k) {
    if (g.kind != FactoredKind::BlockSymmetric)
        throw Error("collapse_transform: input table must be block-symmetric");
    if (witness.counts.size() != rel.tuples.size())
        throw Error("collapse_transform: witness does not match the relation");
    const int a = g.source_domain;
    if (witness.total_columns > Int(1'000'000))
        throw Error("collapse_transform: witness too large");
    const int n_cols = static_cast<int>(witness.total_columns);
    if (g.k != k * n_cols)
        throw Error("collapse_transform: table arity does not match 2kN+1");

    // c: per-row value frequencies of the witness matrix; must be row-constant
    std::vector<FreqVec> row_freq(static_cast<std::size_t>(rel.arity),
                                  FreqVec(static_cast<std::size_t>(a), 0));
    for (std::size_t t = 0; t < rel.tuples.size(); ++t) {
        int c = static_cast<int>(witness.counts[t]);
        for (int i = 0; i < rel.arity; ++i)
            row_freq[static_cast<std::size_t>(i)]
                    [static_cast<std::size_t>(rel.tuples[t][static_cast<std::size_t>(i)])] += c;
    }
    for (const auto& f : row_freq)
        if (f != row_freq[0])
            throw Error("collapse_transform: witness rows are not constant (balancedness violated)");
    const FreqVec& c = row_freq[0];
    for (int v : c)
        if (v < 1) throw Error("collapse_transform: some element never occurs in the witness");

    FreqVec kc(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) kc[static_cast<std::size_t>(i)] = k * c[static_cast<std::size_t>(i)];

    FactoredTable out;
    out.kind = FactoredKind::Alternating;
    out.k = k;
    out.source_domain = a;
    out.target_domain = g.target_domain;
    out.alt_domain = enumerate_sk_difference(a, k);
    std::sort(out.alt_domain.begin(), out.alt_domain.end());
    for (const auto& x : out.alt_domain) {
        FreqVec shifted(static_cast<std::size_t>(a));
        for (int i = 0; i < a; ++i) {
            shifted[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + kc[static_cast<std::size_t>(i)];
            if (shifted[static_cast<std::size_t>(i)] < 0)
                throw Error("collapse_transform: shifted input left S_{kN+1}");
        }
        out.values.push_back(g.value_at_block(kc, shifted));
    }
    return out;
}

} // namespace pcsp
