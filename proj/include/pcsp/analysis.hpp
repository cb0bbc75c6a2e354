#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/linear.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

struct SymmetryReport {
    bool symmetric = true;
    std::string relation;   // witness on failure
    Tuple tuple;            // present tuple
    Tuple missing;          // absent permutation of it
};

inline SymmetryReport is_symmetric(const Structure& s) {
    for (const auto& r : s.relations) {
        for (const auto& t : r.tuples) {
            Tuple perm = t;
            std::sort(perm.begin(), perm.end());
            do {
                if (!r.contains(perm)) return {false, r.name, t, perm};
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
    return {};
}

struct FunctionalityReport {
    bool functional = true;
    std::string relation;
    int position = -1;      // coordinate not determined by the others
    Tuple tuple_a, tuple_b; // colliding pair
};

/// Fixing any r-1 coordinates of a tuple determines the remaining one.
inline FunctionalityReport is_functional(const Structure& s) {
    for (const auto& r : s.relations) {
        for (int pos = 0; pos < r.arity; ++pos) {
            std::map<Tuple, const Tuple*> seen;
            for (const auto& t : r.tuples) {
                Tuple key;
                key.reserve(t.size() - 1);
                for (int i = 0; i < r.arity; ++i)
                    if (i != pos) key.push_back(t[static_cast<std::size_t>(i)]);
                auto [it, inserted] = seen.emplace(std::move(key), &t);
                if (!inserted) return {false, r.name, pos, *it->second, t};
            }
        }
    }
    return {};
}

struct HypergraphMetrics {
    static constexpr int infinity = -1;
    std::vector<std::vector<int>> distances; // -1 encodes an infinite distance
    int diameter = 0;                        // -1 when infinite
    bool connected = true;
};

/// BFS distances where two elements are adjacent iff they co-occur in some
/// tuple of the named relation.
inline HypergraphMetrics hypergraph_metrics(const Structure& s, const std::string& relation) {
    const Relation& r = s.relation(relation);
    const int n = s.domain_size;
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    for (const auto& t : r.tuples)
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j)
                if (t[i] != t[j]) adj[static_cast<std::size_t>(t[i])].insert(t[j]);
    HypergraphMetrics m;
    m.distances.assign(static_cast<std::size_t>(n),
                       std::vector<int>(static_cast<std::size_t>(n), HypergraphMetrics::infinity));
    for (int src = 0; src < n; ++src) {
        auto& dist = m.distances[static_cast<std::size_t>(src)];
        dist[static_cast<std::size_t>(src)] = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[static_cast<std::size_t>(u)])
                if (dist[static_cast<std::size_t>(v)] == HypergraphMetrics::infinity) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
        }
    }
    for (int i = 0; i < n && m.diameter != HypergraphMetrics::infinity; ++i)
        for (int j = 0; j < n; ++j) {
            int d = m.distances[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (d == HypergraphMetrics::infinity) {
                m.diameter = HypergraphMetrics::infinity;
                m.connected = false;
                break;
            }
            m.diameter = std::max(m.diameter, d);
        }
    return m;
}

struct BalanceWitness {
    std::vector<Int> counts;              // per relation tuple, all >= 1
    std::vector<std::vector<int>> matrix; // r x N expansion; empty when N exceeds the cap
    Int total_columns = 0;                // N
};

/// Positive integer column multiplicities making all row frequency vectors
/// equal. Decided by exact rational feasibility with counts >= 1; the system
/// is homogeneous, so clearing denominators yields the integer witness.
inline std::optional<BalanceWitness> is_balanced(const Relation& r,
                                                 const Int& matrix_cap = Int(4096)) {
    if (r.tuples.empty()) throw Error("is_balanced: empty relation");
    const int ntup = static_cast<int>(r.tuples.size());
    std::set<int> values;
    for (const auto& t : r.tuples) values.insert(t.begin(), t.end());

    // counts c = 1 + d with d >= 0; rows: per position j>0 and value v,
    // sum_{t: t_0=v} c_t - sum_{t: t_j=v} c_t = 0
    LinearSystem sys;
    for (int t = 0; t < ntup; ++t) sys.add_var("d" + std::to_string(t), true);
    for (int pos = 1; pos < r.arity; ++pos) {
        for (int v : values) {
            std::vector<Int> row(static_cast<std::size_t>(ntup), Int(0));
            Int rhs = 0;
            for (int t = 0; t < ntup; ++t) {
                const Tuple& tup = r.tuples[static_cast<std::size_t>(t)];
                Int coeff = 0;
                if (tup[0] == v) coeff += 1;
                if (tup[static_cast<std::size_t>(pos)] == v) coeff -= 1;
                if (coeff != 0) {
                    row[static_cast<std::size_t>(t)] = coeff;
                    rhs -= coeff; // from the +1 shift of every count
                }
            }
            sys.add_row(std::move(row), std::move(rhs));
        }
    }
    auto point = lp_feasible(sys);
    if (!point) return std::nullopt;

    std::vector<Rat> counts_q(static_cast<std::size_t>(ntup));
    for (int t = 0; t < ntup; ++t) counts_q[static_cast<std::size_t>(t)] = (*point)[static_cast<std::size_t>(t)] + 1;
    Int scale = common_denominator(counts_q);
    BalanceWitness w;
    w.counts.reserve(static_cast<std::size_t>(ntup));
    for (const auto& q : counts_q) {
        Int c = rat_num(q) * (scale / rat_den(q));
        w.total_columns += c;
        w.counts.push_back(std::move(c));
    }
    if (w.total_columns <= matrix_cap) {
        for (int i = 0; i < r.arity; ++i) {
            std::vector<int> row;
            for (int t = 0; t < ntup; ++t) {
                Int c = w.counts[static_cast<std::size_t>(t)];
                for (Int k = 0; k < c; ++k)
                    row.push_back(r.tuples[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]);
            }
            w.matrix.push_back(std::move(row));
        }
        // rows must be permutations of each other
        std::vector<int> first = w.matrix[0];
        std::sort(first.begin(), first.end());
        for (const auto& row : w.matrix) {
            std::vector<int> sorted = row;
            std::sort(sorted.begin(), sorted.end());
            if (sorted != first) throw Error("internal: balance witness rows differ");
        }
    }
    return w;
}

/// Appendix criterion for digraphs: balanced iff no edge crosses strongly
/// connected components (vertices outside the relation are ignored).
inline bool digraph_balanced_via_scc(const Relation& r) {
    if (r.arity != 2) throw Error("digraph_balanced_via_scc: relation arity must be 2");
    std::set<int> verts;
    for (const auto& t : r.tuples) { verts.insert(t[0]); verts.insert(t[1]); }
    std::map<int, std::vector<int>> adj;
    for (const auto& t : r.tuples) adj[t[0]].push_back(t[1]);
    // iterative Tarjan
    std::map<int, int> index, low, comp;
    std::vector<int> stack;
    std::set<int> on_stack;
    int counter = 0, ncomp = 0;
    for (int start : verts) {
        if (index.count(start)) continue;
        std::vector<std::pair<int, std::size_t>> call{{start, 0}};
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack.insert(v);
            }
            bool descended = false;
            auto it = adj.find(v);
            std::size_t deg = it == adj.end() ? 0 : it->second.size();
            while (pos < deg) {
                int w = it->second[pos++];
                if (!index.count(w)) {
                    call.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack.count(w)) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack.erase(w);
                    comp[w] = ncomp;
                    if (w == v) break;
                }
                ++ncomp;
            }
            int child = v;
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().first;
                low[parent] = std::min(low[parent], low[child]);
            }
        }
    }
    for (const auto& t : r.tuples)
        if (comp[t[0]] != comp[t[1]]) return false;
    return true;
}

struct PermutationGroupProbe {
    std::vector<Tuple> generators;
    std::vector<Tuple> closure;    // sorted, includes identity
    bool transitive = false;
    bool preserved = false;        // every tuple image stays in the relation
};

inline Tuple compose_perm(const Tuple& p, const Tuple& q) { // (p.q)[i] = p[q[i]]
    Tuple out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = p[static_cast<std::size_t>(q[i])];
    return out;
}

inline std::vector<Tuple> symmetric_group_generators(int degree) {
    std::vector<Tuple> gens;
    for (int i = 0; i + 1 < degree; ++i) {
        Tuple p(static_cast<std::size_t>(degree));
        std::iota(p.begin(), p.end(), 0);
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i + 1)]);
        gens.push_back(std::move(p));
    }
    return gens;
}

inline std::vector<Tuple> cyclic_shift_generators(int degree) {
    Tuple p(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) p[static_cast<std::size_t>(i)] = (i + 1) % degree;
    return {p};
}

inline PermutationGroupProbe transitive_group_preserves(const Relation& r,
                                                        const std::vector<Tuple>& generators,
                                                        std::uint64_t closure_cap = 1'000'000) {
    const int degree = r.arity;
    for (const auto& g : generators) {
        if (static_cast<int>(g.size()) != degree)
            throw Error("transitive_group_preserves: permutation degree mismatch");
        Tuple sorted = g;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < degree; ++i)
            if (sorted[static_cast<std::size_t>(i)] != i)
                throw Error("transitive_group_preserves: not a permutation of [arity]");
    }
    PermutationGroupProbe probe;
    probe.generators = generators;
    Tuple identity(static_cast<std::size_t>(degree));
    std::iota(identity.begin(), identity.end(), 0);
    std::set<Tuple> closure{identity};
    std::deque<Tuple> queue{identity};
    while (!queue.empty()) {
        Tuple cur = queue.front();
        queue.pop_front();
        for (const auto& g : generators) {
            Tuple next = compose_perm(cur, g);
            if (closure.insert(next).second) {
                if (closure.size() > closure_cap)
                    throw Error("transitive_group_preserves: closure cap exceeded");
                queue.push_back(std::move(next));
            }
        }
    }
    probe.closure.assign(closure.begin(), closure.end());
    std::set<int> orbit;
    for (const auto& p : probe.closure) orbit.insert(p[0]);
    probe.transitive = static_cast<int>(orbit.size()) == degree;
    probe.preserved = true;
    for (const auto& p : probe.closure) {
        for (const auto& t : r.tuples) {
            Tuple img(static_cast<std::size_t>(degree));
            for (int i = 0; i < degree; ++i)
                img[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
            if (!r.contains(img)) { probe.preserved = false; break; }
        }
        if (!probe.preserved) break;
    }
    return probe;
}

} // namespace pcsp
