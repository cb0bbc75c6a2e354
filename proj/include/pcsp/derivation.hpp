#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pcsp/common.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

/// Triples with the last two elements equal or the first and last equal.
inline std::vector<Tuple> gamma(const Structure& a) {
    std::set<Tuple> out;
    for (int r = 0; r < a.domain_size; ++r)
        for (int s = 0; s < a.domain_size; ++s) {
            out.insert({r, s, s});
            out.insert({s, r, s});
        }
    return {out.begin(), out.end()};
}

/// All n-tuples over the domain using at most two distinct values.
inline std::vector<Tuple> delta(const Structure& a, int n) {
    if (n < 1) throw Error("delta: n must be >= 1");
    std::set<Tuple> out;
    for (int x = 0; x < a.domain_size; ++x)
        for (int y = x; y < a.domain_size; ++y) {
            Tuple t(static_cast<std::size_t>(n));
            for_each_tuple(2, n, [&](const Tuple& bits) {
                for (int i = 0; i < n; ++i)
                    t[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>(i)] ? y : x;
                out.insert(t);
                return true;
            });
        }
    return {out.begin(), out.end()};
}

struct DerivationContext {
    Structure structure;
    std::string relation;
    int tuple_length = 0;

    DerivationContext(Structure s, std::string rel, int n)
        : structure(std::move(s)), relation(std::move(rel)), tuple_length(n) {
        if (n < 1) throw Error("derivation context: tuple length must be >= 1");
        structure.relation(relation); // existence check
    }
};

/// Node of a derivation: a non-leaf holds the n matrix columns whose rows are
/// the node itself followed by its r-1 children.
struct ProofTree {
    Tuple tuple;
    std::vector<Tuple> columns;      // empty at leaves
    std::vector<ProofTree> children; // r-1 subtrees at non-leaves
};

namespace detail {

class DerivationEngine {
  public:
    DerivationEngine(const DerivationContext& ctx, Limits limits, bool record)
        : rel_(ctx.structure.relation(ctx.relation)), n_(ctx.tuple_length),
          limits_(limits), record_(record) {
        r_ = rel_.arity;
        packable_ = n_ <= 8 && ctx.structure.domain_size <= 255;
        if (packable_) packed_prefixes_.resize(static_cast<std::size_t>(n_) + 1);
    }

    // Least fixpoint of the premises under the matrix rule.
    Outcome saturate(const std::vector<Tuple>& premises) {
        for (const auto& t : premises) {
            if (static_cast<int>(t.size()) != n_)
                throw Error("derivable_set: premise length does not match context");
            insert(t);
        }
        if (rel_.tuples.empty()) return Outcome::Found;
        // upfront |R|^n guard
        double combos = 1;
        for (int j = 0; j < n_; ++j) combos *= static_cast<double>(rel_.tuples.size());
        if (combos > static_cast<double>(limits_.max_enumeration))
            return Outcome::Resource;
        rows_.assign(static_cast<std::size_t>(r_), Tuple(static_cast<std::size_t>(n_), 0));
        packed_rows_.assign(static_cast<std::size_t>(r_), 0);
        bool grew = true;
        while (grew) {
            grew = false;
            if (!enumerate(0, grew)) return Outcome::Resource;
        }
        return Outcome::Found;
    }

    const std::set<Tuple>& derived() const { return derived_; }

    bool contains(const Tuple& t) const { return derived_.count(t) > 0; }

    // First recorded derivation of t, unfolded into a tree with premise leaves.
    ProofTree tree_for(const Tuple& t, const std::set<Tuple>& premises) const {
        ProofTree node;
        node.tuple = t;
        if (premises.count(t)) return node;
        auto it = records_.find(t);
        if (it == records_.end()) throw Error("internal: no derivation record for tuple");
        node.columns = it->second.columns;
        for (const auto& child : it->second.children)
            node.children.push_back(tree_for(child, premises));
        return node;
    }

  private:
    struct Record {
        std::vector<Tuple> columns;
        std::vector<Tuple> children;
    };

    static std::uint64_t pack_coord(int value, int depth) {
        return static_cast<std::uint64_t>(value + 1) << (8 * depth);
    }

    void insert(const Tuple& t) {
        if (!derived_.insert(t).second) return;
        if (packable_) {
            std::uint64_t p = 0;
            for (int j = 0; j < n_; ++j) {
                p += pack_coord(t[static_cast<std::size_t>(j)], j);
                packed_prefixes_[static_cast<std::size_t>(j) + 1].insert(p);
            }
        }
    }

    bool has_prefix(const Tuple& row, std::uint64_t packed, int len) const {
        if (packable_)
            return packed_prefixes_[static_cast<std::size_t>(len)].count(packed) > 0;
        Tuple prefix(row.begin(), row.begin() + len);
        auto it = derived_.lower_bound(prefix);
        return it != derived_.end() &&
               std::equal(prefix.begin(), prefix.end(), it->begin());
    }

    // Chooses the matrix column at each depth; rows 2..r must stay prefixes of
    // derived tuples. A completed matrix derives its first row.
    bool enumerate(int depth, bool& grew) {
        if (depth == n_) {
            if (derived_.count(rows_[0])) return true;
            insert(rows_[0]);
            grew = true;
            if (record_) {
                Record rec;
                rec.columns = current_columns_;
                rec.children.assign(rows_.begin() + 1, rows_.end());
                records_.emplace(rows_[0], std::move(rec));
            }
            return true;
        }
        for (const auto& col : rel_.tuples) {
            if (++nodes_ > limits_.max_enumeration) return false;
            for (int i = 0; i < r_; ++i) {
                rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(depth)] =
                    col[static_cast<std::size_t>(i)];
                if (packable_)
                    packed_rows_[static_cast<std::size_t>(i)] +=
                        pack_coord(col[static_cast<std::size_t>(i)], depth);
            }
            bool viable = true;
            for (int i = 1; i < r_; ++i)
                if (!has_prefix(rows_[static_cast<std::size_t>(i)],
                                packed_rows_[static_cast<std::size_t>(i)], depth + 1)) {
                    viable = false;
                    break;
                }
            if (viable && record_) current_columns_.push_back(col);
            if (viable) {
                if (!enumerate(depth + 1, grew)) return false;
                if (record_) current_columns_.pop_back();
            }
            if (packable_)
                for (int i = 0; i < r_; ++i)
                    packed_rows_[static_cast<std::size_t>(i)] -=
                        pack_coord(col[static_cast<std::size_t>(i)], depth);
        }
        return true;
    }

    const Relation& rel_;
    int n_, r_;
    Limits limits_;
    bool record_;
    bool packable_;
    std::set<Tuple> derived_;
    std::vector<std::unordered_set<std::uint64_t>> packed_prefixes_;
    std::vector<Tuple> rows_;
    std::vector<std::uint64_t> packed_rows_;
    std::vector<Tuple> current_columns_;
    std::map<Tuple, Record> records_;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

/// Least set containing the premises and closed under the matrix rule:
/// whenever columns c_1..c_n from the context relation form a matrix whose
/// rows 2..r are all present, row 1 joins the set.
inline SearchResult<std::set<Tuple>> derivable_set(const DerivationContext& ctx,
                                                   const std::vector<Tuple>& premises,
                                                   Limits limits = {}) {
    detail::DerivationEngine engine(ctx, limits, /*record=*/false);
    Outcome out = engine.saturate(premises);
    if (out == Outcome::Resource)
        return resource<std::set<Tuple>>("rule-4 enumeration exceeded the cap");
    return found(std::set<Tuple>(engine.derived()));
}

/// Proof tree for `premises |- t`, when derivable.
inline SearchResult<ProofTree> derives(const DerivationContext& ctx,
                                       const std::vector<Tuple>& premises, const Tuple& t,
                                       Limits limits = {}) {
    if (static_cast<int>(t.size()) != ctx.tuple_length)
        throw Error("derives: target length does not match context");
    detail::DerivationEngine engine(ctx, limits, /*record=*/true);
    Outcome out = engine.saturate(premises);
    if (out == Outcome::Resource) return resource<ProofTree>("rule-4 enumeration exceeded the cap");
    if (!engine.contains(t)) return none<ProofTree>();
    std::set<Tuple> premise_set(premises.begin(), premises.end());
    return found(engine.tree_for(t, premise_set));
}

/// Independent re-validation of a proof tree against the matrix rule.
inline bool validate_proof_tree(const Structure& a, const std::string& relation,
                                const std::vector<Tuple>& premises, const ProofTree& tree) {
    const Relation& rel = a.relation(relation);
    std::set<Tuple> premise_set(premises.begin(), premises.end());
    const int n = static_cast<int>(tree.tuple.size());
    auto walk = [&](auto&& self, const ProofTree& node) -> bool {
        if (static_cast<int>(node.tuple.size()) != n) return false;
        if (node.children.empty()) return premise_set.count(node.tuple) > 0;
        if (static_cast<int>(node.children.size()) != rel.arity - 1) return false;
        if (static_cast<int>(node.columns.size()) != n) return false;
        for (int j = 0; j < n; ++j) {
            const Tuple& col = node.columns[static_cast<std::size_t>(j)];
            if (static_cast<int>(col.size()) != rel.arity) return false;
            if (!rel.contains(col)) return false;
            if (col[0] != node.tuple[static_cast<std::size_t>(j)]) return false;
            for (int i = 1; i < rel.arity; ++i)
                if (col[static_cast<std::size_t>(i)] !=
                    node.children[static_cast<std::size_t>(i - 1)].tuple[static_cast<std::size_t>(j)])
                    return false;
        }
        for (const auto& child : node.children)
            if (!self(self, child)) return false;
        return true;
    };
    return walk(walk, tree);
}

/// First relation (in declaration order) from which Gamma derives every
/// triple over the domain.
inline SearchResult<std::string> is_super_connected(const Structure& a, Limits limits = {}) {
    const auto premises = gamma(a);
    const std::uint64_t full = static_cast<std::uint64_t>(a.domain_size) * a.domain_size * a.domain_size;
    bool hit_resource = false;
    for (const auto& rel : a.relations) {
        DerivationContext ctx(a, rel.name, 3);
        auto result = derivable_set(ctx, premises, limits);
        if (result.outcome == Outcome::Resource) { hit_resource = true; continue; }
        if (result.value->size() == full) return found(std::string(rel.name));
    }
    if (hit_resource)
        return resource<std::string>("saturation exceeded the enumeration cap");
    return none<std::string>();
}

struct SufficiencyReport {
    std::optional<bool> additive_sufficient;  // nullopt: undecided (resource)
    std::optional<bool> dependent_sufficient;
};

/// Syntactic sufficient conditions: Gamma |- (p,p,q) for all p,q (additivity)
/// and Delta^a |- (0,...,a-1) (dependency), each via some relation.
inline SufficiencyReport check_sufficient_conditions(const Structure& a, Limits limits = {}) {
    SufficiencyReport rep;
    const auto gs = gamma(a);
    bool additive_resource = false, additive = false;
    for (const auto& rel : a.relations) {
        DerivationContext ctx(a, rel.name, 3);
        auto result = derivable_set(ctx, gs, limits);
        if (result.outcome == Outcome::Resource) { additive_resource = true; continue; }
        bool all = true;
        for (int p = 0; p < a.domain_size && all; ++p)
            for (int q = 0; q < a.domain_size && all; ++q)
                if (!result.value->count({p, p, q})) all = false;
        if (all) { additive = true; break; }
    }
    if (additive) rep.additive_sufficient = true;
    else if (!additive_resource) rep.additive_sufficient = false;

    if (a.domain_size >= 1) {
        Tuple target(static_cast<std::size_t>(a.domain_size));
        for (int i = 0; i < a.domain_size; ++i) target[static_cast<std::size_t>(i)] = i;
        const auto ds = delta(a, a.domain_size);
        bool dependent_resource = false, dependent = false;
        for (const auto& rel : a.relations) {
            DerivationContext ctx(a, rel.name, a.domain_size);
            auto result = derivable_set(ctx, ds, limits);
            if (result.outcome == Outcome::Resource) { dependent_resource = true; continue; }
            if (result.value->count(target)) { dependent = true; break; }
        }
        if (dependent) rep.dependent_sufficient = true;
        else if (!dependent_resource) rep.dependent_sufficient = false;
    }
    return rep;
}

inline nlohmann::json proof_tree_to_json(const ProofTree& tree) {
    nlohmann::json j;
    j["tuple"] = tree.tuple;
    if (!tree.children.empty()) {
        j["columns"] = tree.columns;
        j["children"] = nlohmann::json::array();
        for (const auto& c : tree.children) j["children"].push_back(proof_tree_to_json(c));
    }
    return j;
}

} // namespace pcsp
