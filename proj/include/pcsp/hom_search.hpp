#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

struct SearchConfig {
    std::uint64_t max_nodes = 10'000'000;
    std::int64_t wall_ms = -1; // <0 disables the wall clock limit
};

namespace detail {

struct HomConstraint {
    Tuple scope;              // X-elements, may repeat
    const Relation* target;   // corresponding relation of B
};

class HomSearcher {
  public:
    HomSearcher(const Structure& x, const Structure& b, SearchConfig cfg)
        : b_(b), cfg_(cfg), n_(x.domain_size) {
        domains_.assign(static_cast<std::size_t>(n_),
                        std::vector<char>(static_cast<std::size_t>(b.domain_size), 1));
        sizes_.assign(static_cast<std::size_t>(n_), b.domain_size);
        for (std::size_t ri = 0; ri < x.relations.size(); ++ri)
            for (const auto& t : x.relations[ri].tuples)
                constraints_.push_back({t, &b.relations[ri]});
        watchers_.assign(static_cast<std::size_t>(n_), {});
        for (std::size_t ci = 0; ci < constraints_.size(); ++ci)
            for (int v : constraints_[ci].scope)
                watchers_[static_cast<std::size_t>(v)].push_back(ci);
        start_ = std::chrono::steady_clock::now();
    }

    SearchResult<Homomorphism> run() {
        if (b_.domain_size == 0)
            return n_ == 0 ? found(Homomorphism{}) : none<Homomorphism>();
        if (!propagate_all()) return none<Homomorphism>();
        Outcome out = Outcome::None;
        Homomorphism h;
        if (!search(out, h)) return resource<Homomorphism>(note_);
        if (out == Outcome::Found) return found(std::move(h));
        return none<Homomorphism>();
    }

  private:
    // Generalized arc consistency for one constraint: a value is supported if
    // some target tuple matches it, respects current domains, and agrees on
    // repeated scope variables.
    bool revise(std::size_t ci, std::vector<char>& dirty) {
        const auto& c = constraints_[ci];
        const int r = static_cast<int>(c.scope.size());
        for (int pos = 0; pos < r; ++pos) {
            int var = c.scope[static_cast<std::size_t>(pos)];
            auto& dom = domains_[static_cast<std::size_t>(var)];
            for (int val = 0; val < b_.domain_size; ++val) {
                if (!dom[static_cast<std::size_t>(val)]) continue;
                bool supported = false;
                for (const auto& bt : c.target->tuples) {
                    if (bt[static_cast<std::size_t>(pos)] != val) continue;
                    bool ok = true;
                    for (int j = 0; j < r && ok; ++j) {
                        int vj = c.scope[static_cast<std::size_t>(j)];
                        int bj = bt[static_cast<std::size_t>(j)];
                        if (!domains_[static_cast<std::size_t>(vj)][static_cast<std::size_t>(bj)])
                            ok = false;
                        for (int j2 = j + 1; j2 < r && ok; ++j2)
                            if (c.scope[static_cast<std::size_t>(j2)] == vj &&
                                bt[static_cast<std::size_t>(j2)] != bj)
                                ok = false;
                    }
                    if (ok) { supported = true; break; }
                }
                if (!supported) {
                    dom[static_cast<std::size_t>(val)] = 0;
                    if (--sizes_[static_cast<std::size_t>(var)] == 0) return false;
                    trail_.push_back({var, val});
                    dirty[static_cast<std::size_t>(var)] = 1;
                }
            }
        }
        return true;
    }

    bool propagate_all() {
        std::vector<char> in_queue(constraints_.size(), 1);
        std::vector<std::size_t> queue(constraints_.size());
        for (std::size_t i = 0; i < constraints_.size(); ++i) queue[i] = i;
        return fixpoint(queue, in_queue);
    }

    bool propagate_from(int var) {
        std::vector<char> in_queue(constraints_.size(), 0);
        std::vector<std::size_t> queue;
        for (std::size_t ci : watchers_[static_cast<std::size_t>(var)]) {
            if (!in_queue[ci]) { in_queue[ci] = 1; queue.push_back(ci); }
        }
        return fixpoint(queue, in_queue);
    }

    bool fixpoint(std::vector<std::size_t>& queue, std::vector<char>& in_queue) {
        std::vector<char> dirty(static_cast<std::size_t>(n_), 0);
        while (!queue.empty()) {
            std::size_t ci = queue.back();
            queue.pop_back();
            in_queue[ci] = 0;
            std::fill(dirty.begin(), dirty.end(), 0);
            if (!revise(ci, dirty)) return false;
            for (int v = 0; v < n_; ++v) {
                if (!dirty[static_cast<std::size_t>(v)]) continue;
                for (std::size_t cj : watchers_[static_cast<std::size_t>(v)])
                    if (!in_queue[cj]) { in_queue[cj] = 1; queue.push_back(cj); }
            }
        }
        return true;
    }

    bool over_budget() {
        if (nodes_ > cfg_.max_nodes) {
            note_ = "node limit exceeded (" + std::to_string(cfg_.max_nodes) + ")";
            return true;
        }
        if (cfg_.wall_ms >= 0 && (nodes_ & 0x3ff) == 0) {
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start_).count();
            if (ms > cfg_.wall_ms) {
                note_ = "wall clock limit exceeded (" + std::to_string(cfg_.wall_ms) + " ms)";
                return true;
            }
        }
        return false;
    }

    // Returns false on resource exhaustion; otherwise sets out/h.
    bool search(Outcome& out, Homomorphism& h) {
        int var = -1, best = b_.domain_size + 1;
        for (int v = 0; v < n_; ++v)
            if (sizes_[static_cast<std::size_t>(v)] > 1 &&
                sizes_[static_cast<std::size_t>(v)] < best) {
                best = sizes_[static_cast<std::size_t>(v)];
                var = v;
            }
        if (var < 0) { // every domain is a singleton
            h.mapping.assign(static_cast<std::size_t>(n_), 0);
            for (int v = 0; v < n_; ++v)
                for (int val = 0; val < b_.domain_size; ++val)
                    if (domains_[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)]) {
                        h.mapping[static_cast<std::size_t>(v)] = val;
                        break;
                    }
            out = Outcome::Found;
            return true;
        }
        for (int val = 0; val < b_.domain_size; ++val) {
            if (!domains_[static_cast<std::size_t>(var)][static_cast<std::size_t>(val)]) continue;
            ++nodes_;
            if (over_budget()) return false;
            std::size_t mark = trail_.size();
            for (int other = 0; other < b_.domain_size; ++other)
                if (other != val &&
                    domains_[static_cast<std::size_t>(var)][static_cast<std::size_t>(other)]) {
                    domains_[static_cast<std::size_t>(var)][static_cast<std::size_t>(other)] = 0;
                    --sizes_[static_cast<std::size_t>(var)];
                    trail_.push_back({var, other});
                }
            if (propagate_from(var)) {
                if (!search(out, h)) return false;
                if (out == Outcome::Found) return true;
            }
            undo_to(mark);
        }
        out = Outcome::None;
        return true;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            auto [var, val] = trail_.back();
            trail_.pop_back();
            if (!domains_[static_cast<std::size_t>(var)][static_cast<std::size_t>(val)]) {
                domains_[static_cast<std::size_t>(var)][static_cast<std::size_t>(val)] = 1;
                ++sizes_[static_cast<std::size_t>(var)];
            }
        }
    }

    const Structure& b_;
    SearchConfig cfg_;
    int n_;
    std::vector<detail::HomConstraint> constraints_;
    std::vector<std::vector<std::size_t>> watchers_;
    std::vector<std::vector<char>> domains_;
    std::vector<int> sizes_;
    std::vector<std::pair<int, int>> trail_;
    std::uint64_t nodes_ = 0;
    std::string note_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Complete backtracking search with arc-consistency propagation.
/// Deterministic: variables by (candidate-set size, index), values by index.
/// Resource exhaustion is a distinct outcome, never reported as "none exists".
inline SearchResult<Homomorphism> find_homomorphism(const Structure& x, const Structure& b,
                                                    SearchConfig cfg = {}) {
    require_similar(x, b);
    detail::HomSearcher searcher(x, b, cfg);
    auto result = searcher.run();
    if (result.found() && !is_homomorphism(*result.value, x, b))
        throw Error("internal: search produced an invalid homomorphism");
    return result;
}

} // namespace pcsp
