#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcsp {

/// Thrown on contract violations: malformed inputs, signature mismatches,
/// unknown names. Resource exhaustion is reported via Outcome, not thrown.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caps for potentially explosive enumerations and searches. Hitting a cap
/// yields Outcome::Resource, never a silent negative answer.
struct Limits {
    std::uint64_t max_nodes = 10'000'000;     // backtracking nodes
    std::uint64_t max_enumeration = 50'000'000; // column/tuple combinations
    std::uint64_t max_set_size = 5'000'000;   // materialized set elements
    std::int64_t wall_ms = -1;                // <0: no wall-clock limit
};

enum class Outcome { Found, None, Resource };

template <class T>
struct SearchResult {
    Outcome outcome = Outcome::None;
    std::optional<T> value;
    std::string note; // cause of a Resource outcome

    bool found() const { return outcome == Outcome::Found; }
    const T& operator*() const { return *value; }
};

template <class T>
SearchResult<T> found(T v) {
    return SearchResult<T>{Outcome::Found, std::move(v), {}};
}
template <class T>
SearchResult<T> none() {
    return SearchResult<T>{Outcome::None, std::nullopt, {}};
}
template <class T>
SearchResult<T> resource(std::string note) {
    return SearchResult<T>{Outcome::Resource, std::nullopt, std::move(note)};
}

using Tuple = std::vector<int>;

inline std::string tuple_to_string(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

/// Enumerates t in [0,base)^len in lexicographic order; f may return false to stop.
template <class F>
bool for_each_tuple(int base, int len, F&& f) {
    Tuple t(static_cast<std::size_t>(len), 0);
    if (base <= 0 && len > 0) return true;
    while (true) {
        if (!f(static_cast<const Tuple&>(t))) return false;
        int i = len - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == base - 1) {
            t[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) return true;
        ++t[static_cast<std::size_t>(i)];
    }
}

} // namespace pcsp
