#pragma once

#include <string>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/structure.hpp"

namespace pcsp {

inline Structure catalog_one_in_three() {
    return Structure(2, {Relation("R", 3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})});
}

/// All r-tuples over {0,1} with exactly q ones.
inline Structure catalog_q_in_r(int q, int r) {
    if (r < 1 || q < 0 || q > r) throw Error("catalog: q_in_r needs 0 <= q <= r, r >= 1");
    std::vector<Tuple> tuples;
    for_each_tuple(2, r, [&](const Tuple& t) {
        int ones = 0;
        for (int v : t) ones += v;
        if (ones == q) tuples.push_back(t);
        return true;
    });
    return Structure(2, {Relation("R", r, std::move(tuples))});
}

inline Structure catalog_nae() {
    std::vector<Tuple> tuples;
    for_each_tuple(2, 3, [&](const Tuple& t) {
        if (!(t[0] == t[1] && t[1] == t[2])) tuples.push_back(t);
        return true;
    });
    return Structure(2, {Relation("R", 3, std::move(tuples))});
}

/// Ternary x + y + z == c (mod m).
inline Structure catalog_eqn(int m, int c) {
    if (m < 1) throw Error("catalog: eqn needs m >= 1");
    std::vector<Tuple> tuples;
    for_each_tuple(m, 3, [&](const Tuple& t) {
        if ((t[0] + t[1] + t[2]) % m == ((c % m) + m) % m) tuples.push_back(t);
        return true;
    });
    return Structure(m, {Relation("R", 3, std::move(tuples))});
}

/// Cyclic template: the symmetric closure of the cycle tuples (i,i,i+1) plus
/// every rainbow tuple of three distinct elements.
inline Structure catalog_cyclic_plus(int k) {
    if (k < 1) throw Error("catalog: cyclic_plus needs k >= 1");
    std::vector<Tuple> tuples;
    for (int i = 0; i < k; ++i) {
        int j = (i + 1) % k;
        tuples.push_back({i, i, j});
        tuples.push_back({i, j, i});
        tuples.push_back({j, i, i});
    }
    for_each_tuple(k, 3, [&](const Tuple& t) {
        if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) tuples.push_back(t);
        return true;
    });
    return Structure(k, {Relation("R", 3, std::move(tuples))});
}

/// Boolean, arity 6, x_1 + ... + x_6 odd.
inline Structure catalog_remark_4_4_a1() {
    std::vector<Tuple> tuples;
    for_each_tuple(2, 6, [&](const Tuple& t) {
        int s = 0;
        for (int v : t) s += v;
        if (s % 2 == 1) tuples.push_back(t);
        return true;
    });
    return Structure(2, {Relation("R", 6, std::move(tuples))});
}

/// Three elements, arity 6, x_1 + ... + x_6 == 2 (mod 3).
inline Structure catalog_remark_4_4_a2() {
    std::vector<Tuple> tuples;
    for_each_tuple(3, 6, [&](const Tuple& t) {
        int s = 0;
        for (int v : t) s += v;
        if (s % 3 == 2) tuples.push_back(t);
        return true;
    });
    return Structure(3, {Relation("R", 6, std::move(tuples))});
}

inline Structure catalog_remark_4_4() {
    return disjoint_union(catalog_remark_4_4_a1(), catalog_remark_4_4_a2());
}

inline Structure catalog_remark_5_1() {
    return Structure(2, {Relation("R", 1, {{0}}), Relation("Q", 2, {{0, 1}, {1, 0}, {1, 1}})});
}

inline Structure catalog_remark_5_2() {
    return Structure(2, {Relation("S", 3, {{0, 0, 1}, {0, 1, 0}, {0, 1, 1}})});
}

inline Structure catalog_remark_5_3() {
    return Structure(2, {Relation("P", 2, {{0, 1}})});
}

inline std::vector<std::string> catalog_keys() {
    return {"one_in_three", "q_in_r(q,r)",   "nae",           "eqn(m,c)",
            "cyclic_plus(k)", "remark_4_4",  "remark_4_4_a1", "remark_4_4_a2",
            "remark_5_1",   "remark_5_2",    "remark_5_3"};
}

/// Key with optional integer parameters: "eqn(3,1)", "cyclic_plus(4)", ...
inline Structure catalog_get(const std::string& key) {
    std::string name = key;
    std::vector<int> params;
    auto open = key.find('(');
    if (open != std::string::npos) {
        if (key.back() != ')') throw Error("catalog: malformed key " + key);
        name = key.substr(0, open);
        std::string inner = key.substr(open + 1, key.size() - open - 2);
        std::string cur;
        for (char ch : inner + ",") {
            if (ch == ',') {
                if (cur.empty()) throw Error("catalog: malformed parameters in " + key);
                try {
                    params.push_back(std::stoi(cur));
                } catch (const std::exception&) {
                    throw Error("catalog: non-integer parameter in " + key);
                }
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                cur += ch;
            }
        }
    }
    auto want = [&](std::size_t n) {
        if (params.size() != n)
            throw Error("catalog: " + name + " takes " + std::to_string(n) + " parameter(s)");
    };
    if (name == "one_in_three") { want(0); return catalog_one_in_three(); }
    if (name == "q_in_r") { want(2); return catalog_q_in_r(params[0], params[1]); }
    if (name == "nae") { want(0); return catalog_nae(); }
    if (name == "eqn") { want(2); return catalog_eqn(params[0], params[1]); }
    if (name == "cyclic_plus") { want(1); return catalog_cyclic_plus(params[0]); }
    if (name == "remark_4_4") { want(0); return catalog_remark_4_4(); }
    if (name == "remark_4_4_a1") { want(0); return catalog_remark_4_4_a1(); }
    if (name == "remark_4_4_a2") { want(0); return catalog_remark_4_4_a2(); }
    if (name == "remark_5_1") { want(0); return catalog_remark_5_1(); }
    if (name == "remark_5_2") { want(0); return catalog_remark_5_2(); }
    if (name == "remark_5_3") { want(0); return catalog_remark_5_3(); }
    throw Error("catalog: unknown key " + name);
}

} // namespace pcsp
