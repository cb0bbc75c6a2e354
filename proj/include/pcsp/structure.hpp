#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pcsp/common.hpp"

namespace pcsp {

/// A named relation: sorted, duplicate-free tuples over domain indices.
struct Relation {
    std::string name;
    int arity = 0;
    std::vector<Tuple> tuples;

    Relation() = default;
    Relation(std::string name_, int arity_, std::vector<Tuple> tuples_)
        : name(std::move(name_)), arity(arity_), tuples(std::move(tuples_)) {
        normalize();
    }

    void normalize() {
        std::sort(tuples.begin(), tuples.end());
        tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    }

    bool contains(const Tuple& t) const {
        return std::binary_search(tuples.begin(), tuples.end(), t);
    }

    bool operator==(const Relation&) const = default;
};

/// Order-sensitive (name, arity) list; equal descriptors mean similar structures.
using SignatureDescriptor = std::vector<std::pair<std::string, int>>;

/// Finite relational structure. Domain elements are 0-based indices with
/// optional labels. Doubles as template side and instance.
struct Structure {
    int domain_size = 0;
    std::vector<std::string> element_labels; // size == domain_size
    std::vector<Relation> relations;

    Structure() = default;
    Structure(int a, std::vector<Relation> rels)
        : domain_size(a), relations(std::move(rels)) {
        element_labels.reserve(static_cast<std::size_t>(a));
        for (int i = 0; i < a; ++i) element_labels.push_back(std::to_string(i));
        validate();
    }
    Structure(std::vector<std::string> labels, std::vector<Relation> rels)
        : domain_size(static_cast<int>(labels.size())),
          element_labels(std::move(labels)),
          relations(std::move(rels)) {
        validate();
    }

    SignatureDescriptor signature() const {
        SignatureDescriptor sig;
        sig.reserve(relations.size());
        for (const auto& r : relations) sig.emplace_back(r.name, r.arity);
        return sig;
    }

    const Relation& relation(const std::string& name) const {
        for (const auto& r : relations)
            if (r.name == name) return r;
        throw Error("unknown relation name: " + name);
    }

    void validate() const {
        if (domain_size < 0) throw Error("negative domain size");
        if (static_cast<int>(element_labels.size()) != domain_size)
            throw Error("label count does not match domain size");
        std::set<std::string> names;
        for (const auto& r : relations) {
            if (r.arity < 1)
                throw Error("relation " + r.name + ": arity must be >= 1");
            if (!names.insert(r.name).second)
                throw Error("duplicate relation name: " + r.name);
            for (const auto& t : r.tuples) {
                if (static_cast<int>(t.size()) != r.arity)
                    throw Error("relation " + r.name + ": tuple " +
                                tuple_to_string(t) + " does not match arity " +
                                std::to_string(r.arity));
                for (int x : t)
                    if (x < 0 || x >= domain_size)
                        throw Error("relation " + r.name + ": entry " +
                                    std::to_string(x) + " in tuple " +
                                    tuple_to_string(t) + " outside domain [0," +
                                    std::to_string(domain_size) + ")");
            }
        }
    }

    bool operator==(const Structure&) const = default;
};

inline bool similar(const Structure& s1, const Structure& s2) {
    return s1.signature() == s2.signature();
}

inline void require_similar(const Structure& s1, const Structure& s2) {
    if (!similar(s1, s2)) throw Error("structures are not similar (signature mismatch)");
}

/// Map from a source domain to a target domain, indexed by source element.
struct Homomorphism {
    std::vector<int> mapping;

    int operator()(int x) const { return mapping.at(static_cast<std::size_t>(x)); }
    bool operator==(const Homomorphism&) const = default;
};

inline Homomorphism compose(const Homomorphism& inner, const Homomorphism& outer) {
    Homomorphism h;
    h.mapping.reserve(inner.mapping.size());
    for (int x : inner.mapping) h.mapping.push_back(outer.mapping.at(static_cast<std::size_t>(x)));
    return h;
}

inline bool is_homomorphism(const Homomorphism& h, const Structure& from, const Structure& to) {
    require_similar(from, to);
    if (static_cast<int>(h.mapping.size()) != from.domain_size)
        throw Error("homomorphism length does not match source domain");
    for (int y : h.mapping)
        if (y < 0 || y >= to.domain_size) throw Error("homomorphism image outside target domain");
    for (std::size_t ri = 0; ri < from.relations.size(); ++ri) {
        const Relation& rf = from.relations[ri];
        const Relation& rt = to.relations[ri];
        Tuple img(static_cast<std::size_t>(rf.arity));
        for (const auto& t : rf.tuples) {
            for (std::size_t i = 0; i < t.size(); ++i)
                img[i] = h.mapping[static_cast<std::size_t>(t[i])];
            if (!rt.contains(img)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Structure algebra

/// Componentwise product: domain S1 x S2 (row-major), a tuple belongs to the
/// product iff both projections belong to the factors.
inline Structure product(const Structure& s1, const Structure& s2) {
    require_similar(s1, s2);
    const int a1 = s1.domain_size, a2 = s2.domain_size;
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(a1 * a2));
    for (int x = 0; x < a1; ++x)
        for (int y = 0; y < a2; ++y)
            labels.push_back("(" + s1.element_labels[static_cast<std::size_t>(x)] + "," +
                             s2.element_labels[static_cast<std::size_t>(y)] + ")");
    std::vector<Relation> rels;
    for (std::size_t ri = 0; ri < s1.relations.size(); ++ri) {
        const Relation& r1 = s1.relations[ri];
        const Relation& r2 = s2.relations[ri];
        std::vector<Tuple> tuples;
        tuples.reserve(r1.tuples.size() * r2.tuples.size());
        for (const auto& t1 : r1.tuples)
            for (const auto& t2 : r2.tuples) {
                Tuple t(static_cast<std::size_t>(r1.arity));
                for (int i = 0; i < r1.arity; ++i)
                    t[static_cast<std::size_t>(i)] =
                        t1[static_cast<std::size_t>(i)] * a2 + t2[static_cast<std::size_t>(i)];
                tuples.push_back(std::move(t));
            }
        rels.emplace_back(r1.name, r1.arity, std::move(tuples));
    }
    return Structure(std::move(labels), std::move(rels));
}

/// Projections of a product back onto its factors, as homomorphisms.
inline std::pair<Homomorphism, Homomorphism> product_projections(const Structure& s1,
                                                                 const Structure& s2) {
    Homomorphism p1, p2;
    for (int x = 0; x < s1.domain_size; ++x)
        for (int y = 0; y < s2.domain_size; ++y) {
            p1.mapping.push_back(x);
            p2.mapping.push_back(y);
        }
    return {p1, p2};
}

/// Disjoint union: domains concatenated, relations unioned with offset.
inline Structure disjoint_union(const Structure& s1, const Structure& s2) {
    require_similar(s1, s2);
    std::vector<std::string> labels = s1.element_labels;
    for (const auto& l : s2.element_labels) labels.push_back(l + "'");
    const int off = s1.domain_size;
    std::vector<Relation> rels;
    for (std::size_t ri = 0; ri < s1.relations.size(); ++ri) {
        std::vector<Tuple> tuples = s1.relations[ri].tuples;
        for (Tuple t : s2.relations[ri].tuples) {
            for (int& x : t) x += off;
            tuples.push_back(std::move(t));
        }
        rels.emplace_back(s1.relations[ri].name, s1.relations[ri].arity, std::move(tuples));
    }
    return Structure(std::move(labels), std::move(rels));
}

struct ComponentSplit {
    std::vector<Structure> components;
    // index_maps[c][i] = domain index in the original structure of element i of component c
    std::vector<std::vector<int>> index_maps;
};

/// Partition by connectivity of the union of all relation hypergraphs;
/// components ordered by their least original element.
inline ComponentSplit connected_components(const Structure& s) {
    std::vector<int> parent(static_cast<std::size_t>(s.domain_size));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int x, int y) {
        x = find(x); y = find(y);
        if (x > y) std::swap(x, y);
        parent[static_cast<std::size_t>(y)] = x; // keep least element as root
    };
    for (const auto& r : s.relations)
        for (const auto& t : r.tuples)
            for (std::size_t i = 1; i < t.size(); ++i) unite(t[0], t[i]);

    std::map<int, int> root_to_comp;
    ComponentSplit out;
    for (int x = 0; x < s.domain_size; ++x) {
        int r = find(x);
        auto [it, inserted] = root_to_comp.emplace(r, static_cast<int>(out.index_maps.size()));
        if (inserted) out.index_maps.emplace_back();
        out.index_maps[static_cast<std::size_t>(it->second)].push_back(x);
    }
    std::vector<int> comp_of(static_cast<std::size_t>(s.domain_size));
    std::vector<int> local_of(static_cast<std::size_t>(s.domain_size));
    for (std::size_t c = 0; c < out.index_maps.size(); ++c)
        for (std::size_t i = 0; i < out.index_maps[c].size(); ++i) {
            comp_of[static_cast<std::size_t>(out.index_maps[c][i])] = static_cast<int>(c);
            local_of[static_cast<std::size_t>(out.index_maps[c][i])] = static_cast<int>(i);
        }
    for (std::size_t c = 0; c < out.index_maps.size(); ++c) {
        std::vector<std::string> labels;
        for (int x : out.index_maps[c]) labels.push_back(s.element_labels[static_cast<std::size_t>(x)]);
        std::vector<Relation> rels;
        for (const auto& r : s.relations) {
            std::vector<Tuple> tuples;
            for (const auto& t : r.tuples) {
                if (comp_of[static_cast<std::size_t>(t[0])] != static_cast<int>(c)) continue;
                Tuple u(t.size());
                for (std::size_t i = 0; i < t.size(); ++i)
                    u[i] = local_of[static_cast<std::size_t>(t[i])];
                tuples.push_back(std::move(u));
            }
            rels.emplace_back(r.name, r.arity, std::move(tuples));
        }
        out.components.emplace_back(std::move(labels), std::move(rels));
    }
    return out;
}

/// Same domain; each relation keeps exactly the tuples all of whose
/// coordinate permutations are present.
inline Structure largest_symmetric_substructure(const Structure& s) {
    std::vector<Relation> rels;
    for (const auto& r : s.relations) {
        std::vector<Tuple> kept;
        for (const auto& t : r.tuples) {
            Tuple perm = t;
            std::sort(perm.begin(), perm.end());
            bool all_present = true;
            do {
                if (!r.contains(perm)) { all_present = false; break; }
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (all_present) kept.push_back(t);
        }
        rels.emplace_back(r.name, r.arity, std::move(kept));
    }
    return Structure(std::vector<std::string>(s.element_labels), std::move(rels));
}

// ---------------------------------------------------------------------------
// Canonical JSON serialization.
// Schema: {"domain": ["<label>", ...],
//          "relations": [{"name": "R", "arity": 3, "tuples": [[0,0,1], ...]}]}
// Canonical form: object keys sorted, tuples sorted lexicographically,
// compact whitespace. Serializing a parsed canonical document is byte-identical.

inline nlohmann::json structure_to_json(const Structure& s) {
    nlohmann::json j;
    j["domain"] = s.element_labels;
    j["relations"] = nlohmann::json::array();
    for (const auto& r : s.relations) {
        nlohmann::json jr;
        jr["name"] = r.name;
        jr["arity"] = r.arity;
        jr["tuples"] = r.tuples;
        j["relations"].push_back(std::move(jr));
    }
    return j;
}

inline std::string serialize_structure(const Structure& s) {
    return structure_to_json(s).dump();
}

inline Structure structure_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("structure document: expected a JSON object");
    if (!j.contains("domain") || !j["domain"].is_array())
        throw Error("structure document: missing or non-array field \"domain\"");
    std::vector<std::string> labels;
    for (const auto& l : j["domain"]) {
        if (!l.is_string()) throw Error("structure document: \"domain\" entries must be strings");
        labels.push_back(l.get<std::string>());
    }
    std::vector<Relation> rels;
    if (j.contains("relations")) {
        if (!j["relations"].is_array())
            throw Error("structure document: field \"relations\" must be an array");
        for (const auto& jr : j["relations"]) {
            if (!jr.is_object() || !jr.contains("name") || !jr.contains("arity") ||
                !jr.contains("tuples"))
                throw Error("structure document: each relation needs \"name\", \"arity\", \"tuples\"");
            if (!jr["name"].is_string() || !jr["arity"].is_number_integer() ||
                !jr["tuples"].is_array())
                throw Error("structure document: relation field types invalid (relation \"" +
                            (jr.contains("name") && jr["name"].is_string()
                                 ? jr["name"].get<std::string>()
                                 : std::string("?")) +
                            "\")");
            std::vector<Tuple> tuples;
            for (const auto& jt : jr["tuples"]) {
                if (!jt.is_array())
                    throw Error("structure document: relation \"" + jr["name"].get<std::string>() +
                                "\": tuples must be arrays");
                Tuple t;
                for (const auto& x : jt) {
                    if (!x.is_number_integer())
                        throw Error("structure document: relation \"" +
                                    jr["name"].get<std::string>() +
                                    "\": tuple entries must be integers");
                    t.push_back(x.get<int>());
                }
                tuples.push_back(std::move(t));
            }
            rels.emplace_back(jr["name"].get<std::string>(), jr["arity"].get<int>(),
                              std::move(tuples));
        }
    }
    return Structure(std::move(labels), std::move(rels)); // validates ranges and names
}

inline Structure parse_structure(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("structure document: ") + e.what());
    }
    return structure_from_json(j);
}

} // namespace pcsp
