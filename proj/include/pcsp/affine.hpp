#pragma once

#include <string>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/polymorphism.hpp"
#include "pcsp/structure.hpp"
#include "pcsp/zmodule.hpp"

namespace pcsp {

/// Affine subgroup descriptor of a relation over Z_m^a: base point plus a
/// canonical basis of the difference subgroup.
struct CosetDescriptor {
    std::vector<int> base_point; // flat r*a vector
    ZmBasis basis;

    bool contains(const std::vector<int>& v) const {
        std::vector<int> diff(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - base_point[i];
        return basis.contains(diff);
    }
};

/// The free structure over Z_m: domain Z_m^a (row-major index, first
/// coordinate most significant), one coset descriptor per source relation.
struct AffineStructure {
    int m = 1;
    Structure base;
    std::vector<CosetDescriptor> cosets; // aligned with base.relations
    std::vector<char> empty_relation;

    int domain_size() const {
        int size = 1;
        for (int i = 0; i < base.domain_size; ++i) size *= m;
        return size;
    }

    std::vector<int> unindex_vector(int idx) const {
        std::vector<int> v(static_cast<std::size_t>(base.domain_size));
        for (int i = base.domain_size - 1; i >= 0; --i) {
            v[static_cast<std::size_t>(i)] = idx % m;
            idx /= m;
        }
        return v;
    }

    int index_vector(const std::vector<int>& v) const {
        int idx = 0;
        for (int x : v) idx = idx * m + (((x % m) + m) % m);
        return idx;
    }
};

inline AffineStructure build_affine_structure(const Structure& a, int m) {
    if (m < 1) throw Error("build_affine_structure: m must be >= 1");
    AffineStructure out;
    out.m = m;
    out.base = a;
    const int ad = a.domain_size;
    for (const auto& rel : a.relations) {
        CosetDescriptor coset;
        if (rel.tuples.empty()) {
            out.empty_relation.push_back(1);
            out.cosets.push_back(std::move(coset));
            continue;
        }
        out.empty_relation.push_back(0);
        const int dim = ad * rel.arity;
        auto embed = [&](const Tuple& t) {
            std::vector<int> v(static_cast<std::size_t>(dim), 0);
            for (std::size_t i = 0; i < t.size(); ++i)
                v[i * static_cast<std::size_t>(ad) + static_cast<std::size_t>(t[i])] = 1 % m;
            return v;
        };
        coset.base_point = embed(rel.tuples[0]);
        std::vector<std::vector<int>> gens;
        for (std::size_t t = 1; t < rel.tuples.size(); ++t) {
            auto e = embed(rel.tuples[t]);
            std::vector<int> diff(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j)
                diff[static_cast<std::size_t>(j)] =
                    e[static_cast<std::size_t>(j)] - coset.base_point[static_cast<std::size_t>(j)];
            gens.push_back(std::move(diff));
        }
        coset.basis = subgroup_basis(gens, m, dim);
        out.cosets.push_back(std::move(coset));
    }
    return out;
}

/// x maps to the unit vector at x, as an index into Z_m^a.
inline Homomorphism unit_embedding(const Structure& a, int m) {
    AffineStructure affine; // only for indexing helpers
    affine.m = m;
    affine.base = a;
    Homomorphism h;
    for (int x = 0; x < a.domain_size; ++x) {
        std::vector<int> v(static_cast<std::size_t>(a.domain_size), 0);
        v[static_cast<std::size_t>(x)] = 1 % m;
        h.mapping.push_back(affine.index_vector(v));
    }
    return h;
}

/// Materializes the affine structure with explicit relation tuples by
/// enumerating each coset from its basis.
inline SearchResult<Structure> affine_to_structure(const AffineStructure& affine,
                                                   Limits limits = {}) {
    std::uint64_t dom = 1;
    for (int i = 0; i < affine.base.domain_size; ++i) {
        dom *= static_cast<std::uint64_t>(affine.m);
        if (dom > limits.max_set_size)
            return resource<Structure>("affine domain m^a exceeds the cap");
    }
    const int a = affine.base.domain_size;
    std::vector<std::string> labels;
    labels.reserve(dom);
    AffineStructure idx = affine;
    for (std::uint64_t i = 0; i < dom; ++i) {
        auto v = idx.unindex_vector(static_cast<int>(i));
        std::string label = "(";
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) label += ",";
            label += std::to_string(v[j]);
        }
        label += ")";
        labels.push_back(std::move(label));
    }
    std::vector<Relation> rels;
    for (std::size_t ri = 0; ri < affine.base.relations.size(); ++ri) {
        const Relation& src = affine.base.relations[ri];
        std::vector<Tuple> tuples;
        if (!affine.empty_relation[ri]) {
            const CosetDescriptor& coset = affine.cosets[ri];
            if (coset.basis.span_size() > limits.max_set_size)
                return resource<Structure>("coset size exceeds the materialization cap");
            for (auto& member : coset.basis.enumerate(limits.max_set_size)) {
                Tuple t(static_cast<std::size_t>(src.arity));
                for (int i = 0; i < src.arity; ++i) {
                    std::vector<int> vec(static_cast<std::size_t>(a));
                    for (int j = 0; j < a; ++j)
                        vec[static_cast<std::size_t>(j)] =
                            (member[static_cast<std::size_t>(i * a + j)] +
                             coset.base_point[static_cast<std::size_t>(i * a + j)]) % affine.m;
                    t[static_cast<std::size_t>(i)] = affine.index_vector(vec);
                }
                tuples.push_back(std::move(t));
            }
        }
        rels.emplace_back(src.name, src.arity, std::move(tuples));
    }
    return found(Structure(std::move(labels), std::move(rels)));
}

/// The alternating operation sum(odd positions) - sum(even positions) over
/// Z_m^a, materialized as a table of arity 2k+1 at the affine domain.
inline SearchResult<OperationTable> alternating_witness(const AffineStructure& affine, int k,
                                                        Limits limits = {}) {
    if (k < 0) throw Error("alternating_witness: k must be >= 0");
    const int dom = affine.domain_size();
    const int n = 2 * k + 1;
    std::uint64_t size = 1;
    for (int i = 0; i < n; ++i) {
        size *= static_cast<std::uint64_t>(dom);
        if (size > limits.max_set_size)
            return resource<OperationTable>("table size (m^a)^(2k+1) exceeds the cap");
    }
    const int a = affine.base.domain_size;
    OperationTable t = make_table(dom, dom, n, [&](const Tuple& x) {
        std::vector<int> acc(static_cast<std::size_t>(a), 0);
        for (int i = 0; i < n; ++i) {
            auto v = affine.unindex_vector(x[static_cast<std::size_t>(i)]);
            int sign = i % 2 == 0 ? 1 : -1;
            for (int j = 0; j < a; ++j) acc[static_cast<std::size_t>(j)] += sign * v[static_cast<std::size_t>(j)];
        }
        return affine.index_vector(acc);
    });
    return found(std::move(t));
}

} // namespace pcsp
