// Command line surface: structural analysis, relaxation solving, dichotomy
// classification, constructive solving, polymorphism probes, and the formal
// derivation engine, over structures given as JSON documents or catalog keys.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcsp/pcsp.hpp"

namespace {

constexpr int kExitPositive = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

using nlohmann::json;

std::string fnv1a_digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ResolvedInput {
    pcsp::Structure structure;
    std::string source;
    std::string digest;
};

ResolvedInput resolve_structure(const std::string& arg) {
    ResolvedInput out;
    bool is_file = std::filesystem::exists(arg) && std::filesystem::is_regular_file(arg);
    bool is_key = true;
    try {
        pcsp::catalog_get(arg);
    } catch (const pcsp::Error&) {
        is_key = false;
    }
    if (is_file) {
        if (is_key)
            std::cerr << "warning: '" << arg
                      << "' names both a file and a catalog entry; using the file\n";
        std::ifstream in(arg);
        std::stringstream buffer;
        buffer << in.rdbuf();
        out.structure = pcsp::parse_structure(buffer.str());
        out.source = "file:" + arg;
    } else if (is_key) {
        out.structure = pcsp::catalog_get(arg);
        out.source = "catalog:" + arg;
    } else {
        throw pcsp::Error("'" + arg + "' is neither a readable file nor a catalog key");
    }
    out.digest = fnv1a_digest(pcsp::serialize_structure(out.structure));
    return out;
}

json input_entry(const ResolvedInput& in) {
    return json{{"source", in.source}, {"digest", in.digest}};
}

json rational_point(const std::vector<pcsp::Rat>& xs, const pcsp::LinearSystem& sys) {
    json out = json::object();
    for (int v = 0; v < sys.num_vars(); ++v) {
        const pcsp::Rat& q = xs[static_cast<std::size_t>(v)];
        if (q == 0) continue;
        out[sys.var_names[static_cast<std::size_t>(v)]] =
            pcsp::rat_num(q).str() + "/" + pcsp::rat_den(q).str();
    }
    return out;
}

json integer_point(const std::vector<pcsp::Int>& xs, const pcsp::LinearSystem& sys) {
    json out = json::object();
    for (int v = 0; v < sys.num_vars(); ++v) {
        const pcsp::Int& q = xs[static_cast<std::size_t>(v)];
        if (q == 0) continue;
        out[sys.var_names[static_cast<std::size_t>(v)]] = q.str();
    }
    return out;
}

json verdict_to_json(const pcsp::ClassifierVerdict& v) {
    json out;
    switch (v.outcome) {
        case pcsp::Verdict::Tractable: out["verdict"] = "tractable"; break;
        case pcsp::Verdict::NPHard: out["verdict"] = "np_hard"; break;
        case pcsp::Verdict::Inconclusive: out["verdict"] = "inconclusive"; break;
    }
    out["preconditions"] = {{"a_symmetric", v.preconditions.a_symmetric},
                            {"b_functional", v.preconditions.b_functional},
                            {"additivity_route", v.preconditions.additivity_route}};
    if (v.m) out["m"] = *v.m;
    if (v.sandwich_hom) out["sandwich_hom"] = v.sandwich_hom->mapping;
    if (v.outcome == pcsp::Verdict::NPHard) out["m_bound_exhausted"] = v.m_bound_exhausted.str();
    if (!v.reason.empty()) out["reason"] = v.reason;
    if (v.composite) {
        out["composite"] = true;
        out["component_elements"] = v.component_elements;
        out["components"] = json::array();
        for (const auto& c : v.components) out["components"].push_back(verdict_to_json(c));
    }
    return out;
}

struct ReportTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long long elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

int emit(const json& report, bool verbose, const ReportTimer& timer, int exit_code,
         const std::string& summary) {
    std::cout << report.dump() << "\n";
    if (verbose)
        std::cerr << summary << " (" << timer.elapsed_ms() << " ms, exit " << exit_code << ")\n";
    return exit_code;
}

json limits_to_json(const pcsp::Limits& limits, const pcsp::SearchConfig& cfg) {
    return json{{"max_nodes", cfg.max_nodes},
                {"enum_cap", limits.max_enumeration},
                {"set_cap", limits.max_set_size}};
}

std::optional<pcsp::Tuple> parse_tuple_arg(const std::string& text) {
    pcsp::Tuple out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (cur.empty()) return std::nullopt;
            out.push_back(std::stoi(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            if (!std::isdigit(static_cast<unsigned char>(ch)) && ch != '-') return std::nullopt;
            cur += ch;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"promise CSP analysis toolkit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("--verbose", verbose, "human-readable summary on stderr");

    pcsp::Limits limits;
    pcsp::SearchConfig search_cfg;
    std::uint64_t opt_max_nodes = search_cfg.max_nodes;
    std::uint64_t opt_enum_cap = limits.max_enumeration;
    std::uint64_t opt_set_cap = limits.max_set_size;
    app.add_option("--max-nodes", opt_max_nodes, "search node limit")->capture_default_str();
    app.add_option("--enum-cap", opt_enum_cap, "enumeration limit")->capture_default_str();
    app.add_option("--set-cap", opt_set_cap, "materialized set limit")->capture_default_str();

    // catalog
    auto* cmd_catalog = app.add_subcommand("catalog", "print a catalog structure or list keys");
    std::string catalog_key;
    cmd_catalog->add_option("key", catalog_key, "catalog key, e.g. eqn(3,1)");

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "structural predicates of one structure");
    std::string analyze_arg;
    cmd_analyze->add_option("--structure", analyze_arg, "structure file or catalog key")
        ->required();

    // classify
    auto* cmd_classify = app.add_subcommand("classify", "dichotomy verdict for a template");
    std::string cls_a, cls_b;
    long long cls_mmax = -1;
    cmd_classify->add_option("--A", cls_a, "left template side")->required();
    cmd_classify->add_option("--B", cls_b, "right template side")->required();
    cmd_classify->add_option("--m-max", cls_mmax, "override the modulus bound");

    // relax
    auto* cmd_relax = app.add_subcommand("relax", "run a relaxation on an instance");
    std::string relax_method, relax_template, relax_instance;
    cmd_relax->add_option("--method", relax_method, "blp | aip | blp+aip")->required();
    cmd_relax->add_option("--template", relax_template, "template structure")->required();
    cmd_relax->add_option("--instance", relax_instance, "instance structure")->required();

    // solve
    auto* cmd_solve = app.add_subcommand("solve", "solve an instance of a tractable template");
    std::string solve_a, solve_b, solve_instance_arg;
    cmd_solve->add_option("--A", solve_a, "left template side")->required();
    cmd_solve->add_option("--B", solve_b, "right template side")->required();
    cmd_solve->add_option("--instance", solve_instance_arg, "instance structure")->required();

    // poly
    auto* cmd_poly = app.add_subcommand("poly", "polymorphism probes");
    std::string poly_a, poly_b, poly_check, poly_symmetry, poly_degeneracy, poly_exists;
    int poly_enumerate = -1, poly_k = 1, poly_max_k = 3, poly_max_set = 3;
    cmd_poly->add_option("--A", poly_a, "left template side");
    cmd_poly->add_option("--B", poly_b, "right template side");
    cmd_poly->add_option("--enumerate", poly_enumerate, "enumerate polymorphisms of this arity");
    cmd_poly->add_option("--check", poly_check, "operation table file to check");
    cmd_poly->add_option("--symmetry", poly_symmetry, "operation table file to classify");
    cmd_poly->add_option("--exists", poly_exists, "factored search: alternating | block");
    cmd_poly->add_option("--k", poly_k, "factored arity parameter (arity 2k+1)");
    cmd_poly->add_option("--degeneracy", poly_degeneracy, "operation table file to probe");
    cmd_poly->add_option("--max-k", poly_max_k, "degeneracy probe depth");
    cmd_poly->add_option("--max-set", poly_max_set, "hard-set size bound");

    // derive
    auto* cmd_derive = app.add_subcommand("derive", "formal derivation engine");
    std::string derive_arg, derive_relation, derive_target, derive_premises = "gamma";
    bool derive_super = false, derive_sufficient = false;
    cmd_derive->add_option("--structure", derive_arg, "structure file or catalog key")->required();
    cmd_derive->add_option("--relation", derive_relation, "relation for the matrix rule");
    cmd_derive->add_flag("--super-connected", derive_super, "decide super-connectedness");
    cmd_derive->add_flag("--sufficient", derive_sufficient, "check the sufficient conditions");
    cmd_derive->add_option("--target", derive_target, "tuple to derive, e.g. 1,1,0");
    cmd_derive->add_option("--premises", derive_premises, "gamma | delta (default gamma)");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    limits.max_enumeration = opt_enum_cap;
    limits.max_set_size = opt_set_cap;
    search_cfg.max_nodes = opt_max_nodes;

    ReportTimer timer;
    try {
        if (cmd_catalog->parsed()) {
            if (catalog_key.empty()) {
                json keys = pcsp::catalog_keys();
                std::cout << keys.dump() << "\n";
                return kExitPositive;
            }
            pcsp::Structure s = pcsp::catalog_get(catalog_key);
            std::cout << pcsp::serialize_structure(s) << "\n";
            return kExitPositive;
        }

        if (cmd_analyze->parsed()) {
            ResolvedInput in = resolve_structure(analyze_arg);
            const pcsp::Structure& s = in.structure;
            json results;
            bool inconclusive = false;
            results["symmetric"] = pcsp::is_symmetric(s).symmetric;
            results["functional"] = pcsp::is_functional(s).functional;
            results["components"] = pcsp::connected_components(s).components.size();
            json rels = json::array();
            for (const auto& r : s.relations) {
                json jr;
                jr["name"] = r.name;
                jr["arity"] = r.arity;
                jr["tuples"] = r.tuples.size();
                if (!r.tuples.empty()) {
                    auto witness = pcsp::is_balanced(r);
                    jr["balanced"] = witness.has_value();
                    if (witness) jr["balance_columns"] = witness->total_columns.str();
                    if (r.arity == 2)
                        jr["scc_balanced"] = pcsp::digraph_balanced_via_scc(r);
                }
                auto metrics = pcsp::hypergraph_metrics(s, r.name);
                jr["connected"] = metrics.connected;
                if (metrics.diameter == pcsp::HypergraphMetrics::infinity)
                    jr["diameter"] = nullptr;
                else
                    jr["diameter"] = metrics.diameter;
                rels.push_back(std::move(jr));
            }
            results["relations"] = std::move(rels);
            auto sc = pcsp::is_super_connected(s, limits);
            if (sc.outcome == pcsp::Outcome::Resource) {
                results["super_connected"] = "unknown";
                inconclusive = true;
            } else if (sc.found()) {
                results["super_connected"] = *sc.value;
            } else {
                results["super_connected"] = false;
            }
            auto suff = pcsp::check_sufficient_conditions(s, limits);
            auto tri = [&](const std::optional<bool>& v) -> json {
                if (!v) { inconclusive = true; return "unknown"; }
                return *v;
            };
            results["additive_sufficient"] = tri(suff.additive_sufficient);
            results["dependent_sufficient"] = tri(suff.dependent_sufficient);
            json report{{"command", "analyze"},
                        {"inputs", {{"structure", input_entry(in)}}},
                        {"limits", limits_to_json(limits, search_cfg)},
                        {"results", results}};
            return emit(report, verbose, timer, inconclusive ? kExitInconclusive : kExitPositive,
                        "analyze " + in.source);
        }

        if (cmd_classify->parsed()) {
            ResolvedInput a = resolve_structure(cls_a);
            ResolvedInput b = resolve_structure(cls_b);
            pcsp::ClassifierBounds bounds;
            if (cls_mmax >= 0) bounds.m_max = pcsp::Int(cls_mmax);
            auto v = pcsp::classify(a.structure, b.structure, bounds, limits, search_cfg);
            json report{{"command", "classify"},
                        {"inputs", {{"A", input_entry(a)}, {"B", input_entry(b)}}},
                        {"limits", limits_to_json(limits, search_cfg)},
                        {"results", verdict_to_json(v)}};
            int code = v.outcome == pcsp::Verdict::Tractable    ? kExitPositive
                       : v.outcome == pcsp::Verdict::NPHard     ? kExitNegative
                                                                : kExitInconclusive;
            return emit(report, verbose, timer, code,
                        "classify " + a.source + " vs " + b.source);
        }

        if (cmd_relax->parsed()) {
            ResolvedInput tmpl = resolve_structure(relax_template);
            ResolvedInput inst = resolve_structure(relax_instance);
            pcsp::RelaxationVerdict v;
            if (relax_method == "blp")
                v = pcsp::solve_blp(inst.structure, tmpl.structure);
            else if (relax_method == "aip")
                v = pcsp::solve_aip(inst.structure, tmpl.structure);
            else if (relax_method == "blp+aip")
                v = pcsp::solve_blp_aip(inst.structure, tmpl.structure);
            else
                throw pcsp::Error("unknown method '" + relax_method + "' (blp | aip | blp+aip)");
            json results{{"method", relax_method}, {"accepted", v.accepted}};
            pcsp::LinearSystem sys = pcsp::build_relaxation_system(
                inst.structure, tmpl.structure, relax_method != "aip");
            if (v.rational_certificate)
                results["certificate"] = rational_point(*v.rational_certificate, sys);
            if (v.integer_certificate)
                results["certificate"] = integer_point(*v.integer_certificate, sys);
            if (!v.accepted) results["rejected_reason"] = v.rejected_reason;
            json report{{"command", "relax"},
                        {"inputs", {{"template", input_entry(tmpl)}, {"instance", input_entry(inst)}}},
                        {"limits", limits_to_json(limits, search_cfg)},
                        {"results", results}};
            return emit(report, verbose, timer, v.accepted ? kExitPositive : kExitNegative,
                        "relax " + relax_method);
        }

        if (cmd_solve->parsed()) {
            ResolvedInput a = resolve_structure(solve_a);
            ResolvedInput b = resolve_structure(solve_b);
            ResolvedInput inst = resolve_structure(solve_instance_arg);
            auto v = pcsp::classify(a.structure, b.structure, {}, limits, search_cfg);
            json report{{"command", "solve"},
                        {"inputs",
                         {{"A", input_entry(a)}, {"B", input_entry(b)}, {"instance", input_entry(inst)}}},
                        {"limits", limits_to_json(limits, search_cfg)}};
            if (v.outcome != pcsp::Verdict::Tractable) {
                report["results"] = {{"solved", false}, {"classifier", verdict_to_json(v)}};
                return emit(report, verbose, timer, kExitInconclusive, "solve: not tractable");
            }
            auto sol = pcsp::solve_instance(inst.structure, a.structure, b.structure, v, limits);
            if (sol.outcome == pcsp::Outcome::Resource) {
                report["results"] = {{"solved", false}, {"reason", sol.note}};
                return emit(report, verbose, timer, kExitInconclusive, "solve: resource limit");
            }
            if (!sol.found()) {
                report["results"] = {{"solved", false}, {"promise_violation", true}};
                return emit(report, verbose, timer, kExitNegative, "solve: promise violation");
            }
            report["results"] = {{"solved", true}, {"assignment", sol.value->mapping}};
            return emit(report, verbose, timer, kExitPositive, "solve: homomorphism found");
        }

        if (cmd_poly->parsed()) {
            json results;
            int code = kExitPositive;
            json inputs = json::object();
            if (!poly_symmetry.empty()) {
                std::ifstream in(poly_symmetry);
                std::stringstream buffer;
                buffer << in.rdbuf();
                auto table = pcsp::operation_table_from_json(json::parse(buffer.str()));
                auto rep = pcsp::symmetry_kind(table);
                results["symmetry"] = rep.kind == pcsp::SymmetryKind::Alternating ? "alternating"
                                      : rep.kind == pcsp::SymmetryKind::TwoBlockSymmetric
                                          ? "two_block_symmetric"
                                          : "none";
                if (!rep.diagnostic.empty()) results["diagnostic"] = rep.diagnostic;
                code = rep.kind == pcsp::SymmetryKind::None ? kExitNegative : kExitPositive;
            } else {
                ResolvedInput a = resolve_structure(poly_a);
                ResolvedInput b = poly_b.empty() ? a : resolve_structure(poly_b);
                inputs["A"] = input_entry(a);
                inputs["B"] = input_entry(b);
                if (poly_enumerate > 0) {
                    auto polys =
                        pcsp::enumerate_polymorphisms(a.structure, b.structure, poly_enumerate, limits);
                    if (polys.outcome == pcsp::Outcome::Resource) {
                        results["outcome"] = "resource";
                        results["note"] = polys.note;
                        code = kExitInconclusive;
                    } else {
                        results["count"] = polys.value->size();
                        code = polys.value->empty() ? kExitNegative : kExitPositive;
                    }
                } else if (!poly_check.empty()) {
                    std::ifstream in(poly_check);
                    std::stringstream buffer;
                    buffer << in.rdbuf();
                    auto table = pcsp::operation_table_from_json(json::parse(buffer.str()));
                    auto chk = pcsp::is_polymorphism(table, a.structure, b.structure, limits);
                    if (chk.outcome == pcsp::Outcome::Resource) {
                        results["outcome"] = "resource";
                        code = kExitInconclusive;
                    } else {
                        results["polymorphism"] = chk.holds;
                        if (chk.violation) {
                            results["violation"] = {{"relation", chk.violation->relation},
                                                    {"columns", chk.violation->columns}};
                        }
                        code = chk.holds ? kExitPositive : kExitNegative;
                    }
                } else if (!poly_exists.empty()) {
                    pcsp::FactoredKind kind;
                    if (poly_exists == "alternating")
                        kind = pcsp::FactoredKind::Alternating;
                    else if (poly_exists == "block")
                        kind = pcsp::FactoredKind::BlockSymmetric;
                    else
                        throw pcsp::Error("--exists takes 'alternating' or 'block'");
                    auto r = pcsp::exists_factored_polymorphism(a.structure, b.structure, kind,
                                                                poly_k, limits);
                    if (r.outcome == pcsp::Outcome::Resource) {
                        results["outcome"] = "resource";
                        results["note"] = r.note;
                        code = kExitInconclusive;
                    } else if (r.found()) {
                        results["outcome"] = "found";
                        results["arity"] = 2 * poly_k + 1;
                        results["values"] = r.value->values;
                        if (kind == pcsp::FactoredKind::Alternating)
                            results["domain"] = r.value->alt_domain;
                        code = kExitPositive;
                    } else {
                        results["outcome"] = "none";
                        code = kExitNegative;
                    }
                } else if (!poly_degeneracy.empty()) {
                    std::ifstream in(poly_degeneracy);
                    std::stringstream buffer;
                    buffer << in.rdbuf();
                    auto table = pcsp::operation_table_from_json(json::parse(buffer.str()));
                    auto rep = pcsp::degeneracy_probe(table, poly_max_k, poly_max_set, limits);
                    if (rep.outcome == pcsp::Outcome::Resource) {
                        results["outcome"] = "resource";
                        code = kExitInconclusive;
                    } else {
                        json ks = json::array();
                        for (int k = 2; k < static_cast<int>(rep.value->k_degenerate_witnesses.size());
                             ++k)
                            if (rep.value->k_degenerate_witnesses[static_cast<std::size_t>(k)])
                                ks.push_back(k);
                        results["k_degenerate"] = ks;
                        results["hard_sets"] = rep.value->hard_sets;
                        code = kExitPositive;
                    }
                } else {
                    throw pcsp::Error(
                        "poly needs one of --enumerate, --check, --exists, --symmetry, --degeneracy");
                }
            }
            json report{{"command", "poly"},
                        {"inputs", inputs},
                        {"limits", limits_to_json(limits, search_cfg)},
                        {"results", results}};
            return emit(report, verbose, timer, code, "poly");
        }

        if (cmd_derive->parsed()) {
            ResolvedInput in = resolve_structure(derive_arg);
            const pcsp::Structure& s = in.structure;
            json results;
            int code = kExitPositive;
            if (derive_super) {
                auto r = pcsp::is_super_connected(s, limits);
                if (r.outcome == pcsp::Outcome::Resource) {
                    results["super_connected"] = "unknown";
                    results["note"] = r.note;
                    code = kExitInconclusive;
                } else if (r.found()) {
                    results["super_connected"] = *r.value;
                } else {
                    results["super_connected"] = false;
                    code = kExitNegative;
                }
            } else if (derive_sufficient) {
                auto suff = pcsp::check_sufficient_conditions(s, limits);
                auto tri = [&](const std::optional<bool>& v) -> json {
                    if (!v) { code = kExitInconclusive; return "unknown"; }
                    return *v;
                };
                results["additive_sufficient"] = tri(suff.additive_sufficient);
                results["dependent_sufficient"] = tri(suff.dependent_sufficient);
            } else if (!derive_target.empty()) {
                auto target = parse_tuple_arg(derive_target);
                if (!target) throw pcsp::Error("--target must be a comma-separated tuple");
                std::string relation = derive_relation.empty() ? s.relations.at(0).name
                                                               : derive_relation;
                pcsp::DerivationContext ctx(s, relation, static_cast<int>(target->size()));
                std::vector<pcsp::Tuple> premises;
                if (derive_premises == "gamma") {
                    if (target->size() != 3)
                        throw pcsp::Error("gamma premises require a length-3 target");
                    premises = pcsp::gamma(s);
                } else if (derive_premises == "delta") {
                    premises = pcsp::delta(s, static_cast<int>(target->size()));
                } else {
                    throw pcsp::Error("--premises takes 'gamma' or 'delta'");
                }
                auto r = pcsp::derives(ctx, premises, *target, limits);
                if (r.outcome == pcsp::Outcome::Resource) {
                    results["derivable"] = "unknown";
                    results["note"] = r.note;
                    code = kExitInconclusive;
                } else if (r.found()) {
                    results["derivable"] = true;
                    results["proof_tree"] = pcsp::proof_tree_to_json(*r.value);
                } else {
                    results["derivable"] = false;
                    code = kExitNegative;
                }
            } else {
                throw pcsp::Error("derive needs --super-connected, --sufficient, or --target");
            }
            json report{{"command", "derive"},
                        {"inputs", {{"structure", input_entry(in)}}},
                        {"limits", limits_to_json(limits, search_cfg)},
                        {"results", results}};
            return emit(report, verbose, timer, code, "derive " + in.source);
        }
    } catch (const pcsp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
