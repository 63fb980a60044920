#pragma once

// Curve description files and report records.
//
// {
//   "vertices": [{"genus": 0}, ...],
//   "edges": [[0, 1], ...],
//   "branch_points": {"0": [[a1, b1], [a2, b2]], ...},   optional
//   "field_prime": 7                                      optional
// }
//
// A branch point [a, b] is the projective point (a : b); [1, 0] is infinity.

#include <theta_strata/graph_curve.hpp>
#include <theta_strata/multidegree.hpp>
#include <theta_strata/strata.hpp>

#include <json.hpp>

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace theta_strata {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Malformed curve description; the message starts with the field path.
class SchemaError : public DomainError {
public:
    SchemaError(const std::string& path, const std::string& what) : DomainError(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

using IntegerProjPoint = std::array<std::int64_t, 2>;

struct CurveSpec {
    DualGraph graph;
    std::optional<std::uint32_t> field_prime;
    std::optional<std::vector<std::array<IntegerProjPoint, 2>>> branch_points; // per edge, sides 1 and 2
};

namespace detail {

inline std::int64_t schema_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline IntegerProjPoint schema_point(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected a pair [a, b]");
    IntegerProjPoint q{schema_int(j[0], path + "[0]"), schema_int(j[1], path + "[1]")};
    if (q[0] == 0 && q[1] == 0) throw SchemaError(path, "(0:0) is not a point");
    return q;
}

} // namespace detail

inline CurveSpec parse_curve_spec(const Json& j) {
    if (!j.is_object()) throw SchemaError("$", "expected an object");
    for (const auto& [key, value] : j.items())
        if (key != "vertices" && key != "edges" && key != "branch_points" && key != "field_prime")
            throw SchemaError("$." + key, "unknown field");
    CurveSpec spec;
    if (!j.contains("vertices")) throw SchemaError("$.vertices", "missing");
    const Json& vs = j["vertices"];
    if (!vs.is_array()) throw SchemaError("$.vertices", "expected an array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::string path = "$.vertices[" + std::to_string(i) + "]";
        if (!vs[i].is_object()) throw SchemaError(path, "expected an object");
        if (!vs[i].contains("genus")) throw SchemaError(path + ".genus", "missing");
        for (const auto& [key, value] : vs[i].items())
            if (key != "genus" && key != "label") throw SchemaError(path + "." + key, "unknown field");
        std::int64_t genus = detail::schema_int(vs[i]["genus"], path + ".genus");
        if (genus < 0) throw SchemaError(path + ".genus", "must be nonnegative");
        std::string label;
        if (vs[i].contains("label")) {
            if (!vs[i]["label"].is_string()) throw SchemaError(path + ".label", "expected a string");
            label = vs[i]["label"].get<std::string>();
        }
        spec.graph.add_vertex(static_cast<int>(genus), label);
    }
    if (!j.contains("edges")) throw SchemaError("$.edges", "missing");
    const Json& es = j["edges"];
    if (!es.is_array()) throw SchemaError("$.edges", "expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string path = "$.edges[" + std::to_string(i) + "]";
        if (!es[i].is_array() || es[i].size() != 2) throw SchemaError(path, "expected a pair [u, v]");
        std::int64_t ends[2];
        for (int k = 0; k < 2; ++k) {
            std::string sub = path + "[" + std::to_string(k) + "]";
            ends[k] = detail::schema_int(es[i][static_cast<std::size_t>(k)], sub);
            if (ends[k] < 0 || ends[k] >= spec.graph.num_vertices())
                throw SchemaError(sub, "vertex index " + std::to_string(ends[k]) + " out of range");
        }
        spec.graph.add_edge(static_cast<VertexId>(ends[0]), static_cast<VertexId>(ends[1]));
    }
    if (j.contains("field_prime")) {
        std::int64_t p = detail::schema_int(j["field_prime"], "$.field_prime");
        if (p < 2 || p >= (1LL << 31) || !is_prime(static_cast<std::uint64_t>(p)))
            throw SchemaError("$.field_prime", "must be a prime below 2^31, got " + std::to_string(p));
        spec.field_prime = static_cast<std::uint32_t>(p);
    }
    if (j.contains("branch_points")) {
        const Json& bp = j["branch_points"];
        if (!bp.is_object()) throw SchemaError("$.branch_points", "expected an object keyed by edge index");
        std::vector<std::optional<std::array<IntegerProjPoint, 2>>> per_edge(static_cast<std::size_t>(spec.graph.num_edges()));
        for (const auto& [key, value] : bp.items()) {
            std::string path = "$.branch_points." + key;
            std::size_t used = 0;
            long e = -1;
            try {
                e = std::stol(key, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != key.size() || e < 0 || e >= spec.graph.num_edges())
                throw SchemaError(path, "key is not an edge index");
            if (!value.is_array() || value.size() != 2) throw SchemaError(path, "expected [[a1, b1], [a2, b2]]");
            per_edge[static_cast<std::size_t>(e)] = {detail::schema_point(value[0], path + "[0]"),
                                                     detail::schema_point(value[1], path + "[1]")};
        }
        std::vector<std::array<IntegerProjPoint, 2>> all;
        for (std::size_t e = 0; e < per_edge.size(); ++e) {
            if (!per_edge[e]) throw SchemaError("$.branch_points." + std::to_string(e), "missing");
            all.push_back(*per_edge[e]);
        }
        for (VertexId v = 0; v < spec.graph.num_vertices(); ++v)
            if (spec.graph.genus(v) != 0)
                throw SchemaError("$.vertices[" + std::to_string(v) + "].genus", "must be 0 when branch_points are given");
        spec.branch_points = std::move(all);
    }
    return spec;
}

inline CurveSpec parse_curve_spec(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_curve_spec(j);
}

inline CurveSpec parse_curve_spec(const char* text) { return parse_curve_spec(std::string(text)); }

inline CurveSpec load_curve_spec(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw DomainError("cannot read " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_curve_spec(ss.str());
}

inline Json to_json(const CurveSpec& spec) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : spec.graph.vertices()) {
        Json x{{"genus", v.genus}};
        if (!v.label.empty()) x["label"] = v.label;
        j["vertices"].push_back(x);
    }
    j["edges"] = Json::array();
    for (const auto& e : spec.graph.edges()) j["edges"].push_back({e.first, e.second});
    if (spec.field_prime) j["field_prime"] = *spec.field_prime;
    if (spec.branch_points) {
        Json bp = Json::object();
        for (std::size_t e = 0; e < spec.branch_points->size(); ++e) {
            const auto& pair = (*spec.branch_points)[e];
            bp[std::to_string(e)] = {{pair[0][0], pair[0][1]}, {pair[1][0], pair[1][1]}};
        }
        j["branch_points"] = bp;
    }
    return j;
}

// The graph curve over F_p; p defaults to field_prime.
inline GraphCurve curve_at(const CurveSpec& spec, std::optional<std::uint32_t> prime = std::nullopt) {
    if (!spec.branch_points) throw SchemaError("$.branch_points", "required for graph-curve commands");
    std::optional<std::uint32_t> p = prime ? prime : spec.field_prime;
    if (!p) throw SchemaError("$.field_prime", "required when no prime is given");
    PrimeField f(*p);
    std::vector<BranchPair> branch;
    for (std::size_t e = 0; e < spec.branch_points->size(); ++e) {
        BranchPair b;
        for (int side = 0; side < 2; ++side) {
            const auto& q = (*spec.branch_points)[e][static_cast<std::size_t>(side)];
            ProjPoint pt;
            try {
                pt = canonical_point(f, q[0], q[1]);
            } catch (const DomainError&) {
                throw SchemaError("$.branch_points." + std::to_string(e) + "[" + std::to_string(side) + "]",
                                  "reduces to (0:0) mod " + std::to_string(*p));
            }
            (side == 0 ? b.first : b.second) = pt;
        }
        branch.push_back(b);
    }
    return GraphCurve(spec.graph, f, std::move(branch));
}

// ---------------------------------------------------------------------------
// Report payloads.

inline Json to_json(const Multidegree& d) { return d.degrees(); }

inline Json to_json(const ProjPoint& q) { return q.is_infinity() ? Json("inf") : Json(q.x); }

inline Json to_json(const Stratum& s) {
    return Json{{"kind", to_string(s.kind)},
                {"node_subset", s.node_subset},
                {"degree", to_json(s.degree)},
                {"dim", s.dim},
                {"normalized_nodes", s.normalized_nodes},
                {"components", s.components},
                {"label", s.label()}};
}

inline Json to_json(const ThetaSummary& t) {
    return Json{{"c", t.c},
                {"b_tilde", t.b_tilde},
                {"c_times_b_tilde", t.c_times_b_tilde},
                {"component_count", t.component_count},
                {"positive_genus_pieces", t.positive_genus_pieces}};
}

inline Json to_json(const IrreducibilityReport& r) {
    return Json{{"by_valency", r.by_valency}, {"by_count", r.by_count}, {"by_blocks", r.by_blocks},
                {"routes_agree", r.by_valency == r.by_count && r.by_count == r.by_blocks}};
}

inline Json to_json(const GluedLineBundle& l) { return Json{{"degrees", to_json(l.degrees)}, {"gluing", l.gluing}}; }

inline Json to_json(const WCountResult& r) {
    Json hist = Json::object();
    for (auto [k, v] : r.histogram) hist[std::to_string(k)] = v;
    return Json{{"prime", r.prime},
                {"count", r.count},
                {"sample_size", r.sample_size},
                {"free_edges", r.free_edges},
                {"histogram", hist},
                {"exponent_estimate", r.exponent_estimate ? Json(*r.exponent_estimate) : Json(nullptr)}};
}

inline Json to_json(const ExponentFit& f) {
    return Json{{"empty", f.empty}, {"some_zero", f.some_zero}, {"slope", f.empty ? Json(nullptr) : Json(f.slope)},
                {"intercept", f.empty ? Json(nullptr) : Json(f.intercept)}, {"residual", f.residual}, {"points", f.points}};
}

inline Json to_json(const Orientation& o, const DualGraph& g) {
    Json edges = Json::array();
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        HalfEdge h = o.end_of(e);
        edges.push_back(Json{{"edge", e}, {"from", g.endpoint(o.start_of(e))}, {"to", g.endpoint(h)}});
    }
    return edges;
}

enum class Format { Table, Json, Dot };

inline const char* to_string(Format f) {
    switch (f) {
    case Format::Table: return "table";
    case Format::Json: return "json";
    case Format::Dot: return "dot";
    }
    return "?";
}

inline Json make_report(const std::string& command, Json inputs, Json result, Format format,
                        std::optional<std::uint64_t> seed = std::nullopt) {
    return Json{{"command", command},
                {"inputs", std::move(inputs)},
                {"result", std::move(result)},
                {"format", to_string(format)},
                {"seed", seed ? Json(*seed) : Json(nullptr)},
                {"version", kVersion}};
}

} // namespace theta_strata
