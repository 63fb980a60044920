#pragma once

// Stratification of the compactified degree g-1 Picard variety and of its
// theta divisor, indexed by pairs (S, d) with d stable on the normalization
// at S.

#include <theta_strata/dual_graph.hpp>
#include <theta_strata/multidegree.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace theta_strata {

enum class StratumKind { Picard, Theta };

inline const char* to_string(StratumKind k) { return k == StratumKind::Picard ? "picard" : "theta"; }

struct Stratum {
    EdgeSet node_subset;
    Multidegree degree; // on delete_edges(graph, node_subset)
    int dim = 0;        // -1 marks an empty theta stratum
    StratumKind kind = StratumKind::Picard;
    int normalized_nodes = 0; // delta_S
    int components = 0;       // gamma_S

    bool empty() const { return dim < 0; }

    std::string label() const {
        std::ostringstream os;
        os << "S={";
        for (std::size_t i = 0; i < node_subset.size(); ++i) os << (i ? "," : "") << node_subset[i];
        os << "} d=" << degree.to_string() << " dim=" << dim;
        return os.str();
    }

    friend bool operator==(const Stratum& a, const Stratum& b) {
        return a.kind == b.kind && a.node_subset == b.node_subset && a.degree == b.degree;
    }
};

// Canonical order: (|S|, S, d).
inline bool stratum_less(const Stratum& a, const Stratum& b) {
    return std::forward_as_tuple(a.node_subset.size(), a.node_subset, a.degree) <
           std::forward_as_tuple(b.node_subset.size(), b.node_subset, b.degree);
}

inline constexpr int kMaxStrataEdges = 20;

namespace detail {

inline void check_strata_size(const DualGraph& g) {
    if (g.num_edges() > kMaxStrataEdges)
        throw SizeError("stratum enumeration limited to " + std::to_string(kMaxStrataEdges) + " edges, graph has " +
                        std::to_string(g.num_edges()));
    SubsetScanner scan(g);
}

inline EdgeSet edges_of_mask(std::uint32_t mask, int n) {
    EdgeSet s;
    for (int e = 0; e < n; ++e)
        if (mask & (std::uint32_t{1} << e)) s.push_back(e);
    return s;
}

inline bool has_positive_genus_component(const DualGraph& y) {
    for (const auto& part : connected_components(y).parts())
        if (arithmetic_genus(y, Subcurve(y, part)) >= 1) return true;
    return false;
}

} // namespace detail

inline std::vector<Stratum> enumerate_picard_strata(const DualGraph& g) {
    detail::check_strata_size(g);
    const int genus = arithmetic_genus(g);
    std::vector<Stratum> out;
    const std::uint32_t subsets = std::uint32_t{1} << g.num_edges();
    for (std::uint32_t m = 0; m < subsets; ++m) {
        EdgeSet s = detail::edges_of_mask(m, g.num_edges());
        auto y = delete_edges(g, s);
        for (auto& d : enumerate_stable(y.graph)) {
            Stratum st;
            st.node_subset = s;
            st.degree = std::move(d);
            st.normalized_nodes = y.normalized_nodes;
            st.components = y.components;
            st.dim = genus - y.normalized_nodes + y.components - 1;
            st.kind = StratumKind::Picard;
            out.push_back(std::move(st));
        }
    }
    std::sort(out.begin(), out.end(), stratum_less);
    return out;
}

// The g-dimensional strata: S = bridges, d in Sigma of the bridge-free part.
inline std::vector<Stratum> smooth_locus_strata(const DualGraph& g) {
    detail::check_strata_size(g);
    const int genus = arithmetic_genus(g);
    EdgeSet s = bridges(g);
    auto y = delete_edges(g, s);
    std::vector<Stratum> out;
    for (auto& d : enumerate_stable(y.graph))
        out.push_back(Stratum{s, std::move(d), genus - y.normalized_nodes + y.components - 1, StratumKind::Picard,
                              y.normalized_nodes, y.components});
    return out;
}

// Necessary conditions for `lower` to lie in the closure of `upper`.
inline bool closure_candidate(const DualGraph& g, const Stratum& upper, const Stratum& lower) {
    if (upper.degree.size() != lower.degree.size() || static_cast<int>(upper.degree.size()) != g.num_vertices())
        throw DomainError("strata belong to different graphs");
    const auto& s = upper.node_subset;
    const auto& t = lower.node_subset;
    if (s.size() >= t.size() || !std::includes(t.begin(), t.end(), s.begin(), s.end())) return false;
    EdgeSet extra;
    std::set_difference(t.begin(), t.end(), s.begin(), s.end(), std::back_inserter(extra));
    if (upper.degree.total() - lower.degree.total() != static_cast<int>(extra.size())) return false;
    std::vector<int> branches(static_cast<std::size_t>(g.num_vertices()), 0);
    for (EdgeId e : extra) {
        ++branches[static_cast<std::size_t>(g.edge(e).first)];
        ++branches[static_cast<std::size_t>(g.edge(e).second)];
    }
    for (std::size_t v = 0; v < upper.degree.size(); ++v) {
        int drop = upper.degree[v] - lower.degree[v];
        if (drop < 0 || drop > branches[v]) return false;
    }
    return true;
}

struct ThetaSummary {
    int c = 1;                     // separating nodes + 1
    int b_tilde = 0;               // stable multidegrees of the bridge-free normalization
    int c_times_b_tilde = 0;
    int component_count = 0;       // counted from the union description
    int positive_genus_pieces = 0; // pieces of the bridge-free normalization with p_a >= 1
};

inline ThetaSummary theta_summary(const DualGraph& g) {
    ThetaSummary t;
    EdgeSet sep = bridges(g);
    auto y = delete_edges(g, sep);
    t.c = static_cast<int>(sep.size()) + 1;
    t.b_tilde = static_cast<int>(enumerate_stable(y.graph).size());
    t.c_times_b_tilde = t.c * t.b_tilde;
    for (const auto& part : connected_components(y.graph).parts())
        if (arithmetic_genus(y.graph, Subcurve(y.graph, part)) >= 1) ++t.positive_genus_pieces;
    t.component_count = t.b_tilde * t.positive_genus_pieces;
    return t;
}

struct ThetaStratification {
    std::vector<Stratum> strata;
    ThetaSummary summary;
};

// Same index set as the Picard strata; the theta stratum over (S, d) is the
// locus of effective line bundles, of dimension sum p_a(Y_j) - 1 when some
// connected component Y_j of Y_S has p_a >= 1 and empty otherwise.
inline ThetaStratification enumerate_theta_strata(const DualGraph& g) {
    ThetaStratification out;
    out.strata = enumerate_picard_strata(g);
    for (auto& st : out.strata) {
        auto y = delete_edges(g, st.node_subset);
        st.kind = StratumKind::Theta;
        st.dim = detail::has_positive_genus_component(y.graph) ? st.dim - 1 : -1;
    }
    out.summary = theta_summary(g);
    return out;
}

// Three routes to irreducibility: the valency rule, direct counting, and
// "every block of the stripped graph is a cycle".
struct IrreducibilityReport {
    bool by_valency = false;
    bool by_count = false;
    bool by_blocks = false;
};

namespace detail {

inline bool all_blocks_are_cycles(const DualGraph& g) {
    std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
    for (const auto& block : blocks(g)) {
        int vertices = 0;
        std::fill(seen.begin(), seen.end(), 0);
        for (EdgeId e : block)
            for (VertexId v : {g.edge(e).first, g.edge(e).second})
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++vertices;
                }
        if (static_cast<int>(block.size()) != vertices) return false;
    }
    return true;
}

} // namespace detail

inline IrreducibilityReport picard_irreducibility(const DualGraph& g) {
    auto stripped = strip(g, StripMode::LoopsAndBridges);
    IrreducibilityReport r;
    r.by_valency = true;
    for (VertexId v = 0; v < stripped.graph.num_vertices(); ++v) {
        int k = stripped.graph.valency(v);
        if (k != 0 && k != 2) r.by_valency = false;
    }
    r.by_count = enumerate_stable(stripped.graph).size() == 1;
    r.by_blocks = detail::all_blocks_are_cycles(stripped.graph);
    return r;
}

inline IrreducibilityReport theta_irreducibility(const DualGraph& g) {
    auto stripped = strip(g, StripMode::LoopsOnly);
    IrreducibilityReport r;
    r.by_valency = stripped.graph.num_vertices() == 1;
    if (!r.by_valency) {
        r.by_valency = true;
        for (VertexId v = 0; v < stripped.graph.num_vertices(); ++v)
            if (stripped.graph.valency(v) != 2) r.by_valency = false;
    }
    auto t = theta_summary(g);
    r.by_count = t.c == 1 && t.b_tilde == 1;
    r.by_blocks = t.c == 1 && detail::all_blocks_are_cycles(stripped.graph);
    return r;
}

// Valency 0 or 2 at every vertex of the graph stripped of loops and bridges,
// checked against b_tilde == 1.
inline bool is_picard_irreducible(const DualGraph& g) {
    auto r = picard_irreducibility(g);
    if (r.by_valency != r.by_count)
        throw InvariantError(std::string("irreducibility criteria disagree: valency rule says ") +
                             (r.by_valency ? "irreducible" : "reducible") + ", stable multidegree count says " +
                             (r.by_count ? "irreducible" : "reducible"));
    return r.by_valency;
}

// Loop-free graph is a point or 2-regular, checked against c == 1 and
// b_tilde == 1.
inline bool is_theta_irreducible(const DualGraph& g) {
    auto r = theta_irreducibility(g);
    if (r.by_valency != r.by_count)
        throw InvariantError(std::string("theta irreducibility criteria disagree: valency rule says ") +
                             (r.by_valency ? "irreducible" : "reducible") + ", component count says " +
                             (r.by_count ? "irreducible" : "reducible"));
    return r.by_valency;
}

// All-degree stratification of an irreducible curve: one stratum per set of
// loops, degree d - #S on the normalization, dimension g - #S.
inline std::vector<Stratum> strata_irreducible_curve(const DualGraph& g, int d) {
    if (g.num_vertices() != 1)
        throw DomainError("irreducible-curve stratification needs a single vertex, graph has " +
                          std::to_string(g.num_vertices()));
    detail::check_strata_size(g);
    const int genus = arithmetic_genus(g);
    std::vector<Stratum> out;
    const std::uint32_t subsets = std::uint32_t{1} << g.num_edges();
    for (std::uint32_t m = 0; m < subsets; ++m) {
        EdgeSet s = detail::edges_of_mask(m, g.num_edges());
        int delta = static_cast<int>(s.size());
        out.push_back(Stratum{s, Multidegree{d - delta}, genus - delta, StratumKind::Picard, delta, 1});
    }
    std::sort(out.begin(), out.end(), stratum_less);
    return out;
}

// DOT rendering of strata with closure-candidate edges (upper -> lower).
inline std::string strata_to_dot(const DualGraph& g, const std::vector<Stratum>& strata) {
    std::ostringstream os;
    os << "digraph strata {\n";
    for (std::size_t i = 0; i < strata.size(); ++i) os << "  s" << i << " [label=\"" << strata[i].label() << "\"];\n";
    for (std::size_t i = 0; i < strata.size(); ++i)
        for (std::size_t j = 0; j < strata.size(); ++j)
            if (i != j && closure_candidate(g, strata[i], strata[j])) os << "  s" << i << " -> s" << j << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace theta_strata
