#pragma once

// Multidegrees of total g-1: semistability and stability by subcurve
// inequalities, by orientations, and the stabilization d -> d^st.

#include <theta_strata/dual_graph.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace theta_strata {

class Multidegree {
public:
    Multidegree() = default;
    Multidegree(std::vector<int> degrees) : degrees_(std::move(degrees)) { recount(); }
    Multidegree(std::initializer_list<int> degrees) : degrees_(degrees) { recount(); }

    std::size_t size() const { return degrees_.size(); }
    int total() const { return total_; }
    int operator[](std::size_t v) const { return degrees_[v]; }
    const std::vector<int>& degrees() const { return degrees_; }

    void set(std::size_t v, int value) {
        total_ += value - degrees_.at(v);
        degrees_[v] = value;
    }

    int on(VertexMask z) const {
        int s = 0;
        for (std::size_t v = 0; v < degrees_.size(); ++v)
            if (z & (VertexMask{1} << v)) s += degrees_[v];
        return s;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < degrees_.size(); ++i) os << (i ? "," : "") << degrees_[i];
        os << ')';
        return os.str();
    }

    friend bool operator==(const Multidegree& a, const Multidegree& b) { return a.degrees_ == b.degrees_; }
    friend auto operator<=>(const Multidegree& a, const Multidegree& b) { return a.degrees_ <=> b.degrees_; }

private:
    void recount() { total_ = std::accumulate(degrees_.begin(), degrees_.end(), 0); }

    std::vector<int> degrees_;
    int total_ = 0;
};

inline void check_length(const DualGraph& g, const Multidegree& d) {
    if (static_cast<int>(d.size()) != g.num_vertices())
        throw DomainError("multidegree has " + std::to_string(d.size()) + " entries, graph has " +
                          std::to_string(g.num_vertices()) + " vertices");
}

enum class StabilityReason { Ok, WrongTotal, SubcurveBelowBound, SubcurveAtBound };

struct StabilityVerdict {
    bool holds = false;
    StabilityReason reason = StabilityReason::Ok;
    VertexMask witness = 0; // offending connected subcurve, if any

    explicit operator bool() const { return holds; }
};

// Scans against a prebuilt scanner; `subsets` must be its connected subsets.
inline StabilityVerdict check_semistable(const SubsetScanner& scan, std::span<const VertexMask> subsets,
                                         int genus, const Multidegree& d) {
    if (d.total() != genus - 1) return {false, StabilityReason::WrongTotal, 0};
    for (VertexMask z : subsets)
        if (d.on(z) < scan.arithmetic_genus(z) - 1) return {false, StabilityReason::SubcurveBelowBound, z};
    return {true, StabilityReason::Ok, 0};
}

// Strict inequality on every connected subcurve that is not a whole
// connected component.
inline StabilityVerdict check_stable(const SubsetScanner& scan, std::span<const VertexMask> subsets, int genus,
                                     const Multidegree& d) {
    if (d.total() != genus - 1) return {false, StabilityReason::WrongTotal, 0};
    for (VertexMask z : subsets) {
        int bound = scan.arithmetic_genus(z) - 1;
        if (d.on(z) < bound) return {false, StabilityReason::SubcurveBelowBound, z};
        if (d.on(z) == bound && scan.component_of(z) != z) return {false, StabilityReason::SubcurveAtBound, z};
    }
    return {true, StabilityReason::Ok, 0};
}

inline StabilityVerdict check_semistable(const DualGraph& g, const Multidegree& d) {
    check_length(g, d);
    SubsetScanner scan(g);
    return check_semistable(scan, scan.connected_subsets(), arithmetic_genus(g), d);
}

inline StabilityVerdict check_stable(const DualGraph& g, const Multidegree& d) {
    check_length(g, d);
    SubsetScanner scan(g);
    return check_stable(scan, scan.connected_subsets(), arithmetic_genus(g), d);
}

inline bool is_semistable(const DualGraph& g, const Multidegree& d) { return check_semistable(g, d).holds; }
inline bool is_stable(const DualGraph& g, const Multidegree& d) { return check_stable(g, d).holds; }

struct DegreeBox {
    std::vector<int> lo, hi;
};

// p_a(C_v) - 1 <= d_v <= p_a(C_v) - 1 + (non-loop valency), C_v the
// component with its own loops.
inline DegreeBox degree_box(const DualGraph& g) {
    DegreeBox box;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        int lo = g.genus(v) + g.loop_count(v) - 1;
        box.lo.push_back(lo);
        box.hi.push_back(lo + g.nonloop_valency(v));
    }
    return box;
}

// Calls f on every d in the box with |d| = total, in lexicographic order.
inline void for_each_in_box(const DegreeBox& box, int total, const std::function<void(const Multidegree&)>& f) {
    const std::size_t n = box.lo.size();
    std::vector<int> suffix_lo(n + 1, 0), suffix_hi(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        suffix_lo[i] = suffix_lo[i + 1] + box.lo[i];
        suffix_hi[i] = suffix_hi[i + 1] + box.hi[i];
    }
    std::vector<int> cur(n);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int remaining) {
        if (i == n) {
            if (remaining == 0) f(Multidegree(cur));
            return;
        }
        int lo = std::max(box.lo[i], remaining - suffix_hi[i + 1]);
        int hi = std::min(box.hi[i], remaining - suffix_lo[i + 1]);
        for (int x = lo; x <= hi; ++x) {
            cur[i] = x;
            rec(i + 1, remaining - x);
        }
    };
    rec(0, total);
}

inline std::vector<Multidegree> box_candidates(const DualGraph& g) {
    std::vector<Multidegree> out;
    for_each_in_box(degree_box(g), arithmetic_genus(g) - 1, [&](const Multidegree& d) { out.push_back(d); });
    return out;
}

inline std::vector<Multidegree> enumerate_semistable(const DualGraph& g) {
    SubsetScanner scan(g);
    auto subsets = scan.connected_subsets();
    const int genus = arithmetic_genus(g);
    std::vector<Multidegree> out;
    for (auto& d : box_candidates(g))
        if (check_semistable(scan, subsets, genus, d)) out.push_back(std::move(d));
    return out;
}

inline std::vector<Multidegree> enumerate_stable(const DualGraph& g) {
    SubsetScanner scan(g);
    auto subsets = scan.connected_subsets();
    const int genus = arithmetic_genus(g);
    std::vector<Multidegree> out;
    for (auto& d : box_candidates(g))
        if (check_stable(scan, subsets, genus, d)) out.push_back(std::move(d));
    return out;
}

// ---------------------------------------------------------------------------
// Orientations

struct Orientation {
    std::vector<Side> ending; // per edge: the side carrying the ending half-edge

    HalfEdge end_of(EdgeId e) const { return {e, ending.at(static_cast<std::size_t>(e))}; }
    HalfEdge start_of(EdgeId e) const { return {e, other_side(ending.at(static_cast<std::size_t>(e)))}; }

    friend bool operator==(const Orientation&, const Orientation&) = default;
};

inline void check_orientation(const DualGraph& g, const Orientation& o) {
    if (static_cast<int>(o.ending.size()) != g.num_edges())
        throw DomainError("orientation covers " + std::to_string(o.ending.size()) + " edges, graph has " +
                          std::to_string(g.num_edges()));
}

inline Multidegree multidegree_of_orientation(const DualGraph& g, const Orientation& o) {
    check_orientation(g, o);
    std::vector<int> d(static_cast<std::size_t>(g.num_vertices()));
    for (VertexId v = 0; v < g.num_vertices(); ++v) d[static_cast<std::size_t>(v)] = g.genus(v) - 1;
    for (EdgeId e = 0; e < g.num_edges(); ++e) ++d[static_cast<std::size_t>(g.endpoint(o.end_of(e)))];
    return Multidegree(std::move(d));
}

// Strong connectivity of the oriented non-loop multigraph on each component.
inline bool is_stable_orientation(const DualGraph& g, const Orientation& o) {
    check_orientation(g, o);
    const int n = g.num_vertices();
    std::vector<std::vector<VertexId>> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (g.edge(e).is_loop()) continue;
        VertexId a = g.endpoint(o.start_of(e)), b = g.endpoint(o.end_of(e));
        fwd[static_cast<std::size_t>(a)].push_back(b);
        bwd[static_cast<std::size_t>(b)].push_back(a);
    }
    auto reach = [n](const std::vector<std::vector<VertexId>>& adj, VertexId root) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<VertexId> stack{root};
        seen[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (VertexId w : adj[static_cast<std::size_t>(v)])
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
        }
        return seen;
    };
    auto comps = connected_components(g);
    for (const auto& part : comps.parts()) {
        auto f = reach(fwd, part.front());
        auto b = reach(bwd, part.front());
        for (VertexId v : part)
            if (!f[static_cast<std::size_t>(v)] || !b[static_cast<std::size_t>(v)]) return false;
    }
    return true;
}

// Same predicate by scanning connected subcurves for a one-way cut.
inline bool is_stable_orientation_by_subsets(const DualGraph& g, const Orientation& o) {
    check_orientation(g, o);
    SubsetScanner scan(g);
    for (VertexMask z : scan.connected_subsets()) {
        if (scan.component_of(z) == z) continue;
        int out = 0, in = 0;
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            bool s = z & SubsetScanner::bit(g.endpoint(o.start_of(e)));
            bool t = z & SubsetScanner::bit(g.endpoint(o.end_of(e)));
            if (s && !t) ++out;
            if (!s && t) ++in;
        }
        if (out == 0 || in == 0) return false;
    }
    return true;
}

// DFS orientation: tree edges away from the root, other edges toward the
// earlier-discovered endpoint. Stable exactly when the graph is bridgeless.
inline std::optional<Orientation> find_stable_orientation(const DualGraph& g) {
    if (!bridges(g).empty()) return std::nullopt;
    const int n = g.num_vertices();
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(static_cast<std::size_t>(n));
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        if (ed.is_loop()) continue;
        adj[static_cast<std::size_t>(ed.first)].push_back({ed.second, e});
        adj[static_cast<std::size_t>(ed.second)].push_back({ed.first, e});
    }
    Orientation o;
    o.ending.assign(static_cast<std::size_t>(g.num_edges()), Side::Second);
    std::vector<int> disc(static_cast<std::size_t>(n), -1);
    std::vector<char> done(static_cast<std::size_t>(g.num_edges()), 0);
    int timer = 0;
    auto point_to = [&](EdgeId e, VertexId target) {
        o.ending[static_cast<std::size_t>(e)] = g.edge(e).second == target ? Side::Second : Side::First;
        done[static_cast<std::size_t>(e)] = 1;
    };
    for (VertexId root = 0; root < n; ++root) {
        if (disc[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<std::pair<VertexId, std::size_t>> stack{{root, 0}};
        disc[static_cast<std::size_t>(root)] = timer++;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            const auto& nbrs = adj[static_cast<std::size_t>(v)];
            if (next == nbrs.size()) {
                stack.pop_back();
                continue;
            }
            auto [w, e] = nbrs[next++];
            if (done[static_cast<std::size_t>(e)]) continue;
            if (disc[static_cast<std::size_t>(w)] < 0) {
                point_to(e, w);
                disc[static_cast<std::size_t>(w)] = timer++;
                stack.push_back({w, 0});
            } else {
                point_to(e, disc[static_cast<std::size_t>(w)] < disc[static_cast<std::size_t>(v)] ? w : v);
            }
        }
    }
    if (!is_stable_orientation(g, o)) throw InvariantError("DFS orientation of a bridgeless graph is not stable");
    return o;
}

inline EdgeSet nonloop_edges(const DualGraph& g) {
    EdgeSet out;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (!g.edge(e).is_loop()) out.push_back(e);
    return out;
}

inline constexpr int kMaxExhaustiveOrientationEdges = 20;

// Calls f on every orientation of the non-loop edges (loops end on side 2),
// in binary counting order: bit i set means non-loop edge i ends on side 1.
inline void for_each_orientation(const DualGraph& g, const std::function<bool(const Orientation&)>& f) {
    EdgeSet free = nonloop_edges(g);
    if (free.size() > static_cast<std::size_t>(kMaxExhaustiveOrientationEdges))
        throw SizeError("exhaustive orientation scan limited to " + std::to_string(kMaxExhaustiveOrientationEdges) +
                        " non-loop edges, graph has " + std::to_string(free.size()));
    Orientation o;
    o.ending.assign(static_cast<std::size_t>(g.num_edges()), Side::Second);
    const std::uint64_t count = std::uint64_t{1} << free.size();
    for (std::uint64_t m = 0; m < count; ++m) {
        for (std::size_t i = 0; i < free.size(); ++i)
            o.ending[static_cast<std::size_t>(free[i])] = (m >> i) & 1 ? Side::First : Side::Second;
        if (!f(o)) return;
    }
}

// Multidegrees realized by some orientation, and by some stable orientation.
struct OrientationCensus {
    std::set<Multidegree> realized;
    std::set<Multidegree> stably_realized;
};

inline OrientationCensus census_orientations(const DualGraph& g) {
    OrientationCensus out;
    for_each_orientation(g, [&](const Orientation& o) {
        Multidegree d = multidegree_of_orientation(g, o);
        out.realized.insert(d);
        if (!out.stably_realized.count(d) && is_stable_orientation(g, o)) out.stably_realized.insert(d);
        return true;
    });
    return out;
}

namespace detail {

// In-degree realization by max-flow: source -> edge (cap 1) -> endpoint
// vertex (cap 1 each) -> sink (cap = demanded in-degree).
inline std::optional<Orientation> realize_by_flow(const DualGraph& g, const std::vector<int>& indegree) {
    EdgeSet free = nonloop_edges(g);
    const int m = static_cast<int>(free.size()), n = g.num_vertices();
    const int src = 0, sink = 1 + m + n, nodes = sink + 1;
    struct Arc {
        int to, cap;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    auto add = [&](int a, int b, int c) {
        adj[static_cast<std::size_t>(a)].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({b, c});
        adj[static_cast<std::size_t>(b)].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({a, 0});
    };
    std::vector<int> side_arc(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        add(src, 1 + i, 1);
        side_arc[static_cast<std::size_t>(i)] = static_cast<int>(arcs.size());
        add(1 + i, 1 + m + g.edge(free[static_cast<std::size_t>(i)]).first, 1);
        add(1 + i, 1 + m + g.edge(free[static_cast<std::size_t>(i)]).second, 1);
    }
    int demand = 0;
    for (VertexId v = 0; v < n; ++v) {
        if (indegree[static_cast<std::size_t>(v)] < 0) return std::nullopt;
        add(1 + m + v, sink, indegree[static_cast<std::size_t>(v)]);
        demand += indegree[static_cast<std::size_t>(v)];
    }
    if (demand != m) return std::nullopt;
    int flow = 0;
    while (true) {
        std::vector<int> via(static_cast<std::size_t>(nodes), -1);
        std::queue<int> q;
        q.push(src);
        via[static_cast<std::size_t>(src)] = -2;
        while (!q.empty() && via[static_cast<std::size_t>(sink)] == -1) {
            int x = q.front();
            q.pop();
            for (int a : adj[static_cast<std::size_t>(x)]) {
                int y = arcs[static_cast<std::size_t>(a)].to;
                if (arcs[static_cast<std::size_t>(a)].cap > 0 && via[static_cast<std::size_t>(y)] == -1) {
                    via[static_cast<std::size_t>(y)] = a;
                    q.push(y);
                }
            }
        }
        if (via[static_cast<std::size_t>(sink)] == -1) break;
        for (int y = sink; y != src;) {
            int a = via[static_cast<std::size_t>(y)];
            --arcs[static_cast<std::size_t>(a)].cap;
            ++arcs[static_cast<std::size_t>(a ^ 1)].cap;
            y = arcs[static_cast<std::size_t>(a ^ 1)].to;
        }
        ++flow;
    }
    if (flow != m) return std::nullopt;
    Orientation o;
    o.ending.assign(static_cast<std::size_t>(g.num_edges()), Side::Second);
    for (int i = 0; i < m; ++i)
        if (arcs[static_cast<std::size_t>(side_arc[static_cast<std::size_t>(i)])].cap == 0)
            o.ending[static_cast<std::size_t>(free[static_cast<std::size_t>(i)])] = Side::First;
    return o;
}

inline std::vector<int> demanded_indegree(const DualGraph& g, const Multidegree& d) {
    std::vector<int> b(static_cast<std::size_t>(g.num_vertices()));
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        b[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(v)] - g.genus(v) + 1 - g.loop_count(v);
    return b;
}

} // namespace detail

// Some orientation with multidegree d, if one exists. Exhaustive (first hit
// in counting order) for up to 20 non-loop edges, max-flow beyond.
inline std::optional<Orientation> find_realizing_orientation(const DualGraph& g, const Multidegree& d) {
    check_length(g, d);
    if (d.total() != arithmetic_genus(g) - 1) return std::nullopt;
    if (nonloop_edges(g).size() > static_cast<std::size_t>(kMaxExhaustiveOrientationEdges))
        return detail::realize_by_flow(g, detail::demanded_indegree(g, d));
    std::optional<Orientation> hit;
    for_each_orientation(g, [&](const Orientation& o) {
        if (multidegree_of_orientation(g, o) == d) {
            hit = o;
            return false;
        }
        return true;
    });
    return hit;
}

// S(d): cut edges of connected subcurves attaining d_Z = p_a(Z) - 1.
inline EdgeSet destabilizing_nodes(const DualGraph& g, const Multidegree& d) {
    if (!is_semistable(g, d)) throw DomainError("destabilizing nodes need a semistable multidegree, got " + d.to_string());
    SubsetScanner scan(g);
    std::vector<char> hit(static_cast<std::size_t>(g.num_edges()), 0);
    for (VertexMask z : scan.connected_subsets()) {
        if (d.on(z) != scan.arithmetic_genus(z) - 1) continue;
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            bool a = z & SubsetScanner::bit(g.edge(e).first), b = z & SubsetScanner::bit(g.edge(e).second);
            if (a != b) hit[static_cast<std::size_t>(e)] = 1;
        }
    }
    EdgeSet out;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (hit[static_cast<std::size_t>(e)]) out.push_back(e);
    return out;
}

struct StabilizationResult {
    EdgeSet destabilizing_set;
    PartialNormalization normalized;
    Multidegree stable_degree;
    Orientation witness_orientation;
    std::map<EdgeId, HalfEdge> ending_halves;
    bool independence_checked = false;  // every realizing orientation was examined
    bool witness_independent = true;    // all of them gave the same d^st
    std::uint64_t realizing_orientations = 0;
};

inline Multidegree twist_down(const DualGraph& g, const Multidegree& d, const EdgeSet& s, const Orientation& o) {
    std::vector<int> out = d.degrees();
    for (EdgeId e : s) --out[static_cast<std::size_t>(g.endpoint(o.end_of(e)))];
    return Multidegree(std::move(out));
}

inline StabilizationResult stabilize(const DualGraph& g, const Multidegree& d) {
    StabilizationResult r;
    r.destabilizing_set = destabilizing_nodes(g, d);
    auto witness = find_realizing_orientation(g, d);
    if (!witness)
        throw InvariantError("semistable multidegree " + d.to_string() + " has no realizing orientation");
    r.witness_orientation = *witness;
    for (EdgeId e : r.destabilizing_set) r.ending_halves[e] = witness->end_of(e);
    r.stable_degree = twist_down(g, d, r.destabilizing_set, *witness);
    r.normalized = delete_edges(g, r.destabilizing_set);
    if (!is_stable(r.normalized.graph, r.stable_degree))
        throw InvariantError("stabilization of " + d.to_string() + " produced unstable " + r.stable_degree.to_string());
    if (nonloop_edges(g).size() <= static_cast<std::size_t>(kMaxExhaustiveOrientationEdges)) {
        r.independence_checked = true;
        for_each_orientation(g, [&](const Orientation& o) {
            if (multidegree_of_orientation(g, o) != d) return true;
            ++r.realizing_orientations;
            if (twist_down(g, d, r.destabilizing_set, o) != r.stable_degree) r.witness_independent = false;
            return true;
        });
    }
    return r;
}

inline int brill_noether_number(int g, int r, int d) { return g - (r + 1) * (r - d + g); }

} // namespace theta_strata
