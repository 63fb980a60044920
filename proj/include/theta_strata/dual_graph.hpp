#pragma once

// Genus-decorated multigraphs: the combinatorial skeleton of a nodal curve.
//
// Vertices are irreducible components (decorated by geometric genus), edges
// are nodes. A node inside a single component is a loop. Disconnected graphs
// are allowed everywhere; the arithmetic genus uses the component-count-free
// formula  g = sum(genus) + #edges - #vertices + 1.

#include <theta_strata/error.hpp>

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace theta_strata {

using VertexId = int;
using EdgeId = int;

// Sorted, duplicate-free list of edge indices.
using EdgeSet = std::vector<EdgeId>;

// Bitmask over vertices, used by exhaustive subcurve scans.
using VertexMask = std::uint32_t;

// Exhaustive subset scans refuse graphs with more vertices than this.
inline constexpr int kMaxScanVertices = 16;

enum class Side : std::uint8_t { First = 1, Second = 2 };

constexpr Side other_side(Side s) { return s == Side::First ? Side::Second : Side::First; }

// One branch of a node. Each edge has exactly two.
struct HalfEdge {
    EdgeId edge = 0;
    Side side = Side::First;

    friend auto operator<=>(const HalfEdge&, const HalfEdge&) = default;
};

struct Vertex {
    int genus = 0;
    std::string label;
};

struct Edge {
    VertexId first = 0;  // attachment of side 1
    VertexId second = 0; // attachment of side 2
    std::string label;

    bool is_loop() const { return first == second; }
    VertexId at(Side s) const { return s == Side::First ? first : second; }
};

class DualGraph {
public:
    DualGraph() = default;

    explicit DualGraph(std::span<const int> genera) {
        for (int g : genera) add_vertex(g);
    }

    DualGraph(std::initializer_list<int> genera,
              std::initializer_list<std::pair<VertexId, VertexId>> edges) {
        for (int g : genera) add_vertex(g);
        for (auto [a, b] : edges) add_edge(a, b);
    }

    VertexId add_vertex(int genus, std::string label = {}) {
        if (genus < 0) throw DomainError("geometric genus must be nonnegative, got " + std::to_string(genus));
        vertices_.push_back(Vertex{genus, std::move(label)});
        return static_cast<VertexId>(vertices_.size()) - 1;
    }

    EdgeId add_edge(VertexId a, VertexId b, std::string label = {}) {
        check_vertex(a);
        check_vertex(b);
        edges_.push_back(Edge{a, b, std::move(label)});
        return static_cast<EdgeId>(edges_.size()) - 1;
    }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Vertex& vertex(VertexId v) const { return vertices_.at(static_cast<std::size_t>(v)); }
    const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
    std::span<const Vertex> vertices() const { return vertices_; }
    std::span<const Edge> edges() const { return edges_; }

    int genus(VertexId v) const { return vertex(v).genus; }
    VertexId endpoint(HalfEdge h) const { return edge(h.edge).at(h.side); }

    int loop_count(VertexId v) const {
        return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                              [v](const Edge& e) { return e.is_loop() && e.first == v; }));
    }

    // Number of non-loop edges at v (a loop never crosses a cut).
    int nonloop_valency(VertexId v) const {
        return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [v](const Edge& e) {
            return !e.is_loop() && (e.first == v || e.second == v);
        }));
    }

    // Half-edges attached to v, loops contributing both sides.
    std::vector<HalfEdge> half_edges_at(VertexId v) const {
        std::vector<HalfEdge> out;
        for (EdgeId e = 0; e < num_edges(); ++e) {
            if (edges_[static_cast<std::size_t>(e)].first == v) out.push_back({e, Side::First});
            if (edges_[static_cast<std::size_t>(e)].second == v) out.push_back({e, Side::Second});
        }
        return out;
    }

    int valency(VertexId v) const { return static_cast<int>(half_edges_at(v).size()); }

    bool all_rational() const {
        return std::all_of(vertices_.begin(), vertices_.end(), [](const Vertex& x) { return x.genus == 0; });
    }

    void check_vertex(VertexId v) const {
        if (v < 0 || v >= num_vertices())
            throw DomainError("vertex index " + std::to_string(v) + " out of range");
    }

    void check_edge(EdgeId e) const {
        if (e < 0 || e >= num_edges()) throw DomainError("edge index " + std::to_string(e) + " out of range");
    }

    friend bool operator==(const DualGraph& a, const DualGraph& b) {
        if (a.vertices_.size() != b.vertices_.size() || a.edges_.size() != b.edges_.size()) return false;
        for (std::size_t i = 0; i < a.vertices_.size(); ++i)
            if (a.vertices_[i].genus != b.vertices_[i].genus) return false;
        for (std::size_t i = 0; i < a.edges_.size(); ++i)
            if (a.edges_[i].first != b.edges_[i].first || a.edges_[i].second != b.edges_[i].second) return false;
        return true;
    }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

// Nonempty set of vertices; the induced subgraph keeps edges with both
// endpoints inside, loops included.
class Subcurve {
public:
    Subcurve(const DualGraph& graph, std::vector<VertexId> vertices) : vertices_(std::move(vertices)) {
        std::sort(vertices_.begin(), vertices_.end());
        vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
        if (vertices_.empty()) throw DomainError("empty subcurve");
        for (VertexId v : vertices_) graph.check_vertex(v);
    }

    std::span<const VertexId> vertices() const { return vertices_; }

    bool contains(VertexId v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }

private:
    std::vector<VertexId> vertices_;
};

namespace detail {

inline EdgeSet normalized_edge_set(const DualGraph& g, std::span<const EdgeId> s) {
    EdgeSet out(s.begin(), s.end());
    for (EdgeId e : out) g.check_edge(e);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

} // namespace detail

inline int arithmetic_genus(const DualGraph& g) {
    int sum = 0;
    for (const auto& v : g.vertices()) sum += v.genus;
    return sum + g.num_edges() - g.num_vertices() + 1;
}

inline int arithmetic_genus(const DualGraph& g, const Subcurve& z) {
    int sum = 0;
    for (VertexId v : z.vertices()) sum += g.genus(v);
    int inner = 0;
    for (const auto& e : g.edges())
        if (z.contains(e.first) && z.contains(e.second)) ++inner;
    return sum + inner - static_cast<int>(z.vertices().size()) + 1;
}

struct Components {
    std::vector<int> component_of; // per vertex, numbered by lowest member vertex
    int count = 0;

    std::vector<std::vector<VertexId>> parts() const {
        std::vector<std::vector<VertexId>> out(static_cast<std::size_t>(count));
        for (VertexId v = 0; v < static_cast<VertexId>(component_of.size()); ++v)
            out[static_cast<std::size_t>(component_of[static_cast<std::size_t>(v)])].push_back(v);
        return out;
    }
};

inline Components connected_components(const DualGraph& g) {
    detail::UnionFind uf(g.num_vertices());
    for (const auto& e : g.edges()) uf.unite(e.first, e.second);
    Components out;
    out.component_of.assign(static_cast<std::size_t>(g.num_vertices()), -1);
    std::vector<int> label_of_root(static_cast<std::size_t>(g.num_vertices()), -1);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        int r = uf.find(v);
        if (label_of_root[static_cast<std::size_t>(r)] < 0) label_of_root[static_cast<std::size_t>(r)] = out.count++;
        out.component_of[static_cast<std::size_t>(v)] = label_of_root[static_cast<std::size_t>(r)];
    }
    return out;
}

// Separating edges (Tarjan low-link, parallel edges distinguished by id).
inline EdgeSet bridges(const DualGraph& g) {
    const int n = g.num_vertices();
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(static_cast<std::size_t>(n));
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        if (ed.is_loop()) continue;
        adj[static_cast<std::size_t>(ed.first)].push_back({ed.second, e});
        adj[static_cast<std::size_t>(ed.second)].push_back({ed.first, e});
    }
    std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    EdgeSet out;
    int timer = 0;
    struct Frame {
        VertexId v;
        EdgeId via;
        std::size_t next;
    };
    for (VertexId root = 0; root < n; ++root) {
        if (disc[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& nbrs = adj[static_cast<std::size_t>(f.v)];
            if (f.next < nbrs.size()) {
                auto [w, e] = nbrs[f.next++];
                if (e == f.via) continue;
                if (disc[static_cast<std::size_t>(w)] < 0) {
                    disc[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = timer++;
                    stack.push_back({w, e, 0});
                } else {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)], disc[static_cast<std::size_t>(w)]);
                }
            } else {
                Frame done = f;
                stack.pop_back();
                if (!stack.empty()) {
                    VertexId parent = stack.back().v;
                    low[static_cast<std::size_t>(parent)] =
                        std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done.v)]);
                    if (low[static_cast<std::size_t>(done.v)] > disc[static_cast<std::size_t>(parent)])
                        out.push_back(done.via);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Biconnected blocks of the non-loop edges, each as a sorted edge set.
// A bridge forms a block of its own; loops are ignored.
inline std::vector<EdgeSet> blocks(const DualGraph& g) {
    const int n = g.num_vertices();
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(static_cast<std::size_t>(n));
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        if (ed.is_loop()) continue;
        adj[static_cast<std::size_t>(ed.first)].push_back({ed.second, e});
        adj[static_cast<std::size_t>(ed.second)].push_back({ed.first, e});
    }
    std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<char> stacked(static_cast<std::size_t>(g.num_edges()), 0);
    std::vector<EdgeId> edge_stack;
    std::vector<EdgeSet> out;
    int timer = 0;
    struct Frame {
        VertexId v;
        EdgeId via;
        std::size_t next;
    };
    for (VertexId root = 0; root < n; ++root) {
        if (disc[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& nbrs = adj[static_cast<std::size_t>(f.v)];
            if (f.next < nbrs.size()) {
                auto [w, e] = nbrs[f.next++];
                if (e == f.via) continue;
                if (!stacked[static_cast<std::size_t>(e)]) {
                    stacked[static_cast<std::size_t>(e)] = 1;
                    edge_stack.push_back(e);
                }
                if (disc[static_cast<std::size_t>(w)] < 0) {
                    disc[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = timer++;
                    stack.push_back({w, e, 0});
                } else {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)], disc[static_cast<std::size_t>(w)]);
                }
            } else {
                Frame done = f;
                stack.pop_back();
                if (stack.empty()) continue;
                VertexId parent = stack.back().v;
                low[static_cast<std::size_t>(parent)] =
                    std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done.v)]);
                if (low[static_cast<std::size_t>(done.v)] >= disc[static_cast<std::size_t>(parent)]) {
                    EdgeSet block;
                    while (true) {
                        EdgeId top = edge_stack.back();
                        edge_stack.pop_back();
                        block.push_back(top);
                        if (top == done.via) break;
                    }
                    std::sort(block.begin(), block.end());
                    out.push_back(std::move(block));
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Y_S: the normalization at exactly the nodes in S.
struct PartialNormalization {
    DualGraph graph;
    std::vector<EdgeId> original_edge; // edge of `graph` -> edge of the input
    int normalized_nodes = 0;          // delta_S
    int components = 0;                // gamma_S
};

inline PartialNormalization delete_edges(const DualGraph& g, std::span<const EdgeId> s) {
    EdgeSet removed = detail::normalized_edge_set(g, s);
    PartialNormalization out;
    for (const auto& v : g.vertices()) out.graph.add_vertex(v.genus, v.label);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (std::binary_search(removed.begin(), removed.end(), e)) continue;
        const auto& ed = g.edge(e);
        out.graph.add_edge(ed.first, ed.second, ed.label);
        out.original_edge.push_back(e);
    }
    out.normalized_nodes = static_cast<int>(removed.size());
    out.components = connected_components(out.graph).count;
    return out;
}

// X^_S: every node in S replaced by a rational bridge E_n. Kept edges come
// first, in their original order; then for each n in S (ascending) the pair
// (first(n) -> E_n), (E_n -> second(n)).
struct BlowUp {
    DualGraph graph;
    std::vector<VertexId> exceptional;   // E_n, one per node of S in ascending order
    EdgeSet blown_up;                    // S, sorted
    std::vector<EdgeId> original_edge;   // edge of `graph` -> input edge (-1 for exceptional edges)
};

inline BlowUp blow_up(const DualGraph& g, std::span<const EdgeId> s) {
    BlowUp out;
    out.blown_up = detail::normalized_edge_set(g, s);
    for (const auto& v : g.vertices()) out.graph.add_vertex(v.genus, v.label);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (std::binary_search(out.blown_up.begin(), out.blown_up.end(), e)) continue;
        const auto& ed = g.edge(e);
        out.graph.add_edge(ed.first, ed.second, ed.label);
        out.original_edge.push_back(e);
    }
    for (EdgeId n : out.blown_up) {
        const auto& ed = g.edge(n);
        VertexId ex = out.graph.add_vertex(0, "E" + std::to_string(n));
        out.exceptional.push_back(ex);
        out.graph.add_edge(ed.first, ex);
        out.graph.add_edge(ex, ed.second);
        out.original_edge.push_back(-1);
        out.original_edge.push_back(-1);
    }
    return out;
}

// Lowest-index greedy maximal forest; loops are never selected.
inline EdgeSet spanning_forest(const DualGraph& g) {
    detail::UnionFind uf(g.num_vertices());
    EdgeSet out;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (uf.unite(g.edge(e).first, g.edge(e).second)) out.push_back(e);
    return out;
}

enum class StripMode { LoopsAndBridges, LoopsOnly };

inline EdgeSet loops(const DualGraph& g) {
    EdgeSet out;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (g.edge(e).is_loop()) out.push_back(e);
    return out;
}

inline PartialNormalization strip(const DualGraph& g, StripMode mode) {
    EdgeSet s = loops(g);
    if (mode == StripMode::LoopsAndBridges) {
        EdgeSet b = bridges(g);
        s.insert(s.end(), b.begin(), b.end());
    }
    return delete_edges(g, s);
}

// Precomputed bitmask view of a small graph for exhaustive subset scans.
class SubsetScanner {
public:
    explicit SubsetScanner(const DualGraph& g) : n_(g.num_vertices()) {
        if (n_ > kMaxScanVertices)
            throw SizeError("exhaustive subcurve scan limited to " + std::to_string(kMaxScanVertices) +
                            " vertices, graph has " + std::to_string(n_));
        genus_.resize(static_cast<std::size_t>(n_));
        neighbours_.assign(static_cast<std::size_t>(n_), 0);
        for (VertexId v = 0; v < n_; ++v) genus_[static_cast<std::size_t>(v)] = g.genus(v);
        for (const auto& e : g.edges()) {
            VertexMask m = bit(e.first) | bit(e.second);
            edge_masks_.push_back(m);
            if (!e.is_loop()) {
                neighbours_[static_cast<std::size_t>(e.first)] |= bit(e.second);
                neighbours_[static_cast<std::size_t>(e.second)] |= bit(e.first);
            }
        }
        auto comps = connected_components(g);
        component_masks_.assign(static_cast<std::size_t>(comps.count), 0);
        for (VertexId v = 0; v < n_; ++v)
            component_masks_[static_cast<std::size_t>(comps.component_of[static_cast<std::size_t>(v)])] |= bit(v);
    }

    static constexpr VertexMask bit(VertexId v) { return VertexMask{1} << v; }

    int num_vertices() const { return n_; }
    VertexMask full() const { return n_ == 32 ? ~VertexMask{0} : (VertexMask{1} << n_) - 1; }
    std::span<const VertexMask> component_masks() const { return component_masks_; }

    int genus_sum(VertexMask z) const {
        int s = 0;
        for (VertexId v = 0; v < n_; ++v)
            if (z & bit(v)) s += genus_[static_cast<std::size_t>(v)];
        return s;
    }

    int inner_edges(VertexMask z) const {
        int c = 0;
        for (VertexMask m : edge_masks_)
            if ((m & z) == m) ++c;
        return c;
    }

    int cut_size(VertexMask z) const {
        int c = 0;
        for (VertexMask m : edge_masks_)
            if ((m & z) && (m & ~z)) ++c;
        return c;
    }

    int arithmetic_genus(VertexMask z) const {
        return genus_sum(z) + inner_edges(z) - std::popcount(z) + 1;
    }

    bool connected(VertexMask z) const {
        if (z == 0) return false;
        VertexMask seen = z & (~z + 1);
        VertexMask frontier = seen;
        while (frontier) {
            VertexMask next = 0;
            for (VertexId v = 0; v < n_; ++v)
                if (frontier & bit(v)) next |= neighbours_[static_cast<std::size_t>(v)];
            next &= z & ~seen;
            seen |= next;
            frontier = next;
        }
        return seen == z;
    }

    // The connected component containing the (connected) subset z.
    VertexMask component_of(VertexMask z) const {
        for (VertexMask c : component_masks_)
            if (c & z) return c;
        return 0;
    }

    // All nonempty vertex subsets inducing a connected subgraph, ascending.
    std::vector<VertexMask> connected_subsets() const {
        std::vector<VertexMask> out;
        for (VertexMask z = 1; z <= full() && z != 0; ++z)
            if (connected(z)) out.push_back(z);
        return out;
    }

private:
    int n_;
    std::vector<int> genus_;
    std::vector<VertexMask> neighbours_;
    std::vector<VertexMask> edge_masks_;
    std::vector<VertexMask> component_masks_;
};

// Named small graphs used throughout tests, tools and the self-check.
namespace graphs {

// n vertices in a cycle (n >= 2 gives n edges; n == 1 gives one loop).
inline DualGraph cycle(int n, int genus = 0) {
    DualGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(genus);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

// Two vertices joined by `edges` parallel edges.
inline DualGraph banana(int edges, int g1 = 0, int g2 = 0) {
    DualGraph g;
    g.add_vertex(g1);
    g.add_vertex(g2);
    for (int i = 0; i < edges; ++i) g.add_edge(0, 1);
    return g;
}

inline DualGraph path(int vertices, int genus = 0) {
    DualGraph g;
    for (int i = 0; i < vertices; ++i) g.add_vertex(genus);
    for (int i = 0; i + 1 < vertices; ++i) g.add_edge(i, i + 1);
    return g;
}

// Single vertex with `loops` loops.
inline DualGraph rose(int loops, int genus = 0) {
    DualGraph g;
    g.add_vertex(genus);
    for (int i = 0; i < loops; ++i) g.add_edge(0, 0);
    return g;
}

// Two triangles {0,1,2}, {3,4,5} joined by the edge 2-3 (edge index 6).
inline DualGraph dumbbell(int genus = 0) {
    DualGraph g;
    for (int i = 0; i < 6; ++i) g.add_vertex(genus);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 0);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(5, 3);
    g.add_edge(2, 3);
    return g;
}

} // namespace graphs

} // namespace theta_strata
