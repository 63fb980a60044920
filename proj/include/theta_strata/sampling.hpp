#pragma once

// Seeded random instances: multigraphs, graph curves and glued bundles.

#include <theta_strata/graph_curve.hpp>

#include <algorithm>
#include <functional>
#include <utility>
#include <random>
#include <vector>

namespace theta_strata::sampling {

using Rng = std::mt19937_64;

// Every multiset of vertex pairs (loops allowed) on n vertices with exactly
// m edges, in nondecreasing pair order.
inline void for_each_edge_multiset(int n, int m, const std::function<void(const std::vector<std::pair<int, int>>&)>& f) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) pairs.push_back({a, b});
    std::vector<std::pair<int, int>> cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t start, int left) {
        if (left == 0) {
            f(cur);
            return;
        }
        for (std::size_t i = start; i < pairs.size(); ++i) {
            cur.push_back(pairs[i]);
            rec(i, left - 1);
            cur.pop_back();
        }
    };
    rec(0, m);
}

// Connected labeled multigraphs with 1..max_vertices vertices, at most
// max_edges edges and every genus assignment in [0, max_genus].
inline void for_each_connected_graph(int max_vertices, int max_edges, int max_genus,
                                     const std::function<void(const DualGraph&)>& f) {
    for (int n = 1; n <= max_vertices; ++n) {
        std::vector<int> genera(static_cast<std::size_t>(n), 0);
        for (int m = 0; m <= max_edges; ++m) {
            for_each_edge_multiset(n, m, [&](const std::vector<std::pair<int, int>>& edges) {
                {
                    detail::UnionFind uf(n);
                    int parts = n;
                    for (auto [a, b] : edges)
                        if (uf.unite(a, b)) --parts;
                    if (parts != 1) return;
                }
                std::fill(genera.begin(), genera.end(), 0);
                while (true) {
                    DualGraph g;
                    for (int x : genera) g.add_vertex(x);
                    for (auto [a, b] : edges) g.add_edge(a, b);
                    f(g);
                    int i = 0;
                    while (i < n && genera[static_cast<std::size_t>(i)] == max_genus) genera[static_cast<std::size_t>(i++)] = 0;
                    if (i == n) break;
                    ++genera[static_cast<std::size_t>(i)];
                }
            });
        }
    }
}


inline DualGraph random_graph(Rng& rng, int min_vertices, int max_vertices, int max_edges, int max_genus = 0) {
    std::uniform_int_distribution<int> nv(min_vertices, max_vertices), ne(0, max_edges), gen(0, max_genus);
    DualGraph g;
    const int n = nv(rng);
    for (int i = 0; i < n; ++i) g.add_vertex(gen(rng));
    const int m = ne(rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < m; ++i) g.add_edge(pick(rng), pick(rng));
    return g;
}

// Connected: a random spanning tree first, then random extra edges.
inline DualGraph random_connected_graph(Rng& rng, int min_vertices, int max_vertices, int extra_edges, int max_genus = 0) {
    std::uniform_int_distribution<int> nv(min_vertices, max_vertices), ne(0, extra_edges), gen(0, max_genus);
    DualGraph g;
    const int n = nv(rng);
    for (int i = 0; i < n; ++i) g.add_vertex(gen(rng));
    for (int v = 1; v < n; ++v) g.add_edge(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
    const int m = ne(rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < m; ++i) g.add_edge(pick(rng), pick(rng));
    return g;
}

inline Elem random_unit(Rng& rng, const PrimeField& f) {
    return static_cast<Elem>(std::uniform_int_distribution<std::uint32_t>(1, f.p() - 1)(rng));
}

inline std::vector<Elem> random_gluing(Rng& rng, const PrimeField& f, int edges) {
    std::vector<Elem> c(static_cast<std::size_t>(edges));
    for (auto& x : c) x = random_unit(rng, f);
    return c;
}

inline Multidegree random_degrees(Rng& rng, int vertices, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<int> out(static_cast<std::size_t>(vertices));
    for (auto& x : out) x = d(rng);
    return Multidegree(std::move(out));
}

// Distinct random points per vertex for a graph of genus-0 vertices.
inline GraphCurve random_curve_on(Rng& rng, DualGraph g, std::uint32_t p) {
    PrimeField f(p);
    auto pts = all_points(f);
    std::vector<BranchPair> branch(static_cast<std::size_t>(g.num_edges()));
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        std::shuffle(pts.begin(), pts.end(), rng);
        std::size_t k = 0;
        for (HalfEdge h : g.half_edges_at(v)) {
            auto& b = branch[static_cast<std::size_t>(h.edge)];
            (h.side == Side::First ? b.first : b.second) = pts[k++ % pts.size()];
        }
    }
    return GraphCurve(std::move(g), f, std::move(branch));
}

// Random genus-0 multigraph whose valencies fit on P^1(F_p).
inline GraphCurve random_curve(Rng& rng, std::uint32_t p, int min_vertices, int max_vertices, int max_edges,
                               bool connected = false) {
    while (true) {
        DualGraph g = connected ? random_connected_graph(rng, min_vertices, max_vertices, max_edges - max_vertices + 1)
                                : random_graph(rng, min_vertices, max_vertices, max_edges);
        bool fits = true;
        for (VertexId v = 0; v < g.num_vertices(); ++v)
            if (static_cast<std::uint32_t>(g.valency(v)) > p + 1) fits = false;
        if (fits) return random_curve_on(rng, std::move(g), p);
    }
}

} // namespace theta_strata::sampling
