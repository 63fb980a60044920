#pragma once

// Nodal curves whose components are all projective lines, over F_p.
//
// A line bundle is a multidegree plus one nonzero gluing scalar per node. A
// section is a binary form s_v of degree d_v on every component, subject to
// s_second(q2) = c * s_first(q1) at each glued node, with values taken at
// the canonical point representatives. h0 is the nullity of that system.

#include <theta_strata/binary_form.hpp>
#include <theta_strata/dual_graph.hpp>
#include <theta_strata/multidegree.hpp>
#include <theta_strata/polynomial.hpp>
#include <theta_strata/prime_field.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace theta_strata {

struct BranchPair {
    ProjPoint first;  // on the side-1 vertex
    ProjPoint second; // on the side-2 vertex

    ProjPoint at(Side s) const { return s == Side::First ? first : second; }
};

class GraphCurve {
public:
    GraphCurve(DualGraph graph, PrimeField field, std::vector<BranchPair> branch)
        : graph_(std::move(graph)), field_(field), branch_(std::move(branch)) {
        validate();
    }

    // Integer (or infinite, when empty) branch coordinates reduced mod p.
    static GraphCurve from_integers(DualGraph graph, std::uint32_t p,
                                    const std::vector<std::pair<IntegerPoint, IntegerPoint>>& points) {
        PrimeField f(p);
        std::vector<BranchPair> branch;
        for (const auto& [a, b] : points) branch.push_back({reduce_point(f, a), reduce_point(f, b)});
        return GraphCurve(std::move(graph), f, std::move(branch));
    }

    // Half-edges at each vertex receive 0, infinity, 1, 2, ... in order.
    static GraphCurve with_standard_points(DualGraph graph, std::uint32_t p) {
        PrimeField f(p);
        std::vector<BranchPair> branch(static_cast<std::size_t>(graph.num_edges()));
        for (VertexId v = 0; v < graph.num_vertices(); ++v) {
            int k = 0;
            for (HalfEdge h : graph.half_edges_at(v)) {
                ProjPoint q = k == 0 ? ProjPoint::affine(0) : k == 1 ? ProjPoint::infinity() : ProjPoint::affine(f.reduce(k - 1));
                if (k >= 2 && static_cast<std::uint32_t>(k - 1) >= p) q = ProjPoint::affine(0); // rejected by validate()
                (h.side == Side::First ? branch[static_cast<std::size_t>(h.edge)].first
                                       : branch[static_cast<std::size_t>(h.edge)].second) = q;
                ++k;
            }
        }
        return GraphCurve(std::move(graph), f, std::move(branch));
    }

    const DualGraph& graph() const { return graph_; }
    const PrimeField& field() const { return field_; }
    std::uint32_t p() const { return field_.p(); }

    const BranchPair& branch(EdgeId e) const { return branch_.at(static_cast<std::size_t>(e)); }
    ProjPoint branch(HalfEdge h) const { return branch(h.edge).at(h.side); }
    const std::vector<BranchPair>& branches() const { return branch_; }

    std::vector<ProjPoint> branch_points_on(VertexId v) const {
        std::vector<ProjPoint> out;
        for (HalfEdge h : graph_.half_edges_at(v)) out.push_back(branch(h));
        return out;
    }

    bool is_branch_point(VertexId v, ProjPoint q) const {
        auto pts = branch_points_on(v);
        return std::find(pts.begin(), pts.end(), q) != pts.end();
    }

    std::vector<ProjPoint> smooth_points(VertexId v) const {
        std::vector<ProjPoint> out;
        for (const auto& q : all_points(field_))
            if (!is_branch_point(v, q)) out.push_back(q);
        return out;
    }

private:
    void validate() const {
        if (static_cast<int>(branch_.size()) != graph_.num_edges())
            throw DomainError("branch points given for " + std::to_string(branch_.size()) + " edges, graph has " +
                              std::to_string(graph_.num_edges()));
        for (VertexId v = 0; v < graph_.num_vertices(); ++v)
            if (graph_.genus(v) != 0)
                throw DomainError("graph curves need rational components; vertex " + std::to_string(v) + " has genus " +
                                  std::to_string(graph_.genus(v)));
        for (const auto& b : branch_)
            for (ProjPoint q : {b.first, b.second})
                if (!(q.z == 1 && q.x < field_.p()) && !(q.z == 0 && q.x == 1))
                    throw DomainError("branch point is not a canonical representative over F_" + std::to_string(field_.p()));
        for (VertexId v = 0; v < graph_.num_vertices(); ++v) {
            auto pts = branch_points_on(v);
            if (pts.size() > static_cast<std::size_t>(field_.p()) + 1)
                throw DomainError("prime " + std::to_string(field_.p()) + " too small: vertex " + std::to_string(v) +
                                  " carries " + std::to_string(pts.size()) + " branch points, P^1(F_" +
                                  std::to_string(field_.p()) + ") has " + std::to_string(field_.p() + 1));
            std::sort(pts.begin(), pts.end());
            auto dup = std::adjacent_find(pts.begin(), pts.end());
            if (dup != pts.end())
                throw DomainError("branch points collide on vertex " + std::to_string(v) + " at " + dup->to_string());
        }
    }

    DualGraph graph_;
    PrimeField field_;
    std::vector<BranchPair> branch_;
};

struct GluedLineBundle {
    Multidegree degrees;
    std::vector<Elem> gluing; // one nonzero scalar per edge

    static GluedLineBundle trivial_gluing(Multidegree d, int edges) {
        return {std::move(d), std::vector<Elem>(static_cast<std::size_t>(edges), 1)};
    }

    bool tree_normalized(const DualGraph& g) const {
        for (EdgeId e : spanning_forest(g))
            if (gluing.at(static_cast<std::size_t>(e)) != 1) return false;
        return true;
    }
};

inline constexpr int kMaxSectionUnknowns = 4096;

inline void check_bundle(const GraphCurve& curve, const GluedLineBundle& l) {
    check_length(curve.graph(), l.degrees);
    if (static_cast<int>(l.gluing.size()) != curve.graph().num_edges())
        throw DomainError("gluing has " + std::to_string(l.gluing.size()) + " entries, curve has " +
                          std::to_string(curve.graph().num_edges()) + " nodes");
    for (std::size_t e = 0; e < l.gluing.size(); ++e)
        if (l.gluing[e] == 0 || l.gluing[e] >= curve.p())
            throw DomainError("gluing scalar of node " + std::to_string(e) + " must be a nonzero element of F_" +
                              std::to_string(curve.p()));
    long unknowns = 0;
    for (int d : l.degrees.degrees()) unknowns += std::max(d + 1, 0);
    if (unknowns > kMaxSectionUnknowns)
        throw DomainError("degree too large: " + std::to_string(unknowns) + " form coefficients exceed the limit of " +
                          std::to_string(kMaxSectionUnknowns));
}

// Bundle rescaled by the torus: evaluations on `v` multiplied by lambda, with
// the compensating change of the gluing scalars at v.
inline GluedLineBundle rescale_gluing(const GraphCurve& curve, GluedLineBundle l, VertexId v, Elem lambda) {
    const auto& f = curve.field();
    for (EdgeId e = 0; e < curve.graph().num_edges(); ++e) {
        const auto& ed = curve.graph().edge(e);
        if (ed.is_loop()) continue;
        if (ed.second == v) l.gluing[static_cast<std::size_t>(e)] = f.mul(l.gluing[static_cast<std::size_t>(e)], lambda);
        if (ed.first == v) l.gluing[static_cast<std::size_t>(e)] = f.div(l.gluing[static_cast<std::size_t>(e)], lambda);
    }
    return l;
}

// Rescale components along the spanning forest so forest gluings become 1.
// Returns the bundle and the per-vertex scalars used.
inline std::pair<GluedLineBundle, std::vector<Elem>> tree_normalize(const GraphCurve& curve, GluedLineBundle l) {
    check_bundle(curve, l);
    const auto& g = curve.graph();
    const auto& f = curve.field();
    std::vector<Elem> scale(static_cast<std::size_t>(g.num_vertices()), 1);
    EdgeSet forest = spanning_forest(g);
    std::vector<std::vector<EdgeId>> tree_adj(static_cast<std::size_t>(g.num_vertices()));
    for (EdgeId e : forest) {
        tree_adj[static_cast<std::size_t>(g.edge(e).first)].push_back(e);
        tree_adj[static_cast<std::size_t>(g.edge(e).second)].push_back(e);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
    for (VertexId root = 0; root < g.num_vertices(); ++root) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = 1;
        std::vector<VertexId> stack{root};
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (EdgeId e : tree_adj[static_cast<std::size_t>(v)]) {
                const auto& ed = g.edge(e);
                VertexId w = ed.first == v ? ed.second : ed.first;
                if (seen[static_cast<std::size_t>(w)]) continue;
                seen[static_cast<std::size_t>(w)] = 1;
                // c' = c * lambda if w is side 2, c / lambda if w is side 1
                Elem c = l.gluing[static_cast<std::size_t>(e)];
                Elem lambda = ed.second == w ? f.inv(c) : c;
                l = rescale_gluing(curve, std::move(l), w, lambda);
                scale[static_cast<std::size_t>(w)] = lambda;
                stack.push_back(w);
            }
        }
    }
    return {std::move(l), std::move(scale)};
}

// Prescribed vanishing of order >= multiplicity at a point of one component.
struct PointCondition {
    VertexId vertex = 0;
    ProjPoint point;
    int multiplicity = 1;
};

struct H0Options {
    std::vector<char> active;              // vertices of the subcurve; empty means all
    EdgeSet unglued;                       // nodes left separated
    std::vector<PointCondition> vanishing; // extra conditions on sections
    std::vector<Elem> evaluation_scale;    // per-vertex trivialization change; empty means 1
};

// The gluing system split as  u_e - c_e * w_e  per glued node plus fixed
// vanishing rows, so that h0 can be re-evaluated for many gluings.
class GluingSystem {
public:
    GluingSystem(const GraphCurve& curve, const Multidegree& degrees, const H0Options& opts = {}) : field_(curve.field()) {
        const auto& g = curve.graph();
        check_length(g, degrees);
        const int n = g.num_vertices();
        auto active = [&](VertexId v) {
            return opts.active.empty() || opts.active.at(static_cast<std::size_t>(v));
        };
        auto scale = [&](VertexId v) {
            return opts.evaluation_scale.empty() ? Elem{1} : opts.evaluation_scale.at(static_cast<std::size_t>(v));
        };
        offset_.assign(static_cast<std::size_t>(n), -1);
        degree_.assign(static_cast<std::size_t>(n), -1);
        unknowns_ = 0;
        for (VertexId v = 0; v < n; ++v) {
            degree_[static_cast<std::size_t>(v)] = degrees[static_cast<std::size_t>(v)];
            if (!active(v) || degrees[static_cast<std::size_t>(v)] < 0) continue;
            offset_[static_cast<std::size_t>(v)] = unknowns_;
            unknowns_ += degrees[static_cast<std::size_t>(v)] + 1;
        }
        if (unknowns_ > kMaxSectionUnknowns)
            throw DomainError("degree too large: " + std::to_string(unknowns_) + " form coefficients exceed the limit of " +
                              std::to_string(kMaxSectionUnknowns));
        for (const auto& c : opts.vanishing) {
            g.check_vertex(c.vertex);
            if (!active(c.vertex) || offset_[static_cast<std::size_t>(c.vertex)] < 0) continue;
            for (auto& r : vanishing_rows(field_, degrees[static_cast<std::size_t>(c.vertex)], c.point, c.multiplicity)) {
                std::vector<Elem> row(static_cast<std::size_t>(unknowns_), 0);
                std::copy(r.begin(), r.end(), row.begin() + offset_[static_cast<std::size_t>(c.vertex)]);
                fixed_.push_back(std::move(row));
            }
        }
        EdgeSet unglued(opts.unglued.begin(), opts.unglued.end());
        std::sort(unglued.begin(), unglued.end());
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            if (std::binary_search(unglued.begin(), unglued.end(), e)) continue;
            const auto& ed = g.edge(e);
            if (!active(ed.first) || !active(ed.second)) continue;
            std::vector<Elem> u(static_cast<std::size_t>(unknowns_), 0), w(static_cast<std::size_t>(unknowns_), 0);
            fill(u, ed.second, curve.branch(e).second, scale(ed.second));
            fill(w, ed.first, curve.branch(e).first, scale(ed.first));
            edges_.push_back(e);
            u_.push_back(std::move(u));
            w_.push_back(std::move(w));
        }
    }

    int unknowns() const { return unknowns_; }
    const std::vector<EdgeId>& glued_edges() const { return edges_; }
    int offset(VertexId v) const { return offset_.at(static_cast<std::size_t>(v)); }
    int degree(VertexId v) const { return degree_.at(static_cast<std::size_t>(v)); }
    const std::vector<std::vector<Elem>>& u_rows() const { return u_; }
    const std::vector<std::vector<Elem>>& w_rows() const { return w_; }
    const std::vector<std::vector<Elem>>& fixed_rows() const { return fixed_; }

    Matrix matrix(const std::vector<Elem>& gluing) const {
        Matrix m(0, unknowns_);
        for (const auto& r : fixed_) m.append_row(r);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            Elem c = gluing.at(static_cast<std::size_t>(edges_[i]));
            std::vector<Elem> row(static_cast<std::size_t>(unknowns_));
            for (int j = 0; j < unknowns_; ++j)
                row[static_cast<std::size_t>(j)] = field_.sub(u_[i][static_cast<std::size_t>(j)], field_.mul(c, w_[i][static_cast<std::size_t>(j)]));
            m.append_row(row);
        }
        return m;
    }

    int h0(const std::vector<Elem>& gluing) const {
        if (unknowns_ == 0) return 0;
        return unknowns_ - rank(field_, matrix(gluing));
    }

    std::vector<std::vector<Elem>> sections(const std::vector<Elem>& gluing) const {
        if (unknowns_ == 0) return {};
        return nullspace(field_, matrix(gluing));
    }

    // Value at q of the component-v part of a section vector.
    Elem value(const std::vector<Elem>& section, VertexId v, ProjPoint q) const {
        int off = offset(v);
        if (off < 0) return 0;
        auto row = evaluation_row(field_, degree(v), q);
        Elem s = 0;
        for (std::size_t i = 0; i < row.size(); ++i) s = field_.add(s, field_.mul(row[i], section[static_cast<std::size_t>(off) + i]));
        return s;
    }

private:
    void fill(std::vector<Elem>& row, VertexId v, ProjPoint q, Elem s) const {
        int off = offset_[static_cast<std::size_t>(v)];
        if (off < 0) return;
        auto ev = evaluation_row(field_, degree_[static_cast<std::size_t>(v)], q);
        for (std::size_t i = 0; i < ev.size(); ++i)
            row[static_cast<std::size_t>(off) + i] = field_.add(row[static_cast<std::size_t>(off) + i], field_.mul(s, ev[i]));
    }

    PrimeField field_;
    int unknowns_ = 0;
    std::vector<int> offset_;
    std::vector<int> degree_;
    std::vector<EdgeId> edges_;
    std::vector<std::vector<Elem>> u_, w_, fixed_;
};

inline int h0(const GraphCurve& curve, const GluedLineBundle& l, const H0Options& opts = {}) {
    check_bundle(curve, l);
    return GluingSystem(curve, l.degrees, opts).h0(l.gluing);
}

struct SectionSpace {
    std::vector<std::vector<Elem>> basis; // coefficient vectors, components concatenated
    std::vector<int> offset;              // per vertex, -1 when the component contributes no forms
    int dim() const { return static_cast<int>(basis.size()); }
};

inline SectionSpace sections(const GraphCurve& curve, const GluedLineBundle& l, const H0Options& opts = {}) {
    check_bundle(curve, l);
    GluingSystem sys(curve, l.degrees, opts);
    SectionSpace out;
    out.basis = sys.sections(l.gluing);
    for (VertexId v = 0; v < curve.graph().num_vertices(); ++v) out.offset.push_back(sys.offset(v));
    return out;
}

// h0(Y_S, M) for the bundle restricted to the normalization at S, all
// components of nonnegative degree contributing d_v + 1.
inline int h0_normalization(const GraphCurve& curve, const GluedLineBundle& l, const EdgeSet& s) {
    H0Options opts;
    opts.unglued = s;
    return h0(curve, l, opts);
}

// Blow-up at S: each node n in S becomes a rational bridge E_n carrying
// degree 1, meeting first(n) at 0 and second(n) at infinity.
struct BlownUpCurve {
    GraphCurve curve;
    GluedLineBundle bundle;
};

inline BlownUpCurve blow_up_curve(const GraphCurve& curve, const EdgeSet& s, const GluedLineBundle& l,
                                  const std::vector<std::pair<Elem, Elem>>& exceptional_gluing = {}) {
    check_bundle(curve, l);
    auto b = blow_up(curve.graph(), s);
    if (!exceptional_gluing.empty() && exceptional_gluing.size() != b.blown_up.size())
        throw DomainError("one gluing pair needed per blown-up node");
    std::vector<BranchPair> branch;
    std::vector<Elem> gluing;
    std::vector<int> degrees = l.degrees.degrees();
    for (EdgeId e : b.original_edge)
        if (e >= 0) {
            branch.push_back(curve.branch(e));
            gluing.push_back(l.gluing[static_cast<std::size_t>(e)]);
        }
    for (std::size_t i = 0; i < b.blown_up.size(); ++i) {
        EdgeId n = b.blown_up[i];
        branch.push_back({curve.branch(n).first, ProjPoint::affine(0)});
        branch.push_back({ProjPoint::infinity(), curve.branch(n).second});
        gluing.push_back(exceptional_gluing.empty() ? 1 : exceptional_gluing[i].first);
        gluing.push_back(exceptional_gluing.empty() ? 1 : exceptional_gluing[i].second);
        degrees.push_back(1);
    }
    GraphCurve blown(b.graph, curve.field(), std::move(branch));
    return {std::move(blown), GluedLineBundle{Multidegree(std::move(degrees)), std::move(gluing)}};
}

inline int h0_blowup(const GraphCurve& curve, const EdgeSet& s, const GluedLineBundle& l,
                     const std::vector<std::pair<Elem, Elem>>& exceptional_gluing = {}) {
    auto b = blow_up_curve(curve, s, l, exceptional_gluing);
    return h0(b.curve, b.bundle);
}

// Abel map: the bundle O(sum of points), glued so that the product of linear
// forms vanishing at the points descends.
struct SmoothPoint {
    VertexId vertex = 0;
    ProjPoint point;
};

inline GluedLineBundle abel_image(const GraphCurve& curve, const std::vector<SmoothPoint>& points) {
    const auto& g = curve.graph();
    const auto& f = curve.field();
    std::vector<std::vector<ProjPoint>> zeros(static_cast<std::size_t>(g.num_vertices()));
    for (const auto& pt : points) {
        g.check_vertex(pt.vertex);
        if (curve.is_branch_point(pt.vertex, pt.point))
            throw DomainError("point " + pt.point.to_string() + " on vertex " + std::to_string(pt.vertex) +
                              " collides with a branch point");
        zeros[static_cast<std::size_t>(pt.vertex)].push_back(pt.point);
    }
    std::vector<std::vector<Elem>> form;
    std::vector<int> degrees;
    for (const auto& z : zeros) {
        form.push_back(form_with_zeros(f, z));
        degrees.push_back(static_cast<int>(z.size()));
    }
    std::vector<Elem> gluing;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        Elem s1 = evaluate_form(f, form[static_cast<std::size_t>(ed.first)], curve.branch(e).first);
        Elem s2 = evaluate_form(f, form[static_cast<std::size_t>(ed.second)], curve.branch(e).second);
        gluing.push_back(f.div(s2, s1));
    }
    return {Multidegree(std::move(degrees)), std::move(gluing)};
}

struct ForcedVanishing {
    EdgeSet nodes;
    bool empty_section_space = false; // every node qualifies vacuously
};

inline ForcedVanishing forced_vanishing_nodes(const GraphCurve& curve, const GluedLineBundle& l, const EdgeSet& candidates,
                                              const H0Options& opts = {}) {
    check_bundle(curve, l);
    GluingSystem sys(curve, l.degrees, opts);
    auto basis = sys.sections(l.gluing);
    ForcedVanishing out;
    out.empty_section_space = basis.empty();
    for (EdgeId n : candidates) {
        curve.graph().check_edge(n);
        bool all_zero = true;
        for (const auto& s : basis)
            if (sys.value(s, curve.graph().edge(n).first, curve.branch(n).first) != 0) {
                all_zero = false;
                break;
            }
        if (all_zero) out.nodes.push_back(n);
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

// ---------------------------------------------------------------------------
// Counting the locus {c : h0 >= r + 1} over tree-normalized gluings.

inline constexpr std::uint64_t kDefaultRankBudget = 20'000'000;

inline std::uint64_t rank_budget() {
    if (const char* env = std::getenv("THETA_STRATA_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
    }
    return kDefaultRankBudget;
}

struct WCountOptions {
    bool sample = false;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0: hardware concurrency
    std::optional<std::uint64_t> budget;
};

struct WCountResult {
    std::uint32_t prime = 0;
    std::uint64_t count = 0;       // gluings with h0 >= r + 1
    std::uint64_t sample_size = 0; // gluings examined
    std::map<int, std::uint64_t> histogram;
    EdgeSet free_edges;            // non-forest nodes carrying the free scalars
    std::optional<double> exponent_estimate; // log_p(count)
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

inline unsigned worker_count(unsigned requested, std::uint64_t jobs) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (jobs < 4096) t = 1;
    return static_cast<unsigned>(std::min<std::uint64_t>(t, jobs ? jobs : 1));
}

} // namespace detail

inline WCountResult w_count(const GraphCurve& curve, const Multidegree& degrees, int r, const WCountOptions& opts = {}) {
    const auto& g = curve.graph();
    check_bundle(curve, GluedLineBundle::trivial_gluing(degrees, g.num_edges()));
    EdgeSet forest = spanning_forest(g);
    WCountResult out;
    out.prime = curve.p();
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (!std::binary_search(forest.begin(), forest.end(), e)) out.free_edges.push_back(e);
    const std::uint64_t budget = opts.budget.value_or(rank_budget());
    const std::uint64_t base = curve.p() - 1;
    const std::uint64_t space = detail::checked_power(base, out.free_edges.size(), UINT64_MAX - 1);
    const std::uint64_t jobs = opts.sample ? opts.samples : space;
    if (jobs > budget)
        throw BudgetError(std::string(opts.sample ? "sampled" : "exhaustive") + " gluing scan over F_" +
                              std::to_string(curve.p()) + " with " + std::to_string(out.free_edges.size()) +
                              " free nodes refused",
                          jobs, budget);
    GluingSystem sys(curve, degrees);
    const unsigned workers = detail::worker_count(opts.threads, jobs);
    std::vector<std::map<int, std::uint64_t>> partial(workers);
    auto run = [&](unsigned w) {
        std::vector<Elem> gluing(static_cast<std::size_t>(g.num_edges()), 1);
        const std::uint64_t lo = jobs * w / workers, hi = jobs * (w + 1) / workers;
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::uint64_t x = opts.sample ? detail::splitmix64(opts.seed ^ detail::splitmix64(i)) : i;
            for (EdgeId e : out.free_edges) {
                if (opts.sample) {
                    gluing[static_cast<std::size_t>(e)] = static_cast<Elem>(1 + x % base);
                    x = detail::splitmix64(x);
                } else {
                    gluing[static_cast<std::size_t>(e)] = static_cast<Elem>(1 + x % base);
                    x /= base;
                }
            }
            ++partial[w][sys.h0(gluing)];
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& m : partial)
        for (auto [k, v] : m) out.histogram[k] += v;
    out.sample_size = jobs;
    for (auto [k, v] : out.histogram)
        if (k >= r + 1) out.count += v;
    if (out.count > 0) out.exponent_estimate = std::log(static_cast<double>(out.count)) / std::log(static_cast<double>(curve.p()));
    return out;
}

struct ExponentFit {
    bool empty = true;        // every count was zero
    bool some_zero = false;   // zero counts were left out of the fit
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;    // root mean square of the log residuals
    int points = 0;
};

// Least-squares slope of ln(count) against ln(p) over the nonzero counts.
inline ExponentFit fit_exponent(const std::vector<std::pair<std::uint32_t, std::uint64_t>>& counts) {
    ExponentFit fit;
    std::vector<std::pair<double, double>> pts;
    for (auto [p, c] : counts) {
        if (c == 0) {
            fit.some_zero = true;
            continue;
        }
        pts.push_back({std::log(static_cast<double>(p)), std::log(static_cast<double>(c))});
    }
    fit.points = static_cast<int>(pts.size());
    if (pts.empty()) return fit;
    fit.empty = false;
    if (pts.size() == 1) {
        fit.slope = pts[0].second / pts[0].first;
        return fit;
    }
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (auto [x, y] : pts) ss += (y - fit.intercept - fit.slope * x) * (y - fit.intercept - fit.slope * x);
    fit.residual = std::sqrt(ss / static_cast<double>(pts.size()));
    return fit;
}

inline bool exponent_matches(const ExponentFit& fit, int target, double tolerance = 0.35) {
    return !fit.empty && std::abs(fit.slope - target) <= tolerance;
}

// One curve per prime, from an integer model of the branch points.
struct DimensionProbe {
    std::vector<WCountResult> runs;
    ExponentFit fit;
};

inline DimensionProbe dimension_probe(const DualGraph& graph,
                                      const std::vector<std::pair<IntegerPoint, IntegerPoint>>& points,
                                      const Multidegree& degrees, int r, const std::vector<std::uint32_t>& primes,
                                      const WCountOptions& opts = {}) {
    DimensionProbe out;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> counts;
    for (std::uint32_t p : primes) {
        auto curve = GraphCurve::from_integers(graph, p, points);
        out.runs.push_back(w_count(curve, degrees, r, opts));
        counts.push_back({p, out.runs.back().count});
    }
    out.fit = fit_exponent(counts);
    return out;
}

inline DimensionProbe dimension_probe(const std::function<GraphCurve(std::uint32_t)>& build, const Multidegree& degrees,
                                      int r, const std::vector<std::uint32_t>& primes, const WCountOptions& opts = {}) {
    DimensionProbe out;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> counts;
    for (std::uint32_t p : primes) {
        out.runs.push_back(w_count(build(p), degrees, r, opts));
        counts.push_back({p, out.runs.back().count});
    }
    out.fit = fit_exponent(counts);
    return out;
}

// W^1 of degree g - 1 on an irreducible rational curve with g nodes.
inline DimensionProbe w1_dimension_probe(const std::vector<std::pair<IntegerPoint, IntegerPoint>>& node_points,
                                         const std::vector<std::uint32_t>& primes, const WCountOptions& opts = {}) {
    const int g = static_cast<int>(node_points.size());
    if (g < 3) throw DomainError("W^1 probe needs at least 3 nodes, got " + std::to_string(g));
    return dimension_probe(graphs::rose(g), node_points, Multidegree{g - 1}, 1, primes, opts);
}

// ---------------------------------------------------------------------------
// Divisors supported on branch points, admissibility and independence.

struct EffectiveNodeDivisor {
    std::map<HalfEdge, int> multiplicity;
    std::vector<PointCondition> extra; // smooth points

    int degree_on(const DualGraph& g, const std::vector<char>& subset) const {
        int d = 0;
        for (auto [h, m] : multiplicity)
            if (subset[static_cast<std::size_t>(g.endpoint(h))]) d += m;
        for (const auto& c : extra)
            if (subset[static_cast<std::size_t>(c.vertex)]) d += c.multiplicity;
        return d;
    }

    int degree() const {
        int d = 0;
        for (auto [h, m] : multiplicity) d += m;
        for (const auto& c : extra) d += c.multiplicity;
        return d;
    }

    std::vector<PointCondition> conditions(const GraphCurve& curve) const {
        std::vector<PointCondition> out;
        for (auto [h, m] : multiplicity)
            if (m > 0) out.push_back({curve.graph().endpoint(h), curve.branch(h), m});
        out.insert(out.end(), extra.begin(), extra.end());
        return out;
    }

    friend bool operator==(const EffectiveNodeDivisor& a, const EffectiveNodeDivisor& b) {
        return a.multiplicity == b.multiplicity && a.extra.size() == b.extra.size();
    }
};

// M on the partial normalization Y_S: the bundle's degrees, its gluings at
// nodes outside S, nodes in S separated.
struct NormalizedBundle {
    GluedLineBundle bundle;
    EdgeSet normalized;

    static NormalizedBundle full(const GraphCurve& curve, const Multidegree& degrees) {
        EdgeSet all;
        for (EdgeId e = 0; e < curve.graph().num_edges(); ++e) all.push_back(e);
        return {GluedLineBundle::trivial_gluing(degrees, curve.graph().num_edges()), all};
    }
};

namespace detail {

inline std::vector<std::vector<char>> nonempty_vertex_subsets(const DualGraph& g) {
    if (g.num_vertices() > kMaxScanVertices)
        throw SizeError("subcurve scan limited to " + std::to_string(kMaxScanVertices) + " vertices");
    std::vector<std::vector<char>> out;
    const std::uint32_t n = static_cast<std::uint32_t>(g.num_vertices());
    for (std::uint32_t m = 1; m < (1u << n); ++m) {
        std::vector<char> s(n, 0);
        for (std::uint32_t v = 0; v < n; ++v) s[v] = (m >> v) & 1;
        out.push_back(std::move(s));
    }
    return out;
}

inline int subcurve_h0(const GraphCurve& curve, const NormalizedBundle& m, const std::vector<char>& subset,
                       const std::vector<PointCondition>& vanishing = {}) {
    H0Options opts;
    opts.active = subset;
    opts.unglued = m.normalized;
    opts.vanishing = vanishing;
    return h0(curve, m.bundle, opts);
}

} // namespace detail

inline bool is_admissible(const GraphCurve& curve, const NormalizedBundle& m, const EffectiveNodeDivisor& e) {
    for (auto [h, k] : e.multiplicity)
        if (k < 0) return false;
    for (const auto& subset : detail::nonempty_vertex_subsets(curve.graph()))
        if (e.degree_on(curve.graph(), subset) > detail::subcurve_h0(curve, m, subset)) return false;
    return true;
}

// Every multiplicity assignment on R with deg_V E <= h0(V, M_V) for all V.
inline std::vector<EffectiveNodeDivisor> admissible_divisors(const GraphCurve& curve, const NormalizedBundle& m,
                                                             const std::vector<HalfEdge>& r) {
    const auto& g = curve.graph();
    auto subsets = detail::nonempty_vertex_subsets(g);
    std::vector<int> bound;
    for (const auto& s : subsets) bound.push_back(detail::subcurve_h0(curve, m, s));
    std::vector<HalfEdge> support(r.begin(), r.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (HalfEdge h : support) g.check_edge(h.edge);
    std::vector<EffectiveNodeDivisor> out;
    EffectiveNodeDivisor cur;
    std::vector<int> load(subsets.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == support.size()) {
            out.push_back(cur);
            return;
        }
        VertexId v = g.endpoint(support[i]);
        for (int k = 0;; ++k) {
            bool ok = true;
            for (std::size_t s = 0; s < subsets.size(); ++s)
                if (subsets[s][static_cast<std::size_t>(v)] && load[s] + k > bound[s]) ok = false;
            if (!ok) break;
            if (k > 0) cur.multiplicity[support[i]] = k;
            for (std::size_t s = 0; s < subsets.size(); ++s)
                if (subsets[s][static_cast<std::size_t>(v)]) load[s] += k;
            rec(i + 1);
            for (std::size_t s = 0; s < subsets.size(); ++s)
                if (subsets[s][static_cast<std::size_t>(v)]) load[s] -= k;
        }
        cur.multiplicity.erase(support[i]);
    };
    rec(0);
    return out;
}

inline std::vector<EffectiveNodeDivisor> admissible_divisors(const GraphCurve& curve, const Multidegree& degrees,
                                                             const std::vector<HalfEdge>& r) {
    return admissible_divisors(curve, NormalizedBundle::full(curve, degrees), r);
}

// One branch per node: the ending half-edges of an orientation realizing d,
// so that E has degree d_v + 1 on every component.
inline EffectiveNodeDivisor branch_divisor(const GraphCurve& curve, const Multidegree& degrees) {
    auto o = find_realizing_orientation(curve.graph(), degrees);
    if (!o) throw DomainError("no orientation realizes " + degrees.to_string());
    EffectiveNodeDivisor e;
    for (EdgeId n = 0; n < curve.graph().num_edges(); ++n) e.multiplicity[o->end_of(n)] = 1;
    return e;
}

// h0(V, M(-E)_V) = h0(V, M_V) - deg_V E for every subcurve V.
inline bool imposes_independent_conditions(const GraphCurve& curve, const NormalizedBundle& m, const EffectiveNodeDivisor& e) {
    if (!is_admissible(curve, m, e)) throw DomainError("divisor is not admissible for this bundle");
    auto conditions = e.conditions(curve);
    for (const auto& subset : detail::nonempty_vertex_subsets(curve.graph())) {
        int full = detail::subcurve_h0(curve, m, subset);
        int cut = detail::subcurve_h0(curve, m, subset, conditions);
        if (cut != full - e.degree_on(curve.graph(), subset)) return false;
    }
    return true;
}

inline bool imposes_independent_conditions(const GraphCurve& curve, const Multidegree& degrees, const EffectiveNodeDivisor& e) {
    return imposes_independent_conditions(curve, NormalizedBundle::full(curve, degrees), e);
}

// ---------------------------------------------------------------------------
// One node n: M lives on the normalization at n, L_c glues M at n by c.

enum class NodeCase {
    EmptySectionSpace,
    H1_UnbalancedBranch,
    H1_NoBasePoint,
    H1_BothBasePoints,
    Gen_Independent,
    Gen_LinkedBranches,
    Gen_OneBasePoint,
    Gen_TwoBasePoints,
};

inline const char* to_string(NodeCase c) {
    switch (c) {
    case NodeCase::EmptySectionSpace: return "empty_section_space";
    case NodeCase::H1_UnbalancedBranch: return "h1_unbalanced_branch";
    case NodeCase::H1_NoBasePoint: return "h1_no_base_point";
    case NodeCase::H1_BothBasePoints: return "h1_both_base_points";
    case NodeCase::Gen_Independent: return "independent_branches";
    case NodeCase::Gen_LinkedBranches: return "linked_branches";
    case NodeCase::Gen_OneBasePoint: return "one_base_point";
    case NodeCase::Gen_TwoBasePoints: return "two_base_points";
    }
    return "?";
}

inline constexpr NodeCase kAllNodeCases[] = {
    NodeCase::EmptySectionSpace, NodeCase::H1_UnbalancedBranch, NodeCase::H1_NoBasePoint, NodeCase::H1_BothBasePoints,
    NodeCase::Gen_Independent,   NodeCase::Gen_LinkedBranches,  NodeCase::Gen_OneBasePoint, NodeCase::Gen_TwoBasePoints,
};

struct NodeClassification {
    NodeCase tag = NodeCase::EmptySectionSpace;
    EdgeId node = 0;
    int h0_m = 0, h0_minus_q1 = 0, h0_minus_q2 = 0, h0_minus_both = 0;
    // every gluing except the special one
    int generic_h0 = 0;
    bool generic_forced = true;
    // the unique gluing L_M, when it exists
    std::optional<Elem> special_gluing;
    int special_h0 = 0;
    bool special_forced = false;
    // predicted #{c in F_p^* : h0(L_c) >= r + 1}
    int r = 0;
    std::uint64_t w_count = 0;
};

inline NodeClassification classify_one_node(const GraphCurve& curve, const GluedLineBundle& l, const EdgeSet& nodes, int r) {
    if (nodes.size() != 1)
        throw DomainError("node classification needs exactly one node, got " + std::to_string(nodes.size()));
    check_bundle(curve, l);
    const EdgeId n = nodes.front();
    curve.graph().check_edge(n);
    const auto& ed = curve.graph().edge(n);
    const PointCondition q1{ed.first, curve.branch(n).first, 1}, q2{ed.second, curve.branch(n).second, 1};

    NodeClassification c;
    c.node = n;
    c.r = r;
    auto level = [&](std::vector<PointCondition> v) {
        H0Options opts;
        opts.unglued = {n};
        opts.vanishing = std::move(v);
        return GluingSystem(curve, l.degrees, opts).h0(l.gluing);
    };
    c.h0_m = level({});
    c.h0_minus_q1 = level({q1});
    c.h0_minus_q2 = level({q2});
    c.h0_minus_both = level({q1, q2});
    const int h = c.h0_m;
    const bool base1 = c.h0_minus_q1 == h, base2 = c.h0_minus_q2 == h;

    if (h == 0) {
        c.tag = NodeCase::EmptySectionSpace;
        c.generic_h0 = 0;
        c.generic_forced = true;
    } else if (base1 && base2) {
        c.tag = h == 1 ? NodeCase::H1_BothBasePoints : NodeCase::Gen_TwoBasePoints;
        c.generic_h0 = h;
        c.generic_forced = true;
    } else if (base1 || base2) {
        c.tag = h == 1 ? NodeCase::H1_UnbalancedBranch : NodeCase::Gen_OneBasePoint;
        c.generic_h0 = h - 1;
        c.generic_forced = true;
    } else if (c.h0_minus_both == h - 2) {
        c.tag = NodeCase::Gen_Independent;
        c.generic_h0 = h - 1;
        c.generic_forced = false;
    } else {
        c.tag = h == 1 ? NodeCase::H1_NoBasePoint : NodeCase::Gen_LinkedBranches;
        c.generic_h0 = h - 1;
        c.generic_forced = true;
        c.special_h0 = h;
        c.special_forced = false;
        H0Options opts;
        opts.unglued = {n};
        GluingSystem sys(curve, l.degrees, opts);
        for (const auto& s : sys.sections(l.gluing)) {
            Elem e1 = sys.value(s, ed.first, q1.point);
            if (e1 == 0) continue;
            c.special_gluing = curve.field().div(sys.value(s, ed.second, q2.point), e1);
            break;
        }
        if (!c.special_gluing || *c.special_gluing == 0)
            throw InvariantError("linked branches without a nonzero gluing ratio");
    }
    const std::uint64_t units = curve.p() - 1;
    if (c.special_gluing) {
        c.w_count = (c.generic_h0 >= r + 1 ? units - 1 : 0) + (c.special_h0 >= r + 1 ? 1 : 0);
    } else {
        c.w_count = c.generic_h0 >= r + 1 ? units : 0;
    }
    return c;
}

struct NodeScan {
    bool matches = true;
    std::uint64_t w_count = 0;
    std::string mismatch;
};

// Exhaustive scan of c in F_p^* at the node, compared with the prediction.
inline NodeScan verify_one_node(const GraphCurve& curve, GluedLineBundle l, const NodeClassification& c) {
    NodeScan out;
    const EdgeId n = c.node;
    for (Elem x = 1; x < curve.p(); ++x) {
        l.gluing[static_cast<std::size_t>(n)] = x;
        GluingSystem sys(curve, l.degrees);
        auto basis = sys.sections(l.gluing);
        int h = static_cast<int>(basis.size());
        bool forced = true;
        for (const auto& s : basis)
            if (sys.value(s, curve.graph().edge(n).first, curve.branch(n).first) != 0) forced = false;
        bool special = c.special_gluing && *c.special_gluing == x;
        int want_h = special ? c.special_h0 : c.generic_h0;
        bool want_forced = special ? c.special_forced : c.generic_forced;
        if (h >= c.r + 1) ++out.w_count;
        if (out.matches && (h != want_h || forced != want_forced)) {
            out.matches = false;
            out.mismatch = "c=" + std::to_string(x) + ": h0 " + std::to_string(h) + " (predicted " + std::to_string(want_h) +
                           "), forced vanishing " + std::to_string(forced) + " (predicted " + std::to_string(want_forced) + ")";
        }
    }
    if (out.matches && out.w_count != c.w_count) {
        out.matches = false;
        out.mismatch = "W^r count " + std::to_string(out.w_count) + " (predicted " + std::to_string(c.w_count) + ")";
    }
    return out;
}

// ---------------------------------------------------------------------------

// Pairs {0, inf} and orbits {a, n/a} of x -> n/x with n the least
// non-square: a fixed-point-free involution, so every pair lies in one pencil.
inline std::vector<BranchPair> involution_pairs(const PrimeField& f, int count) {
    if (f.p() == 2 || 2 * static_cast<std::uint64_t>(count) > f.p() + 1ULL)
        throw DomainError(std::to_string(count) + " involution pairs do not fit on P^1(F_" + std::to_string(f.p()) + ")");
    Elem n = 2;
    while (f.pow(n, (f.p() - 1) / 2) == 1) ++n;
    std::vector<BranchPair> out{{ProjPoint::affine(0), ProjPoint::infinity()}};
    std::vector<char> used(f.p(), 0);
    for (Elem a = 1; static_cast<int>(out.size()) < count; ++a) {
        Elem b = f.div(n, a);
        if (used[a] || used[b]) continue;
        used[a] = used[b] = 1;
        out.push_back({ProjPoint::affine(a), ProjPoint::affine(b)});
    }
    out.resize(static_cast<std::size_t>(count));
    return out;
}

// Irreducible rational curve with g >= 3 nodes: hyperelliptic iff all the
// node divisors q1 + q2 lie in one pencil of degree-2 divisors.
inline int node_pencil_rank(const GraphCurve& curve) {
    const auto& g = curve.graph();
    if (g.num_vertices() != 1) throw DomainError("hyperelliptic test needs an irreducible curve");
    if (g.num_edges() < 3) throw DomainError("hyperelliptic test needs genus at least 3, got " + std::to_string(g.num_edges()));
    const auto& f = curve.field();
    Matrix m(0, 3);
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        m.append_row(multiply_forms(f, linear_form_at(f, curve.branch(e).first), linear_form_at(f, curve.branch(e).second)));
    return rank(f, m);
}

inline bool hyperelliptic_rational(const GraphCurve& curve) { return node_pencil_rank(curve) <= 2; }

// det of the square gluing matrix as a polynomial in the non-forest gluing
// scalars (forest scalars fixed to 1).
inline constexpr int kMaxSymbolicVariables = 6;

struct ThetaPolynomial {
    Polynomial polynomial;
    EdgeSet variables; // edge carrying variable i
};

inline ThetaPolynomial symbolic_theta_polynomial(const GraphCurve& curve, const Multidegree& degrees) {
    const auto& g = curve.graph();
    check_bundle(curve, GluedLineBundle::trivial_gluing(degrees, g.num_edges()));
    GluingSystem sys(curve, degrees);
    if (sys.unknowns() != g.num_edges())
        throw DomainError("gluing system is not square: " + std::to_string(sys.unknowns()) + " coefficients, " +
                          std::to_string(g.num_edges()) + " nodes");
    EdgeSet forest = spanning_forest(g);
    EdgeSet free;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (!std::binary_search(forest.begin(), forest.end(), e)) free.push_back(e);
    if (static_cast<int>(free.size()) > kMaxSymbolicVariables)
        throw BudgetError("symbolic determinant refused", std::uint64_t{1} << free.size(), std::uint64_t{1} << kMaxSymbolicVariables);
    const auto& f = curve.field();
    const int k = static_cast<int>(free.size());
    ThetaPolynomial out{Polynomial(f, k), free};
    std::vector<int> var_of(static_cast<std::size_t>(g.num_edges()), -1);
    for (int i = 0; i < k; ++i) var_of[static_cast<std::size_t>(free[static_cast<std::size_t>(i)])] = i;
    const auto& edges = sys.glued_edges();
    for (std::uint32_t t = 0; t < (1u << k); ++t) {
        Matrix m(0, sys.unknowns());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            int var = var_of[static_cast<std::size_t>(edges[i])];
            if (var < 0) {
                std::vector<Elem> row(static_cast<std::size_t>(sys.unknowns()));
                for (std::size_t j = 0; j < row.size(); ++j) row[j] = f.sub(sys.u_rows()[i][j], sys.w_rows()[i][j]);
                m.append_row(row);
            } else {
                m.append_row((t >> var) & 1 ? sys.w_rows()[i] : sys.u_rows()[i]);
            }
        }
        Elem det = determinant(f, m);
        if (det == 0) continue;
        Polynomial::Exponents e(static_cast<std::size_t>(k), 0);
        int sign_flips = 0;
        for (int i = 0; i < k; ++i)
            if ((t >> i) & 1) {
                e[static_cast<std::size_t>(i)] = 1;
                ++sign_flips;
            }
        out.polynomial.add_term(e, sign_flips % 2 ? f.neg(det) : det);
    }
    return out;
}

} // namespace theta_strata
