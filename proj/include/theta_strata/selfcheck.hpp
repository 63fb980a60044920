#pragma once

// Invariant suite at desk-scale parameters. Every randomized check draws
// from one seeded generator, so a (seed, build) pair reproduces exactly.
// The stability predicates are injectable so that a mutated definition can
// be shown to trip the definition-equivalence checks.

#include <theta_strata/graph_curve.hpp>
#include <theta_strata/multidegree.hpp>
#include <theta_strata/sampling.hpp>
#include <theta_strata/strata.hpp>

#include <functional>
#include <string>
#include <vector>

namespace theta_strata {

// Exhaustive family: connected multigraphs up to these sizes.
inline constexpr int kSelfcheckVertices = 3;
inline constexpr int kSelfcheckEdges = 5;
inline constexpr int kSelfcheckGenus = 1;
// Randomized checks: instances per check and the field used.
inline constexpr int kSelfcheckSamples = 500;
inline constexpr std::uint32_t kSelfcheckPrime = 13;

struct SelfcheckHooks {
    std::function<bool(const DualGraph&, const Multidegree&)> is_semistable = [](const DualGraph& g, const Multidegree& d) {
        return theta_strata::is_semistable(g, d);
    };
    std::function<bool(const DualGraph&, const Multidegree&)> is_stable = [](const DualGraph& g, const Multidegree& d) {
        return theta_strata::is_stable(g, d);
    };
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::uint64_t cases = 0;
    std::string detail; // first failing case
};

namespace detail {

class CheckRecorder {
public:
    explicit CheckRecorder(std::string name) { r_.name = std::move(name); }

    void expect(bool ok, const std::function<std::string()>& describe) {
        ++r_.cases;
        if (!ok && r_.passed) {
            r_.passed = false;
            r_.detail = describe();
        }
    }

    CheckResult done() { return std::move(r_); }

private:
    CheckResult r_;
};

inline std::string describe_graph(const DualGraph& g) {
    std::string s = "genera (";
    for (VertexId v = 0; v < g.num_vertices(); ++v) s += (v ? "," : "") + std::to_string(g.genus(v));
    s += ") edges";
    for (const auto& e : g.edges()) s += " " + std::to_string(e.first) + "-" + std::to_string(e.second);
    return s;
}

} // namespace detail

inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed, const SelfcheckHooks& hooks = {}) {
    std::vector<CheckResult> out;
    using detail::CheckRecorder;
    using detail::describe_graph;

    {
        CheckRecorder semi("semistable_definition_equivalence"), stab("stable_definition_equivalence"),
            bridge("bridge_criterion"), orient("stable_orientation_equivalence"), irr("irreducibility_block_route");
        sampling::for_each_connected_graph(kSelfcheckVertices, kSelfcheckEdges, kSelfcheckGenus, [&](const DualGraph& g) {
            auto census = census_orientations(g);
            for_each_in_box(degree_box(g), arithmetic_genus(g) - 1, [&](const Multidegree& d) {
                semi.expect(hooks.is_semistable(g, d) == (census.realized.count(d) > 0),
                            [&] { return describe_graph(g) + " d=" + d.to_string(); });
                stab.expect(hooks.is_stable(g, d) == (census.stably_realized.count(d) > 0),
                            [&] { return describe_graph(g) + " d=" + d.to_string(); });
            });
            bridge.expect(census.stably_realized.empty() == !bridges(g).empty(), [&] { return describe_graph(g); });
            for_each_orientation(g, [&](const Orientation& o) {
                orient.expect(is_stable_orientation(g, o) == is_stable_orientation_by_subsets(g, o),
                              [&] { return describe_graph(g); });
                return true;
            });
            auto pic = picard_irreducibility(g), th = theta_irreducibility(g);
            irr.expect(pic.by_blocks == pic.by_count && th.by_blocks == th.by_count, [&] { return describe_graph(g); });
        });
        for (auto* r : {&semi, &stab, &bridge, &orient, &irr}) out.push_back(r->done());
    }

    {
        CheckRecorder r("parallel_edge_counts");
        for (int delta = 2; delta <= 6; ++delta) {
            auto g = graphs::banana(delta, 1, 1);
            r.expect(static_cast<int>(enumerate_stable(g).size()) == delta - 1, [&] { return "delta=" + std::to_string(delta); });
            auto strata = enumerate_picard_strata(g);
            for (int k = 1; k <= delta; ++k) {
                int count = 0;
                for (const auto& s : strata) count += static_cast<int>(s.node_subset.size()) == k;
                std::uint64_t binom = 1;
                for (int i = 0; i < k; ++i) binom = binom * static_cast<std::uint64_t>(delta - i) / static_cast<std::uint64_t>(i + 1);
                std::uint64_t want = k <= delta - 2 ? static_cast<std::uint64_t>(delta - k - 1) * binom : k == delta ? 1 : 0;
                r.expect(static_cast<std::uint64_t>(count) == want,
                         [&] { return "delta=" + std::to_string(delta) + " k=" + std::to_string(k); });
            }
        }
        out.push_back(r.done());
    }

    {
        CheckRecorder r("bridge_stabilization");
        for (int g1 = 0; g1 <= 2; ++g1)
            for (int g2 = 0; g2 <= 2; ++g2) {
                DualGraph g({g1, g2}, {{0, 1}});
                for (const Multidegree& d : {Multidegree{g1 - 1, g2}, Multidegree{g1, g2 - 1}}) {
                    auto st = stabilize(g, d);
                    r.expect(st.stable_degree == Multidegree{g1 - 1, g2 - 1},
                             [&] { return "genera " + std::to_string(g1) + "," + std::to_string(g2) + " d=" + d.to_string(); });
                }
            }
        out.push_back(r.done());
    }

    sampling::Rng rng(seed);
    {
        CheckRecorder bounds("h0_bounds"), blow("blowup_equality"), torus("torus_invariance");
        for (int t = 0; t < kSelfcheckSamples; ++t) {
            auto curve = sampling::random_curve(rng, kSelfcheckPrime, 1, 4, 6);
            const auto& f = curve.field();
            const int n = curve.graph().num_vertices(), m = curve.graph().num_edges();
            auto d = sampling::random_degrees(rng, n, -1, 3);
            GluedLineBundle l{d, sampling::random_gluing(rng, f, m)};
            int h = h0(curve, l), top = 0;
            for (int x : d.degrees()) top += std::max(x + 1, 0);
            bounds.expect(top - m <= h && h <= top, [&] { return describe_graph(curve.graph()) + " d=" + d.to_string(); });
            EdgeSet s;
            std::vector<std::pair<Elem, Elem>> ex;
            for (EdgeId e = 0; e < m; ++e)
                if (rng() & 1) {
                    s.push_back(e);
                    ex.push_back({sampling::random_unit(rng, f), sampling::random_unit(rng, f)});
                }
            blow.expect(h0_blowup(curve, s, l, ex) == h0_normalization(curve, l, s),
                        [&] { return describe_graph(curve.graph()) + " d=" + d.to_string(); });
            VertexId v = static_cast<VertexId>(rng() % static_cast<std::uint64_t>(n));
            torus.expect(h0(curve, rescale_gluing(curve, l, v, sampling::random_unit(rng, f))) == h,
                         [&] { return describe_graph(curve.graph()) + " d=" + d.to_string(); });
        }
        for (auto* r : {&bounds, &blow, &torus}) out.push_back(r->done());
    }

    {
        CheckRecorder r("trivial_bundle_uniqueness");
        for (int len = 2; len <= 4; ++len)
            for (std::uint32_t p : {5u, 7u}) {
                auto curve = GraphCurve::with_standard_points(graphs::cycle(len), p);
                auto w = w_count(curve, Multidegree(std::vector<int>(static_cast<std::size_t>(len), 0)), 0);
                r.expect(w.count == 1 && w.histogram.count(1) && w.histogram.at(1) == 1,
                         [&] { return "cycle " + std::to_string(len) + " p=" + std::to_string(p); });
            }
        out.push_back(r.done());
    }

    {
        CheckRecorder r("one_node_cases");
        for (int t = 0; t < kSelfcheckSamples; ++t) {
            auto curve = sampling::random_curve(rng, kSelfcheckPrime, 2, 4, 5);
            if (curve.graph().num_edges() == 0) continue;
            auto d = sampling::random_degrees(rng, curve.graph().num_vertices(), -1, 2);
            GluedLineBundle l{d, sampling::random_gluing(rng, curve.field(), curve.graph().num_edges())};
            EdgeId node = static_cast<EdgeId>(rng() % static_cast<std::uint64_t>(curve.graph().num_edges()));
            auto c = classify_one_node(curve, l, {node}, static_cast<int>(rng() % 3));
            auto scan = verify_one_node(curve, l, c);
            r.expect(scan.matches, [&] { return std::string(to_string(c.tag)) + ": " + scan.mismatch; });
        }
        out.push_back(r.done());
    }

    {
        CheckRecorder r("abel_non_semistable");
        DualGraph g({0, 0}, {{0, 0}, {0, 0}, {0, 1}});
        auto curve = GraphCurve::with_standard_points(g, 11);
        r.expect(!is_semistable(g, {0, 1}), [] { return std::string("degree (0,1) unexpectedly semistable"); });
        for (const auto& q : curve.smooth_points(1))
            r.expect(h0(curve, abel_image(curve, {{1, q}})) >= 2, [&] { return "point " + q.to_string(); });
        out.push_back(r.done());
    }

    {
        CheckRecorder r("hyperelliptic_pencil");
        for (std::uint32_t p : {7u, 11u, 13u}) {
            PrimeField f(p);
            r.expect(hyperelliptic_rational(GraphCurve(graphs::rose(4), f, involution_pairs(f, 4))),
                     [&] { return "involution pairs p=" + std::to_string(p); });
        }
        out.push_back(r.done());
    }
    return out;
}

} // namespace theta_strata
