#include <theta_strata/strata.hpp>

#include "graph_family.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace theta_strata;

namespace {

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST(PicardStrata, TwoVertexCodimensionCounts) {
    for (int delta = 2; delta <= 6; ++delta)
        for (int g1 = 0; g1 <= 1; ++g1)
            for (int g2 = 0; g2 <= 2; ++g2) {
                auto g = graphs::banana(delta, g1, g2);
                const int genus = arithmetic_genus(g);
                std::map<int, int> by_codim;
                for (const auto& s : enumerate_picard_strata(g)) {
                    ASSERT_EQ(s.dim, genus - s.normalized_nodes + s.components - 1);
                    ++by_codim[genus - s.dim];
                }
                EXPECT_EQ(by_codim[0], delta - 1);
                for (int k = 1; k <= delta - 2; ++k) EXPECT_EQ(by_codim[k], (delta - k - 1) * binomial(delta, k));
                // all delta nodes removed: codimension delta - 1, a single stratum
                auto strata = enumerate_picard_strata(g);
                int full = 0;
                for (const auto& s : strata)
                    if (static_cast<int>(s.node_subset.size()) == delta) {
                        ++full;
                        EXPECT_EQ(s.degree, (Multidegree{g1 - 1, g2 - 1}));
                        EXPECT_EQ(genus - s.dim, delta - 1);
                    } else if (static_cast<int>(s.node_subset.size()) == delta - 1) {
                        ADD_FAILURE() << "stratum with |S| = delta - 1: " << s.label();
                    }
                EXPECT_EQ(full, 1);
            }
}

TEST(PicardStrata, CanonicalOrder) {
    auto strata = enumerate_picard_strata(graphs::banana(3));
    for (std::size_t i = 1; i < strata.size(); ++i) EXPECT_TRUE(stratum_less(strata[i - 1], strata[i]));
    EXPECT_TRUE(strata.front().node_subset.empty());
}

TEST(PicardStrata, SizeCap) { EXPECT_THROW(enumerate_picard_strata(graphs::rose(kMaxStrataEdges + 1)), SizeError); }

TEST(SmoothLocus, Cases) {
    auto theta = graphs::banana(4);
    EXPECT_EQ(smooth_locus_strata(theta).size(), enumerate_stable(theta).size());

    auto ct = smooth_locus_strata(graphs::banana(1, 2, 3));
    ASSERT_EQ(ct.size(), 1u);
    EXPECT_EQ(ct[0].node_subset, (EdgeSet{0}));
    EXPECT_EQ(ct[0].degree, (Multidegree{1, 2}));
    EXPECT_EQ(ct[0].dim, 5);

    auto d = smooth_locus_strata(graphs::dumbbell());
    auto tri = enumerate_stable(graphs::cycle(3)).size();
    EXPECT_EQ(d.size(), tri * tri);
    for (const auto& s : d) {
        EXPECT_EQ(s.node_subset, (EdgeSet{6}));
        EXPECT_EQ(s.dim, arithmetic_genus(graphs::dumbbell()));
    }
}

TEST(SmoothLocus, TopDimensionalStrata) {
    theta_strata::family::for_each_connected_graph(3, 4, 1, [](const DualGraph& g) {
        const int genus = arithmetic_genus(g);
        auto all = enumerate_picard_strata(g);
        std::vector<Stratum> top;
        for (const auto& s : all) {
            ASSERT_LE(s.dim, genus);
            if (s.dim == genus) top.push_back(s);
        }
        ASSERT_EQ(top, smooth_locus_strata(g));
    });
}

TEST(Closure, Examples) {
    auto g = graphs::banana(3, 1, 2);
    Stratum open{{}, {1, 3}, 4, StratumKind::Picard, 0, 1};
    EXPECT_FALSE(closure_candidate(g, open, open));
    Stratum one{{0}, {1, 2}, 3, StratumKind::Picard, 1, 1};
    EXPECT_TRUE(closure_candidate(g, open, one));
    EXPECT_FALSE(closure_candidate(g, one, open));
    Stratum other{{0}, {0, 3}, 3, StratumKind::Picard, 1, 1};
    EXPECT_TRUE(closure_candidate(g, open, other));
    Stratum too_far{{0}, {-1, 3}, 3, StratumKind::Picard, 1, 1};
    EXPECT_FALSE(closure_candidate(g, open, too_far));
    Stratum wrong_size{{0}, {0}, 3, StratumKind::Picard, 1, 1};
    EXPECT_THROW(closure_candidate(g, open, wrong_size), DomainError);
}

TEST(Closure, PartialOrderOnSmallGraphs) {
    theta_strata::family::for_each_connected_graph(3, 4, 1, [](const DualGraph& g) {
        auto strata = enumerate_picard_strata(g);
        const std::size_t n = strata.size();
        std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rel[i][j] = closure_candidate(g, strata[i], strata[j]);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_FALSE(rel[i][i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (!rel[i][j]) continue;
                ASSERT_FALSE(rel[j][i]);
                ASSERT_GT(strata[i].dim, strata[j].dim);
                for (std::size_t k = 0; k < n; ++k)
                    if (rel[j][k]) ASSERT_TRUE(rel[i][k]);
            }
        }
    });
}

TEST(ThetaStrata, Summary) {
    auto bridgeless = enumerate_theta_strata(graphs::banana(4, 1, 0));
    EXPECT_EQ(bridgeless.summary.c, 1);
    EXPECT_EQ(bridgeless.summary.component_count, 3);
    EXPECT_EQ(bridgeless.summary.c_times_b_tilde, 3);

    auto both = theta_summary(graphs::banana(1, 1, 2));
    EXPECT_EQ(both.c, 2);
    EXPECT_EQ(both.b_tilde, 1);
    EXPECT_EQ(both.component_count, 2);

    // a smooth rational piece contributes no theta component
    auto rational = theta_summary(graphs::banana(1, 0, 2));
    EXPECT_EQ(rational.component_count, 1);
    EXPECT_EQ(rational.c_times_b_tilde, 2);
}

TEST(ThetaStrata, Dimensions) {
    auto g = graphs::banana(1, 0, 2);
    auto t = enumerate_theta_strata(g);
    ASSERT_EQ(t.strata.size(), 1u);
    EXPECT_EQ(t.strata[0].kind, StratumKind::Theta);
    EXPECT_EQ(t.strata[0].dim, arithmetic_genus(g) - 1);

    // a cycle of rational curves cut open everywhere: no effective bundles
    auto cyc = enumerate_theta_strata(graphs::cycle(3));
    for (const auto& s : cyc.strata) {
        if (s.node_subset.size() == 3) EXPECT_TRUE(s.empty());
        else EXPECT_EQ(s.dim, arithmetic_genus(graphs::cycle(3)) - static_cast<int>(s.node_subset.size()) +
                                  s.components - 2);
    }
}

TEST(ThetaStrata, TopStrataHaveDimensionGenusMinusOne) {
    theta_strata::family::for_each_connected_graph(3, 4, 1, [](const DualGraph& g) {
        const int genus = arithmetic_genus(g);
        auto t = enumerate_theta_strata(g);
        EdgeSet sep = bridges(g);
        for (const auto& s : t.strata) {
            ASSERT_LE(s.dim, genus - 1);
            if (s.node_subset == sep && genus >= 1) ASSERT_EQ(s.dim, genus - 1);
        }
    });
}

TEST(Irreducible, Picard) {
    EXPECT_TRUE(is_picard_irreducible(graphs::rose(3, 1)));
    EXPECT_TRUE(is_picard_irreducible(graphs::cycle(5)));
    EXPECT_FALSE(is_picard_irreducible(graphs::banana(3)));
    EXPECT_TRUE(is_picard_irreducible(graphs::path(3, 1)));
}

TEST(Irreducible, Theta) {
    EXPECT_TRUE(is_theta_irreducible(graphs::rose(2)));
    EXPECT_FALSE(is_theta_irreducible(graphs::banana(1, 1, 1)));
    EXPECT_TRUE(is_theta_irreducible(graphs::banana(2)));
    EXPECT_FALSE(is_theta_irreducible(graphs::banana(3)));
}

TEST(Irreducible, BlockRouteMatchesCountOnFamily) {
    theta_strata::family::for_each_connected_graph(4, 5, 1, [](const DualGraph& g) {
        auto p = picard_irreducibility(g);
        ASSERT_EQ(p.by_blocks, p.by_count);
        auto t = theta_irreducibility(g);
        ASSERT_EQ(t.by_blocks, t.by_count);
    });
}

// Two 2-cycles sharing a vertex: one stable multidegree although the middle
// component meets the rest in four points.
TEST(Irreducible, ValencyRuleMissesChainedCycles) {
    DualGraph g{{0, 0, 0}, {{0, 1}, {0, 1}, {1, 2}, {1, 2}}};
    EXPECT_EQ(enumerate_stable(g), (std::vector<Multidegree>{{0, 1, 0}}));
    auto r = picard_irreducibility(g);
    EXPECT_FALSE(r.by_valency);
    EXPECT_TRUE(r.by_count);
    EXPECT_TRUE(r.by_blocks);
    EXPECT_THROW(is_picard_irreducible(g), InvariantError);
    EXPECT_THROW(is_theta_irreducible(g), InvariantError);
}

TEST(IrreducibleCurve, Strata) {
    auto smooth = strata_irreducible_curve(graphs::rose(0, 3), 5);
    ASSERT_EQ(smooth.size(), 1u);
    EXPECT_EQ(smooth[0].dim, 3);
    EXPECT_EQ(smooth[0].degree, (Multidegree{5}));

    auto two = strata_irreducible_curve(graphs::rose(2, 1), 4);
    ASSERT_EQ(two.size(), 4u);
    for (const auto& s : two) {
        const int k = static_cast<int>(s.node_subset.size());
        EXPECT_EQ(s.degree, (Multidegree{4 - k}));
        EXPECT_EQ(s.dim, 3 - k);
    }
    EXPECT_THROW(strata_irreducible_curve(graphs::banana(2), 0), DomainError);
}

TEST(Dot, Emitter) {
    auto g = graphs::banana(3);
    auto dot = strata_to_dot(g, enumerate_picard_strata(g));
    EXPECT_NE(dot.find("digraph strata {"), std::string::npos);
    EXPECT_NE(dot.find("S={} d=(0,1) dim=2"), std::string::npos);
    EXPECT_NE(dot.find("->"), std::string::npos);
}
