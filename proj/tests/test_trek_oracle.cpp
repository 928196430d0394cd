#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace rankcut;
using namespace rankcut::testing;

namespace {

NodeSet ids(const Dag& g, std::initializer_list<const char*> names) {
    NodeSet s;
    for (auto n : names) s.insert(g.index_of(n));
    return s;
}

void expect_valid_witness(const Dag& g, const NodeSet& a, const NodeSet& b, const RankResult& r) {
    EXPECT_TRUE(t_separates(g, a, b, r.cut_c, r.cut_d));
    EXPECT_EQ(r.cut_c.size() + r.cut_d.size(), r.cut_size);
}

// Maximum number of internally vertex-disjoint s->t paths, by exhaustive search over simple paths.
std::size_t path_packing(const std::vector<std::vector<bool>>& adj, std::size_t s, std::size_t t) {
    const std::size_t n = adj.size();
    std::vector<std::uint64_t> paths;  // interior vertex masks
    std::vector<bool> on(n, false);
    std::uint64_t mask = 0;
    bool direct = false;
    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        for (std::size_t w = 0; w < n; ++w) {
            if (!adj[v][w] || on[w]) continue;
            if (w == t) {
                if (v == s) {
                    direct = true;
                } else {
                    paths.push_back(mask);
                }
                continue;
            }
            if (w == s) continue;
            on[w] = true;
            mask |= std::uint64_t{1} << w;
            dfs(w);
            mask &= ~(std::uint64_t{1} << w);
            on[w] = false;
        }
    };
    on[s] = true;
    dfs(s);
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    std::size_t best = 0;
    std::function<void(std::size_t, std::uint64_t, std::size_t)> pick = [&](std::size_t i, std::uint64_t used,
                                                                            std::size_t count) {
        best = std::max(best, count);
        for (std::size_t j = i; j < paths.size(); ++j) {
            if ((paths[j] & used) == 0) pick(j + 1, used | paths[j], count + 1);
        }
    };
    pick(0, 0, 0);
    return best + (direct ? 1 : 0);
}

}  // namespace

TEST(TSeparation, TetradLatentSeparates) {
    auto g = tetrad_graph();
    const auto a = ids(g, {"X1", "X2"}), b = ids(g, {"X3", "X4"}), l = ids(g, {"L"});
    EXPECT_TRUE(t_separates(g, a, b, {}, l));
    EXPECT_TRUE(t_separates(g, a, b, l, {}));
    EXPECT_FALSE(t_separates(g, a, b, {}, {}));
}

TEST(TSeparation, CuttingBothSidesAlwaysSeparates) {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        auto g = random_dag(7, 0.4, rng);
        auto a = random_subset(7, 3, rng), b = random_subset(7, 3, rng);
        EXPECT_TRUE(t_separates(g, a, b, a, b));
    }
}

TEST(TSeparation, InverseTetradResponseOnBothSides) {
    auto aug = augment(independent_four(), inverse_tetrad_selection());
    const auto& g = aug.graph;
    const auto y = ids(g, {"Y"});
    EXPECT_TRUE(t_separates(g, ids(g, {"X1", "X2", "Y"}), ids(g, {"X3", "X4", "Y"}), y, y));
    EXPECT_FALSE(t_separates(g, ids(g, {"X1", "X2", "Y"}), ids(g, {"X3", "X4", "Y"}), y, {}));
}

TEST(MinTsep, TetradQueries) {
    auto g = tetrad_graph();
    for (auto [a, b] : {std::pair{ids(g, {"X1", "X2"}), ids(g, {"X3", "X4"})},
                        std::pair{ids(g, {"X1", "X3"}), ids(g, {"X2", "X4"})},
                        std::pair{ids(g, {"X1", "X4"}), ids(g, {"X2", "X3"})}}) {
        auto r = min_tsep(g, a, b);
        EXPECT_EQ(r.rank, 1u);
        expect_valid_witness(g, a, b, r);
        EXPECT_EQ(set_union(r.cut_c, r.cut_d), ids(g, {"L"}));
        EXPECT_EQ(min_tsep_bruteforce(g, a, b, 4).rank, 1u);
    }
}

TEST(MinTsep, TrivialCases) {
    auto one = DagBuilder().node("V").build();
    EXPECT_EQ(min_tsep(one, {0}, {0}).rank, 1u);
    auto edge = DagBuilder().node("X1").node("X2").edge("X1", "X2").build();
    EXPECT_EQ(min_tsep(edge, {0}, {1}).rank, 1u);
    EXPECT_EQ(min_tsep_bruteforce(edge, {0}, {1}, 3).rank, 1u);
    auto apart = DagBuilder().node("X1").node("X2").node("X3").edge("X1", "X2").build();
    auto r = min_tsep(apart, {0, 1}, {2});
    EXPECT_EQ(r.rank, 0u);
    EXPECT_TRUE(r.cut_c.empty() && r.cut_d.empty());
    EXPECT_THROW(min_tsep(apart, {}, {2}), InputError);
}

TEST(MinTsep, BoundedByQuerySizes) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        auto g = random_dag(8, 0.5, rng);
        auto a = random_subset(8, 2, rng), b = random_subset(8, 3, rng);
        EXPECT_LE(min_tsep(g, a, b).rank, 2u);
    }
}

TEST(MinTsep, BruteforceBoundExceededReturnsTrivialCut) {
    auto g = tetrad_graph();
    const auto a = ids(g, {"X1", "X2"}), b = ids(g, {"X1", "X2", "X3"});
    auto r = min_tsep_bruteforce(g, a, b, 1);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(r.cut_c, a);
    EXPECT_TRUE(t_separates(g, a, b, r.cut_c, r.cut_d));
}

TEST(MinTsep, BruteforcePicksLexicographicallySmallestWitness) {
    auto g = tetrad_graph();
    auto r = min_tsep_bruteforce(g, ids(g, {"X1", "X2"}), ids(g, {"X3", "X4"}), 4);
    EXPECT_TRUE(r.cut_c.empty());
    EXPECT_EQ(r.cut_d, ids(g, {"L"}));
}

TEST(MinTsep, AgreesWithBruteforceOnExhaustiveTwoByTwoQueries) {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 40; ++rep) {
        auto g = random_dag(6, 0.4, rng);
        for (std::size_t a0 = 0; a0 < 6; ++a0) {
            for (std::size_t a1 = a0 + 1; a1 < 6; ++a1) {
                for (std::size_t b0 = 0; b0 < 6; ++b0) {
                    for (std::size_t b1 = b0 + 1; b1 < 6; ++b1) {
                        NodeSet a{a0, a1}, b{b0, b1};
                        auto fast = min_tsep(g, a, b);
                        ASSERT_EQ(fast.rank, min_tsep_bruteforce(g, a, b, 4).rank);
                        expect_valid_witness(g, a, b, fast);
                    }
                }
            }
        }
    }
}

TEST(MaxFlow, DisjointPathsAndBottleneck) {
    FlowNetwork two(4, 0, 3);
    two.add_arc(0, 1, 1);
    two.add_arc(0, 2, 1);
    two.add_arc(1, 3, 1);
    two.add_arc(2, 3, 1);
    EXPECT_EQ(max_flow(two).value, 2);

    FlowNetwork neck(6, 0, 5);
    neck.add_arc(0, 1, 5);
    neck.add_arc(0, 2, 5);
    neck.add_arc(1, 3, 5);
    neck.add_arc(2, 3, 5);
    neck.add_arc(3, 4, 1);
    neck.add_arc(4, 5, 5);
    auto r = max_flow(neck);
    EXPECT_EQ(r.value, 1);
    EXPECT_TRUE(r.source_side[3]);
    EXPECT_FALSE(r.source_side[4]);
}

TEST(MaxFlow, MatchesPathPackingOracle) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> size(4, 10);
    for (int rep = 0; rep < 150; ++rep) {
        const auto n = size(rng);
        std::bernoulli_distribution coin(0.35);
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) adj[u][v] = u != v && coin(rng);
        }
        // vertex v split into in = 2v, out = 2v+1; source s = out(0), sink t = in(n-1)
        FlowNetwork net(2 * n, 1, 2 * (n - 1));
        for (std::size_t v = 1; v + 1 < n; ++v) net.add_arc(2 * v, 2 * v + 1, 1);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (adj[u][v] && v != 0 && u != n - 1) net.add_arc(2 * u + 1, 2 * v, 1);
            }
        }
        EXPECT_EQ(static_cast<std::size_t>(max_flow(net).value), path_packing(adj, 0, n - 1)) << "rep " << rep;
    }
}

TEST(FlowNetwork, SizeOfTwoCopyConstruction) {
    auto g = tetrad_graph();
    auto net = build_flow_network(g, ids(g, {"X1", "X2"}), ids(g, {"X3", "X4"}));
    EXPECT_EQ(net.vertex_count(), 4 * g.size() + 2);
    EXPECT_EQ(max_flow(net).value, 1);
}

TEST(GraphicalRank, InverseTetrad) {
    auto cfg = inverse_tetrad_selection();
    for (auto [a, b] : {std::pair<std::vector<std::string>, std::vector<std::string>>{{"X1", "X2"}, {"X3", "X4"}},
                        {{"X1", "X3"}, {"X2", "X4"}},
                        {{"X1", "X4"}, {"X2", "X3"}}}) {
        auto r = graphical_rank(independent_four(), cfg, a, b);
        EXPECT_EQ(r.rank, 1u);
        EXPECT_EQ(r.cut_size, 2u);
        EXPECT_EQ(r.selection_count, 1u);
    }
}

TEST(GraphicalRank, EmptyConfigReducesToMinTsep) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 100; ++rep) {
        auto g = random_dag(8, 0.3, rng);
        auto a = random_subset(8, 3, rng), b = random_subset(8, 2, rng);
        EXPECT_EQ(graphical_rank(augment(g, {}), a, b).rank, min_tsep(g, a, b).rank);
    }
}

TEST(GraphicalRank, RejectsResponseNodesInQuery) {
    auto aug = augment(independent_four(), inverse_tetrad_selection());
    EXPECT_THROW(graphical_rank(aug, {0}, {aug.graph.index_of("Y")}), InputError);
}

TEST(GraphicalRank, SymmetricAndMonotone) {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 100; ++rep) {
        auto g = random_dag(8, 0.3, rng);
        SelectionConfig cfg;
        SelectionCondition c;
        for (auto v : random_subset(8, 2, rng)) c.targets.push_back(g.node(v).name);
        c.coeffs = {1.0, 1.0};
        c.noise = NoiseSpec::gaussian(1.0);
        c.admissible = AdmissibleSet::point(0.0);
        cfg.conditions.push_back(c);
        auto aug = augment(g, cfg);
        auto a1 = random_subset(8, 2, rng), b = random_subset(8, 3, rng);
        auto a2 = set_union(a1, random_subset(8, 2, rng));
        const auto r1 = graphical_rank(aug, a1, b).rank;
        EXPECT_EQ(r1, graphical_rank(aug, b, a1).rank);
        EXPECT_LE(r1, graphical_rank(aug, a2, b).rank);
        EXPECT_LE(r1, std::min(a1.size(), b.size()));
    }
}

TEST(GraphicalRank, DSeparationBridge) {
    std::mt19937_64 rng(123);
    for (int rep = 0; rep < 60; ++rep) {
        auto g = random_dag(6, 0.4, rng);
        for (std::size_t x = 0; x < 6; ++x) {
            for (std::size_t y = x + 1; y < 6; ++y) {
                for (std::uint32_t cm = 0; cm < 64; ++cm) {
                    if (cm & ((1u << x) | (1u << y))) continue;
                    NodeSet c;
                    for (std::size_t v = 0; v < 6; ++v) {
                        if (cm & (1u << v)) c.insert(v);
                    }
                    const bool dsep = d_separated(g, {x}, {y}, c);
                    const auto rank = min_tsep(g, set_union({x}, c), set_union({y}, c)).rank;
                    ASSERT_EQ(dsep, rank == c.size());
                }
            }
        }
    }
}

TEST(Spider, SeparatingCutsForTheLatentColumn) {
    auto g = spider(1);
    const auto aug = augment(g, {});
    NodeSet a, b, c;
    for (std::size_t i = 1; i <= 6; ++i) {
        a.insert(g.index_of("A" + std::to_string(i)));
        b.insert(g.index_of("B" + std::to_string(i)));
    }
    c = ids(g, {"C1", "C2"});
    auto r = min_tsep(g, a, b);
    EXPECT_EQ(r.rank, 4u);
    expect_valid_witness(g, a, b, r);
    EXPECT_TRUE(t_separates(g, a, b, c, c));
    EXPECT_EQ(min_tsep_bruteforce(g, a, b, 4).rank, 4u);
}

TEST(Spider, SelectionColumnRankOfAB) {
    const auto aug = augment(spider(2), {});
    EXPECT_EQ(aug.selection_count(), 1u);
    NodeSet a, b;
    for (std::size_t i = 1; i <= 6; ++i) {
        a.insert(aug.graph.index_of("A" + std::to_string(i)));
        b.insert(aug.graph.index_of("B" + std::to_string(i)));
    }
    auto r = graphical_rank(aug, a, b);
    EXPECT_EQ(r.rank, 5u);
    EXPECT_TRUE(t_separates(aug.graph, set_union(a, aug.responses), set_union(b, aug.responses), r.cut_c, r.cut_d));
}

TEST(Spider, AllCellsWithWideObservedGroups) {
    SpiderSizes wide;
    wide.a = wide.b = 12;
    for (int col = 1; col <= 4; ++col) {
        for (const auto& cell : spider_cells(col, wide)) {
            EXPECT_EQ(cell.actual, cell.expected) << "column " << col << " row " << cell.row;
        }
    }
}
