#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>

#include "gtqw/graph_json.hpp"
#include "gtqw/graphs.hpp"
#include "gtqw/walks.hpp"

using namespace gtqw;

namespace {

std::vector<std::size_t> column_sizes(const GluedTreeGraph& g) {
    std::vector<std::size_t> sizes;
    for (const auto& c : g.columns()) {
        sizes.push_back(c.size());
    }
    return sizes;
}

}  // namespace

TEST(BuildGluedTree, SmallBinaryTreeHasExpectedColumns) {
    const auto g = build_glued_tree({2, 2, 1});
    EXPECT_EQ(g.node_count(), 14u);
    EXPECT_EQ(column_sizes(g), (std::vector<std::size_t>{1, 2, 4, 4, 2, 1}));
    EXPECT_EQ(g.entrance, 0u);
    EXPECT_EQ(g.exit, 13u);
    EXPECT_TRUE(validate_gluing(g).passed());
}

TEST(BuildGluedTree, DepthOneGluingIsComplete) {
    const auto g = build_glued_tree({2, 1, 7});
    EXPECT_EQ(g.node_count(), 6u);
    // Left leaves 1,2; right leaves 3,4: K_{2,2}.
    std::set<Edge> glue;
    for (const auto& e : g.edges) {
        if (g.column[e.first] == 1 && g.column[e.second] == 2) {
            glue.insert(e);
        }
    }
    EXPECT_EQ(glue, (std::set<Edge>{{1, 3}, {1, 4}, {2, 3}, {2, 4}}));
}

TEST(BuildGluedTree, TernaryTreeGlueHasDistinctNeighbors) {
    const auto g = build_glued_tree({3, 2, 0});
    EXPECT_EQ(g.node_count(), 26u);
    std::map<NodeId, std::set<NodeId>> glue;
    for (const auto& [a, b] : g.edges) {
        if (g.column[a] == 2 && g.column[b] == 3) {
            glue[a].insert(b);
        }
    }
    EXPECT_EQ(glue.size(), 9u);
    for (const auto& [leaf, nbrs] : glue) {
        EXPECT_EQ(nbrs.size(), 3u) << "leaf " << leaf;
    }
    EXPECT_TRUE(validate_gluing(g).passed());
}

TEST(BuildGluedTree, RejectsDegenerateParameters) {
    EXPECT_THROW(build_glued_tree({1, 2, 0}), ParameterError);
    EXPECT_THROW(build_glued_tree({2, 0, 0}), ParameterError);
    EXPECT_THROW(build_glued_tree({-3, 2, 0}), ParameterError);
}

TEST(BuildGluedTree, SameSeedSameGraphDifferentSeedDifferentGlue) {
    const auto a = build_glued_tree({2, 4, 11});
    const auto b = build_glued_tree({2, 4, 11});
    const auto c = build_glued_tree({2, 4, 12});
    EXPECT_EQ(a.edges, b.edges);
    EXPECT_NE(a.edges, c.edges);
}

TEST(BuildGluedTree, HighBranchingRatesProduceSimpleGluings) {
    // Plain configuration-model rejection would almost never succeed here.
    for (int B : {5, 7, 10}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto g = build_glued_tree({B, 2, seed});
            const auto report = validate_gluing(g);
            EXPECT_TRUE(report.passed()) << "B=" << B << " seed=" << seed;
        }
    }
    EXPECT_TRUE(validate_gluing(build_glued_tree({10, 1, 3})).passed());
}

TEST(BuildGluedTree, NodeCountMatchesClosedForm) {
    for (int B = 2; B <= 5; ++B) {
        for (int n = 1; n <= 4; ++n) {
            const auto g = build_glued_tree({B, n, 42});
            const std::uint64_t expect = 2 * (static_cast<std::uint64_t>(std::pow(B, n + 1)) - 1) / (B - 1);
            EXPECT_EQ(g.node_count(), expect);
            EXPECT_EQ(glued_tree_node_count(B, n), expect);
        }
    }
}

TEST(ValidateGluing, FlagsDuplicatedGlueEdge) {
    auto g = build_glued_tree({2, 2, 1});
    const auto glue = std::find_if(g.edges.begin(), g.edges.end(),
                                   [&](const Edge& e) { return g.column[e.first] == 2 && g.column[e.second] == 3; });
    ASSERT_NE(glue, g.edges.end());
    g.edges.push_back(*glue);
    const auto report = validate_gluing(g);
    EXPECT_FALSE(report.passed());
    EXPECT_TRUE(report.has("parallel edge"));
}

TEST(ValidateGluing, FlagsGlueDegreeDeficit) {
    auto g = build_glued_tree({3, 2, 5});
    const auto glue = std::find_if(g.edges.begin(), g.edges.end(),
                                   [&](const Edge& e) { return g.column[e.first] == 2 && g.column[e.second] == 3; });
    const NodeId leaf = glue->first;
    g.edges.erase(glue);
    const auto report = validate_gluing(g);
    EXPECT_FALSE(report.passed());
    ASSERT_TRUE(report.has("glue degree"));
    bool named = false;
    for (const auto& v : report.violations) {
        if (v.kind == "glue degree" && std::find(v.nodes.begin(), v.nodes.end(), leaf) != v.nodes.end()) {
            named = true;
        }
    }
    EXPECT_TRUE(named);
}

TEST(ValidateGluing, FlagsNonAdjacentColumnEdgeAndBadEndpoints) {
    auto g = build_glued_tree({2, 2, 1});
    g.edges.push_back({0, 13});
    g.exit = 3;
    const auto report = validate_gluing(g);
    EXPECT_TRUE(report.has("column adjacency"));
    EXPECT_TRUE(report.has("exit"));
}

TEST(ValidateGluing, ReportsInsteadOfThrowing) {
    GluedTreeGraph g;
    g.branching = 2;
    g.depth = 2;
    g.column = {0, 1, 1};
    g.edges = {{0, 1}, {0, 7}};
    ValidationReport report;
    EXPECT_NO_THROW(report = validate_gluing(g));
    EXPECT_TRUE(report.has("node count"));
    EXPECT_TRUE(report.has("edge range"));
}

TEST(ReduceToChain, BinaryDepthTwo) {
    const auto h = reduce_to_chain(2, 2, 1.0);
    const double r2 = std::sqrt(2.0);
    ASSERT_EQ(h.size(), 6u);
    const std::vector<double> expect{r2, r2, 2.0, r2, r2};
    for (std::size_t i = 0; i < expect.size(); ++i) {
        EXPECT_DOUBLE_EQ(h.off_diagonal[i], expect[i]);
    }
    for (double d : h.diagonal) {
        EXPECT_EQ(d, 0.0);
    }
}

TEST(ReduceToChain, DirectSubstitution) {
    const auto h4 = reduce_to_chain(4, 1, 1.0);
    EXPECT_EQ(h4.off_diagonal, (std::vector<double>{2.0, 4.0, 2.0}));
    const auto h3 = reduce_to_chain(3, 3, 0.5);
    const double s = std::sqrt(3.0) * 0.5;
    EXPECT_EQ(h3.off_diagonal, (std::vector<double>{s, s, s, 1.5, s, s, s}));
}

TEST(ReduceToChain, RejectsInvalidInput) {
    EXPECT_THROW(reduce_to_chain(1, 2, 1.0), ParameterError);
    EXPECT_THROW(reduce_to_chain(2, 0, 1.0), ParameterError);
    EXPECT_THROW(reduce_to_chain(2, 2, 0.0), ParameterError);
    EXPECT_THROW(reduce_to_chain(2, 2, -1.0), ParameterError);
}

TEST(ColumnProject, IndicatorAndUniformStates) {
    const auto g = build_glued_tree({2, 2, 1});
    std::vector<std::complex<double>> amp(g.node_count(), 0.0);
    amp[g.entrance] = 1.0;
    auto proj = column_project(g, amp);
    EXPECT_EQ(proj[0], std::complex<double>(1.0));
    for (std::size_t j = 1; j < proj.size(); ++j) {
        EXPECT_EQ(proj[j], std::complex<double>(0.0));
    }

    std::fill(amp.begin(), amp.end(), 0.0);
    amp[1] = amp[2] = 1.0 / std::sqrt(2.0);
    proj = column_project(g, amp);
    EXPECT_NEAR(std::abs(proj[1] - 1.0), 0.0, 1e-15);

    amp[2] = -1.0 / std::sqrt(2.0);
    proj = column_project(g, amp);
    EXPECT_NEAR(std::abs(proj[1]), 0.0, 1e-15);

    EXPECT_THROW(column_project(g, std::vector<std::complex<double>>(3)), ParameterError);
}

// A |col j> = sqrt(B)(|col j-1> + |col j+1>) off-center, with coefficient B
// across the glue, checked on the explicit adjacency matrix.
TEST(ColumnProject, AdjacencyActionReproducesChainCouplings) {
    for (int B : {2, 3, 4}) {
        for (int n : {1, 2, 3}) {
            for (std::uint64_t seed : {0u, 9u}) {
                const auto g = build_glued_tree({B, n, seed});
                const auto A = adjacency_matrix(g);
                const auto chain = reduce_to_chain(B, n, 1.0);
                const auto cols = g.columns();
                const std::size_t m = cols.size();
                for (std::size_t j = 0; j < m; ++j) {
                    std::vector<std::complex<double>> v(g.node_count(), 0.0), Av(g.node_count());
                    for (NodeId a : cols[j]) {
                        v[a] = 1.0 / std::sqrt(static_cast<double>(cols[j].size()));
                    }
                    A.apply<std::complex<double>>(v, Av);
                    // Av must lie in the column subspace with the chain coefficients.
                    const auto coeff = column_project(g, Av);
                    double residual = 0.0;
                    for (std::size_t a = 0; a < g.node_count(); ++a) {
                        const auto c = static_cast<std::size_t>(g.column[a]);
                        residual = std::max(residual,
                                            std::abs(Av[a] - coeff[c] / std::sqrt(static_cast<double>(cols[c].size()))));
                    }
                    EXPECT_LT(residual, 1e-12);
                    for (std::size_t k = 0; k < m; ++k) {
                        double expect = 0.0;
                        if (k + 1 == j) expect = chain.off_diagonal[k];
                        if (k == j + 1) expect = chain.off_diagonal[j];
                        EXPECT_NEAR(coeff[k].real(), expect, 1e-12) << "B=" << B << " n=" << n << " j=" << j;
                        EXPECT_NEAR(coeff[k].imag(), 0.0, 1e-12);
                    }
                }
            }
        }
    }
}

TEST(GraphJson, RoundTripIsStable) {
    const auto g = build_glued_tree({3, 2, 77});
    const auto j = graph_to_json(g);
    EXPECT_EQ(j.at("nodes").size(), 26u);
    EXPECT_EQ(j.at("entrance"), 0);
    EXPECT_EQ(j.at("exit"), 25);
    const auto back = graph_from_json(j);
    EXPECT_EQ(back.column, g.column);
    EXPECT_EQ(back.edges, g.edges);
    EXPECT_EQ(back.seed, g.seed);
    EXPECT_EQ(graph_to_json(back).dump(), j.dump());
    EXPECT_TRUE(validate_gluing(back).passed());
}

TEST(GraphJson, MalformedInputIsAnIoError) {
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"B":2})")), IoError);
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                     R"({"B":2,"n":1,"seed":0,"nodes":[{"id":5,"column":0}],"edges":[],"entrance":0,"exit":0})")),
                 IoError);
}
