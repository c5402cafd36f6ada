#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using vcsp::Cost;
using vcsp::Rational;
using Net = vcsp::FlowNetwork<Rational>;

TEST(MaxFlow, SimpleDiamond) {
  Net g;
  for (int i = 0; i < 4; ++i) g.add_node();
  g.add_edge(0, 1, Cost(3));
  g.add_edge(0, 2, Cost(2));
  g.add_edge(1, 2, Cost(5));
  g.add_edge(1, 3, Cost(2));
  g.add_edge(2, 3, Cost(3));
  EXPECT_EQ(g.max_flow(0, 3), Cost(5));
  auto side = g.source_side(0);
  EXPECT_EQ(g.cut_value(side), Cost(5));
  EXPECT_TRUE(side[0]);
  EXPECT_FALSE(side[3]);
}

TEST(MaxFlow, InfinitePathIsInfinite) {
  Net g;
  for (int i = 0; i < 3; ++i) g.add_node();
  g.add_edge(0, 1, Cost::infinity());
  g.add_edge(1, 2, Cost::infinity());
  EXPECT_TRUE(g.max_flow(0, 2).is_infinite());
}

TEST(MaxFlow, InfiniteEdgesAreNeverCut) {
  Net g;
  for (int i = 0; i < 4; ++i) g.add_node();
  g.add_edge(0, 1, Cost(4));
  g.add_edge(1, 2, Cost::infinity());
  g.add_edge(2, 3, Cost(Rational(7, 2)));
  g.add_edge(0, 2, Cost(1));
  EXPECT_EQ(g.max_flow(0, 3), Cost(Rational(7, 2)));
  auto side = g.source_side(0);
  EXPECT_TRUE(side[1] && side[2]);
}

TEST(MaxFlow, ZeroCapacityAndSelfLoopsIgnored) {
  Net g;
  g.add_node();
  g.add_node();
  g.add_edge(0, 1, Cost(0));
  g.add_edge(0, 0, Cost(5));
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.max_flow(0, 1), Cost(0));
  EXPECT_THROW(g.max_flow(0, 0), vcsp::UsageError);
  EXPECT_THROW(g.add_edge(0, 9, Cost(1)), vcsp::UsageError);
}

TEST(MaxFlow, MatchesCutEnumeration) {
  testgen::Rng rng(300);
  for (int t = 0; t < 300; ++t) {
    const int n = testgen::uniform(rng, 2, 9);
    Net g;
    for (int i = 0; i < n; ++i) g.add_node();
    const int m = testgen::uniform(rng, 0, 3 * n);
    for (int e = 0; e < m; ++e) {
      int u = testgen::uniform(rng, 0, n - 1), v = testgen::uniform(rng, 0, n - 1);
      Cost c = testgen::coin(rng, 0.1) ? Cost::infinity() : Cost(Rational(testgen::uniform(rng, 0, 12), testgen::uniform(rng, 1, 3)));
      g.add_edge(u, v, c);
    }
    auto expected = oracle::min_cut_by_enumeration(g, 0, n - 1);
    auto flow = g.max_flow(0, n - 1);
    EXPECT_EQ(flow, expected);
    if (flow.is_finite()) {
      EXPECT_EQ(g.cut_value(g.source_side(0)), flow);
    }
  }
}

TEST(MaxFlow, FloatingCapacities) {
  vcsp::FlowNetwork<double> g;
  for (int i = 0; i < 3; ++i) g.add_node();
  g.add_edge(0, 1, vcsp::FloatCost(0.1));
  g.add_edge(0, 1, vcsp::FloatCost(0.2));
  g.add_edge(1, 2, vcsp::FloatCost(1.0));
  EXPECT_TRUE(vcsp::cost_eq(g.max_flow(0, 2), vcsp::FloatCost(0.3)));
}
