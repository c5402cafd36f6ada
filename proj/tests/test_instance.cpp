#include <gtest/gtest.h>

#include <cstdlib>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using vcsp::Cost;
using vcsp::CostTable;
using vcsp::DomainSpec;
using vcsp::Instance;
using vcsp::Tuple;

namespace {

CostTable<Cost> abs_diff() {
  return CostTable<Cost>::from_function({2, 2}, [](const Tuple& x) { return Cost(std::abs(x[0] - x[1])); });
}

CostTable<Cost> equality(int d) {
  return vcsp::crisp_table<Cost>({d, d}, [](const Tuple& x) { return x[0] == x[1]; });
}

CostTable<Cost> disequality(int d) {
  return vcsp::crisp_table<Cost>({d, d}, [](const Tuple& x) { return x[0] != x[1]; });
}

Instance<Cost> random_soft(testgen::Rng& rng, int v, int d, int terms) {
  Instance<Cost> inst(DomainSpec(std::vector<int>(static_cast<std::size_t>(v), d)));
  for (int t = 0; t < terms; ++t) {
    auto scope = testgen::random_scope(rng, v, testgen::uniform(rng, 1, std::min(3, v)));
    std::vector<int> sizes(scope.size(), d);
    inst.add_term(CostTable<Cost>::from_function(sizes, [&](const Tuple&) {
                    return testgen::coin(rng, 0.2) ? Cost::infinity() : Cost(testgen::uniform(rng, 0, 5));
                  }),
                  scope);
  }
  return inst;
}

}  // namespace

TEST(Evaluate, EmptyTermListIsZero) {
  Instance<Cost> inst(DomainSpec({2, 3}));
  EXPECT_EQ(vcsp::evaluate(inst, Tuple{1, 2}), Cost(0));
}

TEST(Evaluate, UnaryInfinity) {
  Instance<Cost> inst(DomainSpec({2}));
  CostTable<Cost> u({2});
  u.set(Tuple{1}, Cost::infinity());
  inst.add_term(u, {0});
  EXPECT_TRUE(vcsp::evaluate(inst, Tuple{1}).is_infinite());
  EXPECT_EQ(vcsp::evaluate(inst, Tuple{0}), Cost(0));
}

TEST(Evaluate, TwoAbsDiffTerms) {
  Instance<Cost> inst(DomainSpec({2, 2, 2}));
  inst.add_term(abs_diff(), {0, 1});
  inst.add_term(abs_diff(), {1, 2});
  EXPECT_EQ(vcsp::evaluate(inst, Tuple{0, 1, 0}), Cost(2));
  EXPECT_EQ(vcsp::evaluate(inst, Tuple{0, 1, 0}), oracle::cost(inst, Tuple{0, 1, 0}));
}

TEST(Evaluate, ShapeErrors) {
  Instance<Cost> inst(DomainSpec({2, 2}));
  EXPECT_THROW(vcsp::evaluate(inst, Tuple{0}), vcsp::UsageError);
  EXPECT_THROW(vcsp::evaluate(inst, Tuple{0, 2}), vcsp::UsageError);
  EXPECT_THROW(inst.add_term(abs_diff(), {0}), vcsp::UsageError);
  EXPECT_THROW(inst.add_term(abs_diff(), {0, 2}), vcsp::UsageError);
  EXPECT_THROW(inst.add_term(CostTable<Cost>({3, 2}), {0, 1}), vcsp::UsageError);
  EXPECT_THROW(DomainSpec({2, 0}), vcsp::UsageError);
}

TEST(Feasible, NoInfinityMeansEverything) {
  Instance<Cost> inst(DomainSpec({2, 2}));
  inst.add_term(abs_diff(), {0, 1});
  EXPECT_EQ(vcsp::feasible_assignments(inst).size(), 4u);
}

TEST(Feasible, EqualityRelation) {
  Instance<Cost> inst(DomainSpec({2, 2}));
  inst.add_term(equality(2), {0, 1});
  EXPECT_EQ(vcsp::feasible_assignments(inst), (std::vector<Tuple>{{0, 0}, {1, 1}}));
}

TEST(Feasible, MatchesFilterOracle) {
  testgen::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_soft(rng, 3, 3, 4);
    std::vector<Tuple> expected;
    oracle::each_assignment(inst.domains(), [&](const Tuple& x) {
      if (oracle::cost(inst, x).is_finite()) expected.push_back(x);
    });
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(vcsp::feasible_assignments(inst), expected);
  }
}

TEST(Feasible, CapRefusesWithSizeReport) {
  Instance<Cost> inst(DomainSpec(std::vector<int>(10, 4)));
  try {
    vcsp::feasible_assignments(inst, 1000);
    FAIL() << "cap not enforced";
  } catch (const vcsp::CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("1048576"), std::string::npos) << e.what();
  }
}

TEST(Project, InfeasibleGivesEmpty) {
  Instance<Cost> inst(DomainSpec({2, 2}));
  inst.add_term(CostTable<Cost>({2}, Cost::infinity()), {1});
  EXPECT_TRUE(vcsp::project(inst, 0).empty());
  EXPECT_TRUE(vcsp::project(inst, 0, 1).empty());
}

TEST(Project, EqualityOntoOneVariable) {
  Instance<Cost> inst(DomainSpec({2, 2}));
  inst.add_term(equality(2), {0, 1});
  EXPECT_EQ(vcsp::project(inst, 0), vcsp::LabelSet::full(2));
}

TEST(Project, ChainOfDisequalities) {
  Instance<Cost> inst(DomainSpec({2, 2, 2}));
  inst.add_term(disequality(2), {0, 1});
  inst.add_term(disequality(2), {1, 2});
  auto p = oracle::project(inst);
  EXPECT_EQ(oracle::to_rel(vcsp::project(inst, 0, 2)), p.binary.at({0, 2}));
  EXPECT_EQ(oracle::to_rel(vcsp::project(inst, 0, 2)), (oracle::Rel{{0, 0}, {1, 1}}));
}

TEST(Project, SymmetricAndMatchesOracle) {
  testgen::Rng rng(33);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_soft(rng, 4, 3, 5);
    auto p = oracle::project(inst);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(oracle::to_set(vcsp::project(inst, i)), p.unary[static_cast<std::size_t>(i)]);
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        auto r = vcsp::project(inst, i, j);
        EXPECT_EQ(r.transpose(), vcsp::project(inst, j, i));
        EXPECT_EQ(oracle::to_rel(r), p.binary.at({i, j}));
      }
    }
  }
}

TEST(Properties, AddingATermNeverDecreasesCost) {
  testgen::Rng rng(44);
  for (int t = 0; t < 40; ++t) {
    auto inst = random_soft(rng, 3, 3, 3);
    auto more = inst;
    auto extra = random_soft(rng, 3, 3, 1);
    more.add_term(extra.terms()[0].table, extra.terms()[0].scope);
    oracle::each_assignment(inst.domains(), [&](const Tuple& x) {
      EXPECT_TRUE(vcsp::cost_leq(vcsp::evaluate(inst, x), vcsp::evaluate(more, x)));
    });
  }
}

TEST(Properties, MinOverFeasibleIsGlobalMin) {
  testgen::Rng rng(45);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_soft(rng, 4, 3, 5);
    Cost best = Cost::infinity();
    for (const auto& x : vcsp::feasible_assignments(inst)) best = std::min(best, vcsp::evaluate(inst, x));
    EXPECT_EQ(best, oracle::minimum(inst).optimum);
  }
}

TEST(Canonicalize, RepeatedVariablesBecomeDiagonal) {
  Instance<Cost> inst(DomainSpec({3, 2}));
  auto f = CostTable<Cost>::from_function({3, 2, 3}, [](const Tuple& x) { return Cost(x[0] * 4 + x[1] * 2 + x[2]); });
  inst.add_term(f, {0, 1, 0});
  auto canon = vcsp::canonicalize_scopes(inst);
  ASSERT_EQ(canon.terms().size(), 1u);
  EXPECT_EQ(canon.terms()[0].scope, (std::vector<int>{0, 1}));
  oracle::each_assignment(inst.domains(), [&](const Tuple& x) {
    EXPECT_EQ(vcsp::evaluate(inst, x), vcsp::evaluate(canon, x));
  });
}
