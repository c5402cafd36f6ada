#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "vcsp/bit_matrix.hpp"

using vcsp::BitMatrix;
using vcsp::LabelSet;
using vcsp::Side;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, int r, int c, double p) {
  std::bernoulli_distribution coin(p);
  BitMatrix m(r, c);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < c; ++b) m.set(a, b, coin(rng));
  return m;
}

}  // namespace

TEST(LabelSet, Basics) {
  LabelSet s(5);
  EXPECT_TRUE(s.empty());
  s.insert(1);
  s.insert(3);
  EXPECT_EQ(s.count(), 2);
  EXPECT_EQ(s.labels(), (std::vector<vcsp::Label>{1, 3}));
  EXPECT_EQ(s.to_bit_string(), "01010");
  EXPECT_EQ(s.complement().labels(), (std::vector<vcsp::Label>{0, 2, 4}));
  EXPECT_EQ(s.first(), 1);
  EXPECT_THROW(LabelSet(65), vcsp::UsageError);
  EXPECT_EQ(LabelSet::full(64).count(), 64);
}

TEST(Image, EmptySetGivesEmptyImage) {
  auto r = BitMatrix::full(3, 4);
  EXPECT_TRUE(image(r, LabelSet(3), Side::forward).empty());
  EXPECT_TRUE(image(r, LabelSet(4), Side::backward).empty());
}

TEST(Image, FullProductGivesFullDomain) {
  auto r = BitMatrix::full(3, 4);
  EXPECT_EQ(image(r, LabelSet::single(3, 2), Side::forward), LabelSet::full(4));
}

TEST(Image, SwapRelation) {
  BitMatrix r(2, 2);
  r.set(0, 1);
  r.set(1, 0);
  EXPECT_EQ(image(r, LabelSet::single(2, 0), Side::forward), LabelSet::single(2, 1));
  EXPECT_EQ(image(r, LabelSet::single(2, 0), Side::backward), LabelSet::single(2, 1));
}

TEST(Image, MatchesSetOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto r = random_matrix(rng, 4, 5, 0.4);
    LabelSet x(4, rng() & 0xF);
    LabelSet y(5, rng() & 0x1F);
    auto rel = oracle::to_rel(r);
    EXPECT_EQ(oracle::to_set(image(r, x, Side::forward)), oracle::forward(rel, oracle::to_set(x)));
    EXPECT_EQ(oracle::to_set(image(r, y, Side::backward)), oracle::backward(rel, oracle::to_set(y)));
  }
}

TEST(Compose, IdentityAndEmpty) {
  std::mt19937_64 rng(3);
  auto r = random_matrix(rng, 3, 4, 0.5);
  EXPECT_EQ(compose(r, BitMatrix::identity(4)), r);
  EXPECT_EQ(compose(BitMatrix(3, 3), BitMatrix::full(3, 4)), BitMatrix(3, 4));
  EXPECT_THROW(compose(r, BitMatrix::full(3, 3)), vcsp::UsageError);
}

TEST(Compose, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    auto r = random_matrix(rng, 3, 3, 0.4);
    auto s = random_matrix(rng, 3, 3, 0.4);
    EXPECT_EQ(oracle::to_rel(compose(r, s)), oracle::compose(oracle::to_rel(r), oracle::to_rel(s)));
  }
}

TEST(BitMatrix, TransposeAndSupports) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    auto r = random_matrix(rng, 3, 5, 0.3);
    auto tr = r.transpose();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 5; ++b) EXPECT_EQ(r.test(a, b), tr.test(b, a));
    EXPECT_EQ(tr.transpose(), r);
    EXPECT_EQ(r.row_support(), tr.column_support());
    EXPECT_EQ(r.count(), tr.count());
  }
  auto p = BitMatrix::product(LabelSet(3, 0b101), LabelSet(2, 0b10));
  EXPECT_EQ(p.to_bit_string(), "01 00 01");
}
