#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "psyn/cube.hpp"
#include "psyn/error.hpp"
#include "test_helpers.hpp"

using namespace psyn;
using psyn::test::random_dataset;

TEST(Walsh, Examples) {
  const CubePoint x{+1, -1, +1};
  EXPECT_EQ(walsh_eval(WalshIndex{}, x), 1);
  EXPECT_EQ(walsh_eval(WalshIndex{0}, x), 1);
  EXPECT_EQ(walsh_eval(WalshIndex{0, 1}, x), -1);
}

TEST(Walsh, OutOfRangeIsConfigError) {
  const CubePoint x{+1, -1, +1};
  EXPECT_THROW(walsh_eval(WalshIndex{3}, x), ConfigError);
  EXPECT_THROW(WalshIndex({2, 1}), ConfigError);
  EXPECT_THROW(WalshIndex({1, 1}), ConfigError);
}

TEST(Walsh, CharacterPropertyUnderSymmetricDifference) {
  const std::size_t p = 6;
  const auto index = enumerate_low_degree(p, 3);
  const auto x = random_dataset(p, 20, 3);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (const auto& j : index)
      for (const auto& k : index)
        ASSERT_EQ(walsh_eval(j, x.row(i)) * walsh_eval(k, x.row(i)),
                  walsh_eval(symmetric_difference(j, k), x.row(i)));
}

TEST(CubePointTest, RejectsNonSigns) {
  EXPECT_THROW(CubePoint({1, 0}), InputError);
  Dataset x(2);
  EXPECT_THROW(x.push_back(CubePoint{1, 1, 1}), InputError);
}

TEST(LowDegree, Counts) {
  EXPECT_EQ(enumerate_low_degree(4, 2).size(), 11U);
  EXPECT_EQ(count_low_degree(4, 2), 11U);
  const auto zero = enumerate_low_degree(5, 0);
  ASSERT_EQ(zero.size(), 1U);
  EXPECT_TRUE(zero[0].empty());
  EXPECT_EQ(enumerate_low_degree(3, 3).size(), 8U);
  EXPECT_EQ(count_low_degree(8, 2), 37U);
  EXPECT_EQ(count_low_degree(10, 2), 56U);
  EXPECT_THROW(enumerate_low_degree(3, 4), ConfigError);
}

TEST(LowDegree, CanonicalOrderAndDeterminism) {
  const auto a = enumerate_low_degree(7, 3);
  EXPECT_EQ(a, enumerate_low_degree(7, 3));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<WalshIndex>(a.begin(), a.end()).size(), a.size());
  EXPECT_EQ(a[1], (WalshIndex{0}));
  EXPECT_EQ(a[8], (WalshIndex{0, 1}));
}

TEST(LowDegree, PositionInvertsEnumeration) {
  for (std::size_t p : {1U, 4U, 9U}) {
    const auto a = enumerate_low_degree(p, std::min<std::size_t>(p, 4));
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(low_degree_position(p, a[i]), i);
  }
}

TEST(Fourier, ConstantDataset) {
  Dataset x(4);
  for (int i = 0; i < 5; ++i) x.push_back(CubePoint{1, 1, 1, 1});
  const auto b = fourier_of_dataset(x, 3);
  for (double v : b.coeffs) EXPECT_EQ(v, 1.0);
}

TEST(Fourier, SymmetricPair) {
  const Dataset x(2, {{+1, +1}, {-1, -1}});
  const auto b = fourier_of_dataset(x, 2);
  EXPECT_EQ(b.at({}), 1.0);
  EXPECT_EQ(b.at({0}), 0.0);
  EXPECT_EQ(b.at({1}), 0.0);
  EXPECT_EQ(b.at({0, 1}), 1.0);
}

TEST(Fourier, EmptyDatasetIsInputError) {
  EXPECT_THROW(fourier_of_dataset(Dataset(3), 1), InputError);
}

// Independent recomputation with a naive double loop over rows and subsets
// built from bitmasks rather than the canonical enumeration.
TEST(Fourier, MatchesNaiveDoubleLoop) {
  const std::size_t p = 6, n = 100, d = 2;
  const auto x = random_dataset(p, n, 11);
  const auto b = fourier_of_dataset(x, d);
  ASSERT_EQ(b.coeffs.size(), count_low_degree(p, d));
  for (std::uint32_t mask = 0; mask < (1U << p); ++mask) {
    std::vector<std::uint32_t> coords;
    for (std::uint32_t j = 0; j < p; ++j)
      if ((mask >> j) & 1U) coords.push_back(j);
    if (coords.size() > d) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double prod = 1.0;
      for (auto j : coords) prod *= x.row(i)[j];
      acc += prod;
    }
    EXPECT_NEAR(b.at(WalshIndex(coords)), acc / n, 1e-15);
  }
}

TEST(Fourier, EmptySetCoefficientIsExactlyOneAndBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = fourier_of_dataset(random_dataset(7, 33 + seed, seed), 3);
    EXPECT_EQ(b.coeffs[0], 1.0);
    for (double v : b.coeffs) EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(Marginal, DirectExamples) {
  Dataset ones(3);
  for (int i = 0; i < 4; ++i) ones.push_back(CubePoint{1, 1, 1});
  EXPECT_EQ(marginal_value(ones, {WalshIndex{0}, {1}}), 1.0);
  const Dataset x(2, {{+1, -1}});
  EXPECT_EQ(marginal_value(x, {WalshIndex{0, 1}, {1, -1}}), 1.0);
  EXPECT_EQ(marginal_value(x, {WalshIndex{0, 1}, {1, 1}}), 0.0);
  EXPECT_THROW(marginal_value(x, {WalshIndex{0, 1}, {1}}), InputError);
}

TEST(Marginal, TwoDimensionalExpansion) {
  const auto x = random_dataset(2, 37, 5);
  const auto b = fourier_of_dataset(x, 2);
  const MarginalQuery q{WalshIndex{0, 1}, {1, -1}};
  const double expected = 0.25 * (b.at({}) + b.at({0}) - b.at({1}) - b.at({0, 1}));
  EXPECT_NEAR(marginal_value(x, q), expected, 1e-15);
  EXPECT_NEAR(marginal_from_fourier(b, q), expected, 1e-15);
}

TEST(Marginal, ZeroDimensionalIsTotalMass) {
  const auto b = fourier_of_dataset(random_dataset(3, 9, 1), 1);
  EXPECT_EQ(marginal_from_fourier(b, {WalshIndex{}, {}}), b.coeffs[0]);
}

TEST(Marginal, DegreeAboveBoundIsInputError) {
  const auto b = fourier_of_dataset(random_dataset(4, 9, 1), 1);
  EXPECT_THROW(marginal_from_fourier(b, {WalshIndex{0, 1}, {1, 1}}), InputError);
}

// 1000 random (X, q) pairs with p <= 8, d <= 3: Fourier reconstruction
// agrees with direct counting.
TEST(Marginal, FourierAgreesWithCounting) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 1 + rng.below(8);
    const std::size_t d = rng.below(std::min<std::size_t>(p, 3) + 1);
    const auto x = random_dataset(p, 1 + rng.below(60), rng());
    const auto b = fourier_of_dataset(x, d);
    const std::size_t k = rng.below(d + 1);
    std::vector<std::uint32_t> all(p);
    for (std::uint32_t j = 0; j < p; ++j) all[j] = j;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::uint32_t> coords(all.begin(), all.begin() + static_cast<long>(k));
    std::sort(coords.begin(), coords.end());
    MarginalQuery q{WalshIndex(coords), {}};
    for (std::size_t t = 0; t < k; ++t) q.signs.push_back(static_cast<Sign>(rng.sign()));
    ASSERT_NEAR(marginal_from_fourier(b, q), marginal_value(x, q), 1e-12);
  }
}

TEST(Marginal, SignPatternsSumToOne) {
  const auto x = random_dataset(5, 40, 8);
  for (const auto& j : enumerate_low_degree(5, 3)) {
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1U << j.size()); ++mask) {
      MarginalQuery q{j, {}};
      for (std::size_t t = 0; t < j.size(); ++t) q.signs.push_back(((mask >> t) & 1U) ? -1 : 1);
      total += marginal_value(x, q);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Marginal, QueryEnumerationCount) {
  EXPECT_EQ(count_marginal_queries(8, 2), 1U + 8U * 2U + 28U * 4U);
  EXPECT_EQ(enumerate_marginal_queries(8, 2).size(), count_marginal_queries(8, 2));
}
