#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "lshbench/hash_families.hpp"

using namespace lshbench;

namespace {

SparseVector set_of(std::vector<Index> idx, std::size_t dim) {
  return SparseVector::binary(std::move(idx), dim);
}

SparseVector range_set(Index lo, Index hi, std::size_t dim) {
  std::vector<Index> v;
  for (Index j = lo; j < hi; ++j) v.push_back(j);
  return set_of(std::move(v), dim);
}

SparseVector from_mask(unsigned mask, std::size_t dim) {
  std::vector<Index> v;
  for (Index j = 0; j < dim; ++j) {
    if (mask & (1u << j)) v.push_back(j);
  }
  return set_of(std::move(v), dim);
}

// Random pairs over D = 1000 spanning low to high overlap.
std::vector<std::pair<SparseVector, SparseVector>> random_pairs(std::uint64_t seed) {
  constexpr std::size_t D = 1000;
  std::mt19937_64 rng(seed);
  std::vector<std::pair<SparseVector, SparseVector>> pairs;
  for (int i = 0; i < 20; ++i) {
    std::vector<Index> perm(D);
    for (Index j = 0; j < D; ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t f1 = 20 + rng() % 300;
    const std::size_t f2 = 20 + rng() % 300;
    const std::size_t a = rng() % (std::min(f1, f2) + 1);
    // perm[0, a) shared, then x-only and y-only blocks.
    std::vector<Index> x(perm.begin(), perm.begin() + f1);
    std::vector<Index> y(perm.begin(), perm.begin() + a);
    y.insert(y.end(), perm.begin() + f1, perm.begin() + f1 + (f2 - a));
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    pairs.emplace_back(set_of(x, D), set_of(y, D));
  }
  return pairs;
}

constexpr std::size_t kHashes = 10000;
constexpr double kTol = 0.02;

}  // namespace

TEST(HashConfig, Validation) {
  EXPECT_THROW(HashFamilyConfig::bbit(0), std::invalid_argument);
  EXPECT_THROW(HashFamilyConfig::bbit(65), std::invalid_argument);
  HashFamilyConfig c = HashFamilyConfig::minhash();
  c.bits = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(HashFamilyConfig::bbit(4).label(), "bbit4");
  EXPECT_EQ(HashFamilyConfig::simhash().label(), "simhash");
  EXPECT_EQ(parse_hash_kind("bbit"), HashKind::bbit_minhash);
  EXPECT_THROW(parse_hash_kind("md5"), std::invalid_argument);
}

TEST(HashFamilies, RejectsBadInput) {
  auto cfg = HashFamilyConfig::minhash();
  EXPECT_THROW(minhash(set_of({}, 4), 0, cfg), std::invalid_argument);
  auto w = SparseVector::weighted({1}, {2.0}, 4);
  EXPECT_THROW(minhash(w, 0, cfg), std::invalid_argument);
  EXPECT_THROW(bbit_minhash(w, 0, HashFamilyConfig::bbit(2)), std::invalid_argument);
  EXPECT_THROW(simhash(set_of({}, 4), 0, HashFamilyConfig::simhash()), std::invalid_argument);
  EXPECT_NO_THROW(simhash(w, 0, HashFamilyConfig::simhash()));
  EXPECT_THROW(estimate_collision(set_of({1}, 4), set_of({1}, 4), cfg, 0), std::invalid_argument);
}

TEST(HashFamilies, Deterministic) {
  auto x = range_set(3, 90, 200);
  for (auto cfg : {HashFamilyConfig::minhash(), HashFamilyConfig::simhash(),
                   HashFamilyConfig::bbit(3)}) {
    cfg.num_hashes = 64;
    auto a = signature(x, cfg);
    auto b = signature(x, cfg);
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], hash_value(x, i, cfg));
  }
}

TEST(HashFamilies, DeterministicAcrossThreads) {
  auto x = range_set(0, 50, 100);
  auto cfg = HashFamilyConfig::simhash(kDefaultMasterSeed, 256);
  const auto expected = signature(x, cfg);
  std::vector<std::vector<HashValue>> got(4);
  {
    std::vector<std::jthread> threads;
    for (auto& g : got) threads.emplace_back([&] { g = signature(x, cfg); });
  }
  for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(HashFamilies, SeedChangesOutput) {
  auto x = range_set(0, 50, 100);
  auto a = signature(x, HashFamilyConfig::minhash(1, 32));
  auto b = signature(x, HashFamilyConfig::minhash(2, 32));
  EXPECT_NE(a, b);
}

TEST(HashFamilies, HashRangeMatchesSingleCalls) {
  auto x = range_set(10, 40, 64);
  auto cfg = HashFamilyConfig::bbit(5);
  std::vector<HashValue> out(16);
  hash_range(x, 100, out, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], bbit_minhash(x, 100 + i, cfg));
}

TEST(HashFamilies, ValueRanges) {
  auto x = range_set(0, 30, 64);
  for (std::uint64_t i = 0; i < 200; ++i) {
    EXPECT_LE(simhash(x, i, HashFamilyConfig::simhash()), 1u);
    EXPECT_LT(bbit_minhash(x, i, HashFamilyConfig::bbit(3)), 8u);
  }
}

TEST(HashFamilies, BbitIsTruncation) {
  auto x = range_set(5, 70, 128);
  auto mh = HashFamilyConfig::minhash();
  for (std::uint64_t i = 0; i < 500; ++i) {
    const HashValue full = minhash(x, i, mh);
    for (unsigned b : {1u, 2u, 7u, 16u, 63u}) {
      const HashValue low = bbit_minhash(x, i, HashFamilyConfig::bbit(b));
      EXPECT_EQ(low, full & ((HashValue{1} << b) - 1));
    }
    EXPECT_EQ(bbit_minhash(x, i, HashFamilyConfig::bbit(64)), full);
    EXPECT_EQ(bbit_minhash(x, i, HashFamilyConfig::bbit(1)), full % 2);
  }
}

TEST(ExactOracle, Examples) {
  EXPECT_EQ(exact_permutation_minhash_oracle(set_of({0, 1}, 3), set_of({1, 2}, 3)), Rational(1, 3));
  EXPECT_EQ(exact_permutation_minhash_oracle(set_of({0, 2}, 4), set_of({0, 2}, 4)), Rational(1));
  EXPECT_EQ(exact_permutation_minhash_oracle(set_of({0}, 2), set_of({1}, 2)), Rational(0));
  EXPECT_THROW(exact_permutation_minhash_oracle(set_of({0}, 10), set_of({1}, 10)),
               std::invalid_argument);
  EXPECT_THROW(exact_permutation_minhash_oracle(set_of({}, 3), set_of({1}, 3)),
               std::invalid_argument);
}

TEST(ExactOracle, EqualsResemblanceForAllSmallPairs) {
  std::size_t pairs = 0;
  for (std::size_t D = 1; D <= 6; ++D) {
    const unsigned full = 1u << D;
    for (unsigned mx = 1; mx < full; ++mx) {
      for (unsigned my = 1; my < full; ++my) {
        auto x = from_mask(mx, D), y = from_mask(my, D);
        const auto a = static_cast<std::int64_t>(std::popcount(mx & my));
        const auto u = static_cast<std::int64_t>(std::popcount(mx | my));
        ASSERT_EQ(exact_permutation_minhash_oracle(x, y), Rational(a, u)) << D << ' ' << mx << ' ' << my;
        ++pairs;
      }
    }
  }
  EXPECT_EQ(pairs, 1u + 9u + 49u + 225u + 961u + 3969u);
}

TEST(MonteCarlo, MinhashExamples) {
  auto cfg = HashFamilyConfig::minhash();
  EXPECT_DOUBLE_EQ(estimate_collision(range_set(0, 9, 20), range_set(0, 9, 20), cfg, 500), 1.0);
  EXPECT_NEAR(estimate_collision(set_of({0, 1}, 3), set_of({1, 2}, 3), cfg, kHashes), 1.0 / 3.0, kTol);
  // {1..30} vs {11..40}: a = 20, union 40.
  const double p = estimate_collision(range_set(1, 31, 64), range_set(11, 41, 64), cfg, kHashes);
  EXPECT_GE(p, 0.48);
  EXPECT_LE(p, 0.52);
}

TEST(MonteCarlo, SimhashExamples) {
  auto cfg = HashFamilyConfig::simhash();
  const double orth = estimate_collision(range_set(0, 50, 100), range_set(50, 100, 100), cfg, kHashes);
  EXPECT_GE(orth, 0.48);
  EXPECT_LE(orth, 0.52);
  // f1 = f2 = 100, a = 90 gives S = 0.9.
  auto x = range_set(0, 100, 200), y = range_set(10, 110, 200);
  ASSERT_DOUBLE_EQ(cosine(x, y), 0.9);
  EXPECT_NEAR(estimate_collision(x, y, cfg, kHashes), 0.8564, kTol);
  EXPECT_NEAR(simhash_collision_probability(0.9), 0.85643370687129, 1e-12);
}

TEST(MonteCarlo, BbitExamples) {
  auto x = range_set(1, 31, 64), y = range_set(11, 41, 64);
  EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::bbit(1), kHashes), 0.75, kTol);
  EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::bbit(2), kHashes), 0.625, kTol);
  EXPECT_DOUBLE_EQ(estimate_collision(x, y, HashFamilyConfig::bbit(64), kHashes),
                   estimate_collision(x, y, HashFamilyConfig::minhash(), kHashes));
}

TEST(MonteCarlo, MinhashRandomPairs) {
  for (const auto& [x, y] : random_pairs(101)) {
    const double r = resemblance(x, y);
    EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::minhash(), kHashes), r, kTol);
  }
}

TEST(MonteCarlo, SimhashRandomPairs) {
  for (const auto& [x, y] : random_pairs(202)) {
    const double want = simhash_collision_probability(cosine(x, y));
    EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::simhash(), kHashes), want, kTol);
  }
}

TEST(MonteCarlo, SimhashWeighted) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Index> idx;
    std::vector<double> wx, wy;
    for (Index j = 0; j < 200; ++j) {
      idx.push_back(j);
      wx.push_back(nd(rng));
      wy.push_back(wx.back() + 0.7 * nd(rng));
    }
    auto x = SparseVector::weighted(idx, wx, 200), y = SparseVector::weighted(idx, wy, 200);
    const double s = cosine(x, y);
    EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::simhash(), kHashes),
                1.0 - std::acos(s) / std::numbers::pi, kTol);
  }
}

TEST(MonteCarlo, BbitRandomPairs) {
  const auto pairs = random_pairs(303);
  for (unsigned b : {1u, 2u, 4u, 8u}) {
    for (const auto& [x, y] : pairs) {
      const double want = bbit_collision_probability(resemblance(x, y), b);
      EXPECT_NEAR(estimate_collision(x, y, HashFamilyConfig::bbit(b), kHashes), want, kTol) << b;
    }
  }
}

TEST(CollisionFormulas, Values) {
  EXPECT_DOUBLE_EQ(minhash_collision_probability(0.3), 0.3);
  EXPECT_DOUBLE_EQ(simhash_collision_probability(1.0), 1.0);
  EXPECT_DOUBLE_EQ(simhash_collision_probability(0.0), 0.5);
  for (double r = 0.0; r <= 1.0; r += 0.1) {
    EXPECT_DOUBLE_EQ(bbit_collision_probability(r, 1), (r + 1.0) / 2.0);
  }
  EXPECT_DOUBLE_EQ(bbit_collision_probability(0.5, 2), 0.625);
  EXPECT_DOUBLE_EQ(bbit_collision_probability(0.2, 64), 0.2 + 0.8 * std::ldexp(1.0, -64));
  EXPECT_THROW(bbit_collision_probability(0.5, 0), std::invalid_argument);
}

TEST(Gaussian, Moments) {
  auto key = detail::function_key(kDefaultMasterSeed, 0, detail::kSimhashStream);
  double sum = 0, sq = 0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = detail::gaussian(key, static_cast<std::uint64_t>(i));
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}
