#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <gtest/gtest.h>

#include "lshbench/dataset.hpp"
#include "lshbench/lsh_index.hpp"

using namespace lshbench;

namespace {

std::vector<SparseVector> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SparseVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Index> idx;
    const std::size_t f = 5 + rng() % 40;
    while (idx.size() < f) idx.push_back(static_cast<Index>(rng() % dim));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    out.push_back(SparseVector::binary(std::move(idx), dim));
  }
  return out;
}

// A corpus with many near neighbours so that candidate sets are not trivial.
Dataset clustered(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_query = 20;
  cfg.n_train = 1000;
  cfg.dim = 2000;
  cfg.neighbors_per_query = 10;
  cfg.profile = {{0.95, 1.0}, {0.8, 1.2}, {0.6, 1.0}, {0.5, 2.0}, {0.3, 1.0}};
  cfg.seed = seed;
  return synthesize(cfg);
}

// Candidates by direct hash comparison, independent of bucket keys.
std::vector<PointId> brute_force(std::span<const SparseVector> points, const SparseVector& q,
                                 const IndexConfig& cfg) {
  std::vector<std::vector<HashValue>> qh(cfg.L, std::vector<HashValue>(cfg.K));
  for (std::size_t t = 0; t < cfg.L; ++t) {
    for (std::size_t j = 0; j < cfg.K; ++j) qh[t][j] = hash_value(q, cfg.seed_index(t, j), cfg.family);
  }
  std::vector<PointId> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t t = 0; t < cfg.L; ++t) {
      bool all = true;
      for (std::size_t j = 0; j < cfg.K && all; ++j) {
        all = hash_value(points[i], cfg.seed_index(t, j), cfg.family) == qh[t][j];
      }
      if (all) {
        out.push_back(static_cast<PointId>(i));
        break;
      }
    }
  }
  return out;
}

bool is_subset(const std::vector<PointId>& a, const std::vector<PointId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(BucketKey, DeterministicAndLengthChecked) {
  std::vector<HashValue> v = {7};
  EXPECT_EQ(bucket_key(v), bucket_key(v));
  EXPECT_EQ(bucket_key(v, 1), bucket_key(v));
  EXPECT_THROW(bucket_key(v, 2), std::invalid_argument);
  std::vector<HashValue> a = {1, 2}, b = {2, 1};
  EXPECT_NE(bucket_key(a), bucket_key(b));
}

TEST(BucketKey, NoCollisionsOnDistinctSequences) {
  std::mt19937_64 rng(99);
  std::unordered_set<BucketKey> keys;
  std::set<std::vector<HashValue>> seqs;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t K = 1 + rng() % 8;
    std::vector<HashValue> s(K);
    // Small alphabets mimic SimHash / b-bit values, where near-identical
    // sequences are common.
    const HashValue alphabet = (i % 3 == 0) ? 2 : (i % 3 == 1) ? 16 : 0;
    for (auto& x : s) x = alphabet ? rng() % alphabet : rng();
    if (!seqs.insert(s).second) continue;
    keys.insert(bucket_key(s));
  }
  EXPECT_EQ(keys.size(), seqs.size());
}

TEST(BucketKey, SingleValueChangeChangesKey) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    std::vector<HashValue> s(1 + rng() % 10);
    for (auto& x : s) x = rng() % 4;
    auto t = s;
    t[rng() % t.size()] ^= 1 + rng() % 3;
    EXPECT_NE(bucket_key(s), bucket_key(t));
  }
}

TEST(IndexConfig, Validation) {
  IndexConfig c{0, 1, HashFamilyConfig::minhash(), 0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {31, 1, HashFamilyConfig::minhash(), 0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {3, 201, HashFamilyConfig::minhash(), 0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {3, 2, HashFamilyConfig::minhash(), 2};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {3, 2, HashFamilyConfig::minhash(), 5};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.seed_index(2, 1), 11u);
  c.stride = 0;
  EXPECT_EQ(c.seed_index(2, 1), 7u);
}

TEST(LshIndex, EmptyIndex) {
  std::vector<SparseVector> none;
  auto idx = LshIndex::build(none, {3, 4, HashFamilyConfig::minhash(), 0});
  EXPECT_EQ(idx.num_points(), 0u);
  EXPECT_EQ(idx.num_entries(), 0u);
  EXPECT_TRUE(idx.query(SparseVector::binary({1, 2}, 10)).empty());
}

TEST(LshIndex, EveryPointOncePerTable) {
  auto pts = random_points(300, 500, 1);
  IndexConfig cfg{3, 7, HashFamilyConfig::bbit(2), 0};
  auto idx = LshIndex::build(pts, cfg);
  EXPECT_EQ(idx.num_entries(), 300u * 7u);
  for (std::size_t t = 0; t < 7; ++t) {
    std::vector<PointId> all;
    for (const auto& [key, ids] : idx.table(t)) {
      EXPECT_FALSE(ids.empty());
      EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
      all.insert(all.end(), ids.begin(), ids.end());
    }
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), 300u);
    for (PointId i = 0; i < 300; ++i) EXPECT_EQ(all[i], i);
  }
}

TEST(LshIndex, DuplicatesShareBuckets) {
  auto pts = random_points(10, 200, 2);
  pts.push_back(pts[3]);
  auto idx = LshIndex::build(pts, {4, 6, HashFamilyConfig::simhash(), 0});
  EXPECT_EQ(idx.keys_for(pts[3]), idx.keys_for(pts[10]));
  auto c = idx.query(pts[3]);
  EXPECT_TRUE(std::binary_search(c.begin(), c.end(), 3u));
  EXPECT_TRUE(std::binary_search(c.begin(), c.end(), 10u));
}

TEST(LshIndex, KeysMatchHashRange) {
  auto pts = random_points(5, 100, 3);
  IndexConfig cfg{5, 3, HashFamilyConfig::minhash(), 8};
  auto idx = LshIndex::build(pts, cfg);
  for (const auto& p : pts) {
    auto keys = idx.keys_for(p);
    for (std::size_t t = 0; t < cfg.L; ++t) {
      std::vector<HashValue> v(cfg.K);
      hash_range(p, t * 8, v, cfg.family);
      EXPECT_EQ(keys[t], bucket_key(v, cfg.K));
    }
  }
}

TEST(LshIndex, SingleMinhashBuckets) {
  auto pts = random_points(100, 60, 4);
  auto cfg = IndexConfig{1, 1, HashFamilyConfig::minhash(), 0};
  auto idx = LshIndex::build(pts, cfg);
  auto queries = random_points(30, 60, 5);
  for (const auto& q : queries) {
    const HashValue hq = minhash(q, 0, cfg.family);
    std::vector<PointId> want;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (minhash(pts[i], 0, cfg.family) == hq) want.push_back(static_cast<PointId>(i));
    }
    EXPECT_EQ(idx.query(q), want);
  }
}

// 20 random (K, L, family) configurations on 1,000 points.
TEST(LshIndex, MatchesBruteForce) {
  auto ds = clustered(17);
  std::mt19937_64 rng(23);
  const std::vector<HashFamilyConfig> families = {
      HashFamilyConfig::minhash(), HashFamilyConfig::simhash(), HashFamilyConfig::bbit(1),
      HashFamilyConfig::bbit(2), HashFamilyConfig::bbit(4)};
  std::size_t nonempty = 0;
  for (int trial = 0; trial < 20; ++trial) {
    IndexConfig cfg{1 + rng() % 8, 1 + rng() % 12, families[rng() % families.size()], 0};
    if (trial % 4 == 0) cfg.stride = cfg.K + rng() % 4;
    auto idx = LshIndex::build(ds.train, cfg);
    for (std::size_t q = 0; q < ds.query.size(); q += 4) {
      auto got = idx.query(ds.query[q]);
      ASSERT_EQ(got, brute_force(ds.train, ds.query[q], cfg))
          << "K=" << cfg.K << " L=" << cfg.L << " " << cfg.family.label();
      nonempty += got.empty() ? 0 : 1;
    }
  }
  EXPECT_GT(nonempty, 50u);
}

TEST(LshIndex, DisjointQueryUnderMinhash) {
  constexpr std::size_t D = 1 << 20;
  std::vector<SparseVector> pts;
  std::vector<Index> idx;
  for (Index i = 0; i < 200; ++i) {
    idx.clear();
    for (Index j = 0; j < 20; ++j) idx.push_back(i * 20 + j);
    pts.push_back(SparseVector::binary(idx, D));
  }
  IndexConfig cfg{2, 10, HashFamilyConfig::minhash(), 0};
  auto index = LshIndex::build(pts, cfg);
  idx.clear();
  for (Index j = 0; j < 20; ++j) idx.push_back(500000 + j);
  auto q = SparseVector::binary(idx, D);
  EXPECT_EQ(index.query(q), brute_force(pts, q, cfg));
  EXPECT_TRUE(index.query(q).empty());
}

TEST(LshIndex, IndexedPointIsItsOwnCandidate) {
  auto ds = clustered(8);
  auto idx = LshIndex::build(ds.train, {6, 4, HashFamilyConfig::simhash(), 0});
  for (PointId i = 0; i < ds.train.size(); i += 37) {
    auto c = idx.query(ds.train[i]);
    EXPECT_TRUE(std::binary_search(c.begin(), c.end(), i));
  }
}

TEST(LshIndex, ExtremesOfKAndL) {
  auto pts = random_points(1000, 5000, 11);
  auto queries = random_points(20, 5000, 12);
  auto sparse = LshIndex::build(pts, {30, 1, HashFamilyConfig::minhash(), 0});
  auto dense = LshIndex::build(pts, {1, 200, HashFamilyConfig::bbit(1), 0});
  std::size_t few = 0, many = 0;
  for (const auto& q : queries) {
    few += sparse.query(q).size();
    many += dense.query(q).size();
  }
  EXPECT_EQ(few, 0u);
  EXPECT_EQ(many, 20u * 1000u);
}

TEST(LshIndex, MonotoneInLAndK) {
  auto ds = clustered(31);
  constexpr std::size_t kStride = 6;
  for (auto family : {HashFamilyConfig::minhash(), HashFamilyConfig::simhash()}) {
    std::vector<std::vector<std::vector<PointId>>> cand(kStride + 1);
    for (std::size_t K = 1; K <= kStride; ++K) {
      for (std::size_t L = 1; L <= 5; ++L) {
        auto idx = LshIndex::build(ds.train, {K, L, family, kStride});
        std::vector<PointId> all;
        for (const auto& q : ds.query) {
          auto c = idx.query(q);
          // Tag ids with the query so one vector holds every candidate set.
          for (auto id : c) all.push_back(static_cast<PointId>(&q - ds.query.data()) * 100000 + id);
        }
        cand[K].push_back(std::move(all));
      }
    }
    for (std::size_t K = 1; K <= kStride; ++K) {
      for (std::size_t L = 1; L < 5; ++L) EXPECT_TRUE(is_subset(cand[K][L - 1], cand[K][L]));
      if (K > 1) {
        for (std::size_t L = 1; L <= 5; ++L) EXPECT_TRUE(is_subset(cand[K][L - 1], cand[K - 1][L - 1]));
      }
    }
  }
}

// A table at K concatenations collides with probability p^K.
TEST(LshIndex, TableCollisionIsPowerOfSingleRate) {
  std::vector<Index> xi, yi;
  for (Index j = 0; j < 100; ++j) xi.push_back(j);
  for (Index j = 5; j < 105; ++j) yi.push_back(j);
  auto x = SparseVector::binary(xi, 200), y = SparseVector::binary(yi, 200);
  const double r = resemblance(x, y);  // 95/105
  const double s = cosine(x, y);       // 0.95
  struct Case {
    HashFamilyConfig family;
    double p;
  };
  for (const auto& [family, p] :
       {Case{HashFamilyConfig::minhash(), r},
        Case{HashFamilyConfig::simhash(), 1.0 - std::acos(s) / std::numbers::pi}}) {
    for (std::size_t K = 1; K <= 5; ++K) {
      std::size_t hits = 0, trials = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto f = family;
        f.master_seed = seed;
        LshIndex idx = LshIndex::build(std::span<const SparseVector>(&x, 1), {K, 200, f, 0});
        auto kx = idx.keys_for(x), ky = idx.keys_for(y);
        for (std::size_t t = 0; t < kx.size(); ++t) hits += kx[t] == ky[t] ? 1 : 0;
        trials += kx.size();
      }
      ASSERT_GE(std::pow(p, K), 0.5);
      EXPECT_NEAR(static_cast<double>(hits) / trials, std::pow(p, K), 0.03) << family.label() << K;
    }
  }
}

TEST(LshIndex, InvalidPointReportsId) {
  auto pts = random_points(10, 100, 6);
  pts[7] = SparseVector::binary({}, 100);
  try {
    LshIndex::build(pts, {2, 2, HashFamilyConfig::minhash(), 0});
    FAIL() << "expected InvalidPointError";
  } catch (const InvalidPointError& e) {
    EXPECT_EQ(e.id(), 7u);
  }
  pts[7] = SparseVector::weighted({3}, {0.5}, 100);
  EXPECT_THROW(LshIndex::build(pts, {2, 2, HashFamilyConfig::bbit(1), 0}), InvalidPointError);
  EXPECT_NO_THROW(LshIndex::build(pts, {2, 2, HashFamilyConfig::simhash(), 0}));
}

TEST(LshIndex, WorkerCountDoesNotMatter) {
  auto pts = random_points(500, 300, 13);
  IndexConfig cfg{3, 9, HashFamilyConfig::simhash(), 0};
  EXPECT_EQ(LshIndex::build(pts, cfg, 1), LshIndex::build(pts, cfg, 4));
}

TEST(LshIndex, ConcurrentQueries) {
  auto ds = clustered(3);
  auto idx = LshIndex::build(ds.train, {2, 8, HashFamilyConfig::minhash(), 0});
  std::vector<std::vector<PointId>> expected;
  for (const auto& q : ds.query) expected.push_back(idx.query(q));
  std::vector<int> ok(4, 0);
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < 4; ++w) {
      threads.emplace_back([&, w] {
        bool same = true;
        for (std::size_t q = 0; q < ds.query.size(); ++q) same &= idx.query(ds.query[q]) == expected[q];
        ok[w] = same;
      });
    }
  }
  for (int v : ok) EXPECT_TRUE(v);
}

TEST(Snapshot, RoundTrip) {
  auto pts = random_points(400, 300, 14);
  for (auto family : {HashFamilyConfig::minhash(7), HashFamilyConfig::bbit(3, 8),
                      HashFamilyConfig::simhash(9)}) {
    IndexConfig cfg{4, 6, family, 5};
    auto idx = LshIndex::build(pts, cfg);
    std::stringstream buf;
    idx.save(buf);
    auto back = LshIndex::load(buf);
    EXPECT_EQ(back, idx);
    EXPECT_EQ(back.config(), cfg);
    EXPECT_EQ(back.query(pts[17]), idx.query(pts[17]));
    std::stringstream again;
    back.save(again);
    EXPECT_EQ(again.str(), buf.str());
  }
}

TEST(Snapshot, LayoutHeader) {
  std::vector<SparseVector> none;
  auto idx = LshIndex::build(none, {2, 1, HashFamilyConfig::bbit(4, 0x0102030405060708ULL), 0});
  std::stringstream buf;
  idx.save(buf);
  const std::string s = buf.str();
  // magic, version, kind, bits, reserved, 6 u64 config fields, one empty table.
  ASSERT_EQ(s.size(), 8u + 4 * 4 + 6 * 8 + 8 + 8);
  EXPECT_EQ(s.substr(0, 8), "LSHIDX01");
  EXPECT_EQ(s[8], 1);
  EXPECT_EQ(s[12], 2);  // bbit_minhash
  EXPECT_EQ(s[16], 4);
  EXPECT_EQ(s[24], 2);  // K
  EXPECT_EQ(s[48], 0x08);
  EXPECT_EQ(s[55], 0x01);
}

TEST(Snapshot, RejectsCorruption) {
  auto pts = random_points(50, 100, 15);
  auto idx = LshIndex::build(pts, {2, 3, HashFamilyConfig::minhash(), 0});
  std::stringstream buf;
  idx.save(buf);
  const std::string good = buf.str();
  auto load = [](const std::string& bytes) {
    std::stringstream in(bytes);
    return LshIndex::load(in);
  };
  EXPECT_NO_THROW(load(good));
  EXPECT_THROW(load(good.substr(0, good.size() - 1)), std::runtime_error);
  EXPECT_THROW(load("NOTANIDX" + good.substr(8)), std::runtime_error);
  std::string bad = good;
  bad[8] = 9;  // version
  EXPECT_THROW(load(bad), std::runtime_error);
  bad = good;
  bad[24] = 0;  // K
  EXPECT_THROW(load(bad), std::runtime_error);
  bad = good;
  bad[12] = 7;  // family
  EXPECT_THROW(load(bad), std::runtime_error);
  bad = good;
  bad[bad.size() - 2] = 0x7f;  // last posting id
  EXPECT_THROW(load(bad), std::runtime_error);
  bad = good;
  bad[72] = static_cast<char>(0xff);  // bucket count of table 0
  EXPECT_THROW(load(bad), std::runtime_error);
  bad = good;
  bad[bad.size() - 4] = bad[bad.size() - 8];  // duplicate id within a table
  bad[bad.size() - 3] = bad[bad.size() - 7];
  if (bad != good) EXPECT_THROW(load(bad), std::runtime_error);
}
