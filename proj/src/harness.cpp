#include "lshbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "lshbench/parallel.hpp"

namespace lshbench {

namespace {

// Entries (doubles) of the cached SimHash projection matrix; 128 MiB.
constexpr std::size_t kProjectionCacheLimit = std::size_t{1} << 24;

/// Coordinate -> (train id, weight) postings for exact similarity scans.
class InvertedIndex {
 public:
  explicit InvertedIndex(const std::vector<SparseVector>& train) : norms_(train.size()) {
    std::size_t dim = train.empty() ? 0 : train.front().dim();
    postings_.resize(dim);
    for (std::size_t i = 0; i < train.size(); ++i) {
      auto idx = train[i].indices();
      auto w = train[i].weights();
      double sq = 0.0;
      for (std::size_t p = 0; p < idx.size(); ++p) {
        const double wt = w.empty() ? 1.0 : w[p];
        postings_[idx[p]].push_back({static_cast<PointId>(i), wt});
        sq += wt * wt;
      }
      norms_[i] = std::sqrt(sq);
    }
  }

  /// Inner products (intersection sizes for binary data) against every train point.
  void dots(const SparseVector& q, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    auto idx = q.indices();
    auto w = q.weights();
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const double wq = w.empty() ? 1.0 : w[p];
      for (const auto& post : postings_[idx[p]]) out[post.id] += wq * post.weight;
    }
  }

  double norm(std::size_t i) const { return norms_[i]; }

 private:
  struct Posting {
    PointId id;
    double weight;
  };
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> norms_;
};

void require_nonempty_partitions(const Dataset& ds, const char* op) {
  if (ds.query.empty() || ds.train.empty()) {
    throw std::invalid_argument(fmt::format("{} needs nonempty query and train partitions", op));
  }
}

void require_nonempty_points(const Dataset& ds, const char* op) {
  for (std::size_t i = 0; i < ds.query.size(); ++i) {
    if (ds.query[i].empty()) throw std::invalid_argument(fmt::format("{}: query {} is empty", op, i));
  }
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    if (ds.train[i].empty()) throw std::invalid_argument(fmt::format("{}: train point {} is empty", op, i));
  }
}

void require_binary(const Dataset& ds, const char* op) {
  if (ds.weighted) throw std::invalid_argument(fmt::format("{} requires a binary dataset", op));
}

/// Cosine of a query against all train points; binary uses a/sqrt(f1 f2).
void cosine_row(const Dataset& ds, const InvertedIndex& inv, std::size_t q,
                std::vector<double>& dots, std::vector<double>& out) {
  inv.dots(ds.query[q], dots);
  if (!ds.weighted) {
    const auto f1 = static_cast<double>(ds.query[q].nnz());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = dots[i] / std::sqrt(f1 * static_cast<double>(ds.train[i].nnz()));
    }
    return;
  }
  double qn = 0.0;
  for (double w : ds.query[q].weights()) qn += w * w;
  qn = std::sqrt(qn);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dots[i] / (qn * inv.norm(i));
}

/// Top-n ids by score, descending, ties by ascending id.
std::vector<PointId> top_ids(const std::vector<double>& scores, std::size_t n) {
  std::vector<PointId> ids(scores.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  n = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](PointId a, PointId b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  ids.resize(n);
  return ids;
}

std::size_t z_bin(double z, double width) {
  return static_cast<std::size_t>(std::floor((z - 2.0) / width + 1e-9));
}

}  // namespace

std::uint64_t ZHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

GoldStandard gold_topk(const Dataset& dataset, std::size_t k, unsigned workers) {
  require_nonempty_partitions(dataset, "gold_topk");
  require_nonempty_points(dataset, "gold_topk");
  if (k == 0 || k > dataset.train.size()) {
    throw std::invalid_argument(fmt::format("k = {} must lie in 1..{}", k, dataset.train.size()));
  }
  const InvertedIndex inv(dataset.train);
  GoldStandard gold;
  gold.k = k;
  gold.neighbors.resize(dataset.query.size());
  parallel_for(dataset.query.size(), workers, [&](std::size_t q) {
    std::vector<double> dots(dataset.train.size()), sims(dataset.train.size());
    cosine_row(dataset, inv, q, dots, sims);
    auto& out = gold.neighbors[q];
    for (PointId id : top_ids(sims, k)) out.push_back({id, sims[id]});
  });
  return gold;
}

ZHistogram z_histogram(const Dataset& dataset, double bin_width, bool skip_empty) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  require_binary(dataset, "z_histogram");
  ZHistogram hist;
  hist.bin_width = bin_width;
  // z depends on the two cardinalities only, so count train sizes once.
  std::map<std::size_t, std::uint64_t> train_sizes;
  std::uint64_t empty_train = 0;
  for (std::size_t i = 0; i < dataset.train.size(); ++i) {
    const auto f = dataset.train[i].nnz();
    if (f == 0) {
      if (!skip_empty) throw std::invalid_argument(fmt::format("z_histogram: train point {} is empty", i));
      ++empty_train;
      continue;
    }
    ++train_sizes[f];
  }
  for (std::size_t q = 0; q < dataset.query.size(); ++q) {
    const auto f1 = dataset.query[q].nnz();
    if (f1 == 0) {
      if (!skip_empty) throw std::invalid_argument(fmt::format("z_histogram: query {} is empty", q));
      hist.skipped += dataset.train.size();
      continue;
    }
    hist.skipped += empty_train;
    for (const auto& [f2, count] : train_sizes) {
      const auto bin = z_bin(z_statistic(f1, f2), bin_width);
      if (bin >= hist.counts.size()) hist.counts.resize(bin + 1, 0);
      hist.counts[bin] += count;
    }
  }
  return hist;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

LocationProfile top_location_profile(const Dataset& dataset, std::size_t T, unsigned workers) {
  require_nonempty_partitions(dataset, "top_location_profile");
  require_binary(dataset, "top_location_profile");
  require_nonempty_points(dataset, "top_location_profile");
  if (T == 0 || T > dataset.train.size()) {
    throw std::invalid_argument(fmt::format("T = {} must lie in 1..{}", T, dataset.train.size()));
  }
  const InvertedIndex inv(dataset.train);
  const std::size_t nq = dataset.query.size();
  std::vector<std::vector<double>> top_s(nq), top_r(nq);
  std::vector<std::uint64_t> violations(nq, 0);
  parallel_for(nq, workers, [&](std::size_t q) {
    const std::size_t n = dataset.train.size();
    std::vector<double> counts(n), s(n), r(n);
    inv.dots(dataset.query[q], counts);
    const std::size_t f1 = dataset.query[q].nnz();
    for (std::size_t i = 0; i < n; ++i) {
      const auto stats =
          pair_stats_from_counts(f1, dataset.train[i].nnz(), static_cast<std::size_t>(counts[i]));
      s[i] = stats.cosine;
      r[i] = stats.resemblance;
      if (!within_bounds(stats)) ++violations[q];
    }
    auto take_top = [T](std::vector<double>& v) {
      std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(T), v.end(),
                        std::greater<>());
      v.resize(T);
    };
    take_top(s);
    take_top(r);
    top_s[q] = std::move(s);
    top_r[q] = std::move(r);
  });

  LocationProfile profile;
  profile.pairs_checked = static_cast<std::uint64_t>(nq) * dataset.train.size();
  profile.pair_violations = std::accumulate(violations.begin(), violations.end(), std::uint64_t{0});
  profile.rows.reserve(T);
  std::vector<double> column(nq);
  for (std::size_t t = 0; t < T; ++t) {
    ProfileRow row;
    row.rank = t + 1;
    for (std::size_t q = 0; q < nq; ++q) column[q] = top_s[q][t];
    row.median_cosine = median(column);
    for (std::size_t q = 0; q < nq; ++q) column[q] = top_r[q][t];
    row.median_resemblance = median(column);
    const auto b = resemblance_bounds(row.median_cosine);
    row.lower = b.lower;
    row.upper = b.upper;
    profile.rows.push_back(row);
  }
  return profile;
}

std::vector<PointId> rank_by(const std::vector<double>& scores) {
  return top_ids(scores, scores.size());
}

std::vector<double> ranklist_overlap(const Dataset& dataset, std::size_t T_max, unsigned workers) {
  require_nonempty_partitions(dataset, "ranklist_overlap");
  require_binary(dataset, "ranklist_overlap");
  require_nonempty_points(dataset, "ranklist_overlap");
  if (T_max == 0 || T_max > dataset.train.size()) {
    throw std::invalid_argument(fmt::format("T = {} must lie in 1..{}", T_max, dataset.train.size()));
  }
  const InvertedIndex inv(dataset.train);
  const std::size_t nq = dataset.query.size();
  std::vector<std::vector<double>> per_query(nq);
  parallel_for(nq, workers, [&](std::size_t q) {
    const std::size_t n = dataset.train.size();
    std::vector<double> counts(n), s(n), r(n);
    inv.dots(dataset.query[q], counts);
    const std::size_t f1 = dataset.query[q].nnz();
    for (std::size_t i = 0; i < n; ++i) {
      const auto stats =
          pair_stats_from_counts(f1, dataset.train[i].nnz(), static_cast<std::size_t>(counts[i]));
      s[i] = stats.cosine;
      r[i] = stats.resemblance;
    }
    const auto by_s = top_ids(s, T_max);
    const auto by_r = top_ids(r, T_max);
    // membership bits: 1 = in cosine list, 2 = in resemblance list
    std::unordered_map<PointId, unsigned char> seen;
    std::size_t inter = 0;
    auto& out = per_query[q];
    out.resize(T_max);
    for (std::size_t t = 0; t < T_max; ++t) {
      auto& ms = seen[by_s[t]];
      ms |= 1;
      if (ms == 3) ++inter;
      auto& mr = seen[by_r[t]];
      if (!(mr & 2)) {
        mr |= 2;
        if (mr == 3) ++inter;
      }
      const std::size_t uni = 2 * (t + 1) - inter;
      out[t] = static_cast<double>(inter) / static_cast<double>(uni);
    }
  });
  std::vector<double> mean(T_max, 0.0);
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t t = 0; t < T_max; ++t) mean[t] += per_query[q][t];
  }
  for (auto& m : mean) m /= static_cast<double>(nq);
  return mean;
}

std::vector<std::size_t> SweepConfig::desk_K() {
  std::vector<std::size_t> v(12);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

std::vector<std::size_t> SweepConfig::desk_L() {
  std::vector<std::size_t> v(50);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

std::vector<std::size_t> SweepConfig::full_K() {
  std::vector<std::size_t> v(kMaxK);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

std::vector<std::size_t> SweepConfig::full_L() {
  std::vector<std::size_t> v(kMaxL);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

bool BenchmarkReport::all_attained() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const RecallLevelResult& r) { return r.min_fraction.has_value(); });
}

const SweepCell& BenchmarkReport::cell(std::size_t K, std::size_t L) const {
  for (const auto& c : cells) {
    if (c.K == K && c.L == L) return c;
  }
  throw std::out_of_range(fmt::format("no sweep cell for K={} L={}", K, L));
}

std::vector<RecallLevelResult> min_fraction_curve(const std::vector<SweepCell>& cells,
                                                  const std::vector<double>& levels) {
  std::vector<RecallLevelResult> out;
  out.reserve(levels.size());
  for (double level : levels) {
    RecallLevelResult res;
    res.level = level;
    for (const auto& c : cells) {
      if (c.recall < level) continue;
      const bool better = !res.min_fraction || c.fraction < *res.min_fraction ||
                          (c.fraction == *res.min_fraction &&
                           (c.K < res.best_K || (c.K == res.best_K && c.L < res.best_L)));
      if (better) {
        res.min_fraction = c.fraction;
        res.best_K = c.K;
        res.best_L = c.L;
      }
    }
    out.push_back(res);
  }
  return out;
}

BenchmarkReport sweep(const Dataset& dataset, const SweepConfig& config) {
  return sweep(dataset, gold_topk(dataset, config.k, config.workers), config);
}

BenchmarkReport sweep(const Dataset& dataset, const GoldStandard& gold, const SweepConfig& config) {
  require_nonempty_partitions(dataset, "sweep");
  config.family.validate();
  if (config.K_values.empty() || config.L_values.empty()) {
    throw std::invalid_argument("sweep needs nonempty K and L sets");
  }
  for (auto K : config.K_values) {
    if (K < 1 || K > kMaxK) throw std::invalid_argument(fmt::format("K = {} outside 1..{}", K, kMaxK));
  }
  for (auto L : config.L_values) {
    if (L < 1 || L > kMaxL) throw std::invalid_argument(fmt::format("L = {} outside 1..{}", L, kMaxL));
  }
  if (dataset.weighted && !config.real_valued) {
    throw std::invalid_argument("weighted dataset: binarize it or enable real-valued mode");
  }
  if (gold.neighbors.size() != dataset.query.size() || gold.k != config.k) {
    throw std::invalid_argument("gold standard does not match the dataset and k");
  }

  const bool binarize_for_hashing = dataset.weighted && config.family.kind != HashKind::simhash;
  const std::size_t K_max = *std::max_element(config.K_values.begin(), config.K_values.end());
  const std::size_t L_max = *std::max_element(config.L_values.begin(), config.L_values.end());
  const std::size_t width = K_max * L_max;
  const std::size_t n_train = dataset.train.size();
  const std::size_t n_query = dataset.query.size();

  // SimHash evaluates one Gaussian per (coordinate, function); with a modest
  // dimension it is much cheaper to draw the whole projection matrix once.
  std::vector<double> projection;
  if (config.family.kind == HashKind::simhash && dataset.dim * width <= kProjectionCacheLimit) {
    projection.resize(dataset.dim * width);
    parallel_for(width, config.workers, [&](std::size_t j) {
      const auto key = detail::function_key(config.family.master_seed, j, detail::kSimhashStream);
      for (std::size_t c = 0; c < dataset.dim; ++c) {
        projection[c * width + j] = detail::gaussian(key, c);
      }
    });
  }

  auto hash_all = [&](const std::vector<SparseVector>& pts, const char* which) {
    std::vector<HashValue> out(pts.size() * width);
    parallel_for(pts.size(), config.workers, [&](std::size_t i) {
      const SparseVector& v = binarize_for_hashing ? pts[i].binarized() : pts[i];
      try {
        if (!projection.empty()) {
          if (v.empty()) throw std::invalid_argument("cannot hash an empty vector");
          std::vector<double> acc(width, 0.0);
          auto idx = v.indices();
          auto w = v.weights();
          for (std::size_t p = 0; p < idx.size(); ++p) {
            const double* row = projection.data() + std::size_t{idx[p]} * width;
            const double scale = w.empty() ? 1.0 : w[p];
            for (std::size_t j = 0; j < width; ++j) acc[j] += scale * row[j];
          }
          for (std::size_t j = 0; j < width; ++j) out[i * width + j] = acc[j] >= 0.0 ? 1 : 0;
          return;
        }
        hash_range(v, 0, std::span<HashValue>(out.data() + i * width, width), config.family);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(fmt::format("{} point {}: {}", which, i, e.what()));
      }
    });
    return out;
  };
  const auto train_hashes = hash_all(dataset.train, "train");
  const auto query_hashes = hash_all(dataset.query, "query");

  auto key_of = [&](const std::vector<HashValue>& hashes, std::size_t i, std::size_t t,
                    std::size_t K) {
    return bucket_key(std::span<const HashValue>(hashes.data() + i * width + t * K_max, K));
  };

  BenchmarkReport report;
  report.family = config.family.label();
  report.k = config.k;

  for (std::size_t K : config.K_values) {
    std::vector<LshIndex::Table> tables(L_max);
    for (std::size_t t = 0; t < L_max; ++t) {
      for (std::size_t i = 0; i < n_train; ++i) {
        tables[t][key_of(train_hashes, i, t, K)].push_back(static_cast<PointId>(i));
      }
    }
    // Per query: cumulative (unique candidates, gold hits) after each table.
    std::vector<std::vector<std::uint64_t>> found(n_query), hits(n_query);
    parallel_for(n_query, config.workers, [&](std::size_t q) {
      std::vector<char> seen(n_train, 0), is_gold(n_train, 0);
      for (const auto& nb : gold.neighbors[q]) is_gold[nb.id] = 1;
      std::uint64_t count = 0, gold_hits = 0;
      auto& f = found[q];
      auto& h = hits[q];
      f.resize(L_max);
      h.resize(L_max);
      for (std::size_t t = 0; t < L_max; ++t) {
        auto it = tables[t].find(key_of(query_hashes, q, t, K));
        if (it != tables[t].end()) {
          for (PointId id : it->second) {
            if (seen[id]) continue;
            seen[id] = 1;
            ++count;
            gold_hits += is_gold[id];
          }
        }
        f[t] = count;
        h[t] = gold_hits;
      }
    });
    for (std::size_t L : config.L_values) {
      std::uint64_t total_found = 0, total_hits = 0;
      for (std::size_t q = 0; q < n_query; ++q) {
        total_found += found[q][L - 1];
        total_hits += hits[q][L - 1];
      }
      SweepCell cell;
      cell.K = K;
      cell.L = L;
      cell.recall = static_cast<double>(total_hits) /
                    (static_cast<double>(config.k) * static_cast<double>(n_query));
      cell.fraction = static_cast<double>(total_found) /
                      (static_cast<double>(n_train) * static_cast<double>(n_query));
      report.cells.push_back(cell);
    }
  }
  report.levels = min_fraction_curve(report.cells, config.recall_levels);
  return report;
}

}  // namespace lshbench
