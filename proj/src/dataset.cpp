#include "lshbench/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include <fmt/format.h>

namespace lshbench {

namespace {

constexpr std::array<ManifestEntry, 6> kManifest = {{
    {"MNIST", 10000, 60000, 784},
    {"NEWS20", 2000, 18000, 1355191},
    {"NYTIMES", 5000, 100000, 102660},
    {"RCV1", 5000, 100000, 47236},
    {"URL", 5000, 90000, 3231958},
    {"WEBSPAM", 5000, 100000, 16609143},
}};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<Index> sample_excluding(std::size_t count, std::size_t dim,
                                    const std::unordered_set<Index>& exclude,
                                    std::mt19937_64& rng) {
  std::unordered_set<Index> chosen;
  std::vector<Index> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto j = static_cast<Index>(uniform_below(rng, dim));
    if (exclude.count(j) || !chosen.insert(j).second) continue;
    out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> random_set(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  return sample_excluding(count, dim, {}, rng);
}

SparseVector with_random_weights(const SparseVector& v, std::mt19937_64& rng) {
  std::vector<double> w(v.nnz());
  // Uniform in [0.5, 2.0).
  for (auto& x : w) x = 0.5 + 1.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return SparseVector::weighted({v.indices().begin(), v.indices().end()}, std::move(w), v.dim());
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

void Dataset::validate() const {
  auto check = [&](const std::vector<SparseVector>& part, const char* which) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (part[i].dim() != dim) {
        throw std::invalid_argument(fmt::format("{} point {} has dim {}, dataset dim is {}", which,
                                                i, part[i].dim(), dim));
      }
      if (part[i].is_weighted() != weighted) {
        throw std::invalid_argument(fmt::format("{} point {} has the wrong mode", which, i));
      }
    }
  };
  check(query, "query");
  check(train, "train");
}

Dataset Dataset::binarized() const {
  Dataset out{name, {}, {}, false, dim};
  out.query.reserve(query.size());
  out.train.reserve(train.size());
  for (const auto& v : query) out.query.push_back(v.binarized());
  for (const auto& v : train) out.train.push_back(v.binarized());
  return out;
}

Partition parse_svmlight(std::istream& in, bool binarize, std::optional<std::size_t> dim_override,
                         const std::string& source) {
  struct Row {
    std::vector<Index> idx;
    std::vector<double> val;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    Row row;
    bool first = true;
    std::int64_t prev = -1;
    bool any_token = false;
    while (!rest.empty()) {
      while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
      if (rest.empty()) break;
      std::size_t end = 0;
      while (end < rest.size() && !is_space(rest[end])) ++end;
      const std::string_view tok = rest.substr(0, end);
      rest.remove_prefix(end);
      any_token = true;
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        if (!first) throw ParseError(source, line_no, fmt::format("expected index:value, got '{}'", tok));
        first = false;  // label
        continue;
      }
      first = false;
      if (tok.substr(0, colon) == "qid") continue;
      std::uint64_t index = 0;
      const auto key = tok.substr(0, colon);
      auto [kp, kec] = std::from_chars(key.data(), key.data() + key.size(), index);
      if (kec != std::errc() || kp != key.data() + key.size()) {
        throw ParseError(source, line_no, fmt::format("bad feature index in '{}'", tok));
      }
      if (index == 0) throw ParseError(source, line_no, "feature indices are 1-based");
      const auto value_str = tok.substr(colon + 1);
      double value = 0.0;
      auto [vp, vec] = std::from_chars(value_str.data(), value_str.data() + value_str.size(), value);
      if (vec != std::errc() || vp != value_str.data() + value_str.size()) {
        throw ParseError(source, line_no, fmt::format("bad feature value in '{}'", tok));
      }
      if (static_cast<std::int64_t>(index) <= prev) {
        throw ParseError(source, line_no, "feature indices must be strictly increasing");
      }
      prev = static_cast<std::int64_t>(index);
      if (index - 1 > std::numeric_limits<Index>::max()) {
        throw ParseError(source, line_no, "feature index too large");
      }
      if (value == 0.0) continue;
      row.idx.push_back(static_cast<Index>(index - 1));
      row.val.push_back(value);
      max_index = std::max<std::size_t>(max_index, index);
    }
    if (any_token) rows.push_back(std::move(row));
  }
  if (in.bad()) throw std::runtime_error("read error on " + source);

  Partition part;
  part.dim = max_index;
  if (dim_override) {
    if (*dim_override < max_index) {
      throw ParseError(source, 0,
                       fmt::format("index {} exceeds declared dim {}", max_index, *dim_override));
    }
    part.dim = *dim_override;
  }
  part.points.reserve(rows.size());
  for (auto& row : rows) {
    if (binarize) {
      part.points.push_back(SparseVector::binary(std::move(row.idx), part.dim));
    } else {
      part.points.push_back(SparseVector::weighted(std::move(row.idx), std::move(row.val), part.dim));
    }
  }
  return part;
}

Partition load_svmlight(const std::filesystem::path& path, bool binarize,
                        std::optional<std::size_t> dim_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_svmlight(in, binarize, dim_override, path.string());
}

void write_svmlight(std::ostream& out, std::span<const SparseVector> points) {
  for (const auto& v : points) {
    std::string line = "0";
    auto idx = v.indices();
    auto w = v.weights();
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (w.empty()) {
        line += fmt::format(" {}:1", idx[p] + 1);
      } else {
        line += fmt::format(" {}:{}", idx[p] + 1, w[p]);
      }
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("failed to write svmlight output");
}

void write_svmlight(const std::filesystem::path& path, std::span<const SparseVector> points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_svmlight(out, points);
}

Dataset make_dataset(std::string name, Partition query, Partition train) {
  Dataset ds;
  ds.name = std::move(name);
  ds.dim = std::max(query.dim, train.dim);
  auto widen = [&](std::vector<SparseVector>& pts) {
    for (auto& v : pts) {
      if (v.dim() != ds.dim) v = v.with_dim(ds.dim);
    }
  };
  widen(query.points);
  widen(train.points);
  ds.query = std::move(query.points);
  ds.train = std::move(train.points);
  const bool any_weighted =
      std::any_of(ds.query.begin(), ds.query.end(), [](auto& v) { return v.is_weighted(); }) ||
      std::any_of(ds.train.begin(), ds.train.end(), [](auto& v) { return v.is_weighted(); });
  ds.weighted = any_weighted;
  ds.validate();
  return ds;
}

std::span<const ManifestEntry> dataset_manifest() { return kManifest; }

const ManifestEntry& manifest_entry(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& e : kManifest) {
    if (e.name == upper) return e;
  }
  throw std::invalid_argument(fmt::format("no manifest entry named '{}'", name));
}

void check_against_manifest(const Dataset& dataset, const ManifestEntry& entry) {
  if (dataset.query.size() != entry.n_query) {
    throw std::runtime_error(fmt::format("{}: expected {} query points, found {}", entry.name,
                                         entry.n_query, dataset.query.size()));
  }
  if (dataset.train.size() != entry.n_train) {
    throw std::runtime_error(fmt::format("{}: expected {} train points, found {}", entry.name,
                                         entry.n_train, dataset.train.size()));
  }
  if (dataset.dim > entry.dim) {
    throw std::runtime_error(
        fmt::format("{}: dim {} exceeds the documented {}", entry.name, dataset.dim, entry.dim));
  }
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  // Lemire's multiply-shift with rejection.
  using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

SparseVector plant_neighbor(const SparseVector& base, const PlantSpec& spec, std::mt19937_64& rng) {
  const std::size_t f1 = base.nnz();
  const std::size_t dim = base.dim();
  if (f1 == 0) throw std::invalid_argument("planted pair needs f1 >= 1");
  if (!(spec.cosine >= 0.0 && spec.cosine <= 1.0)) {
    throw std::invalid_argument("planted cosine must lie in [0, 1]");
  }
  if (!(spec.ratio > 0.0)) throw std::invalid_argument("planted ratio must be positive");
  const auto f2 = static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(f1)));
  if (f2 == 0) throw std::invalid_argument("planted ratio rounds f2 to zero");
  const auto a = static_cast<std::size_t>(
      std::llround(spec.cosine * std::sqrt(static_cast<double>(f1) * static_cast<double>(f2))));
  if (a > std::min(f1, f2)) {
    throw std::invalid_argument(fmt::format(
        "infeasible profile: S={} r={} needs overlap {} > min({}, {})", spec.cosine, spec.ratio,
        a, f1, f2));
  }
  if (f1 + f2 - a > dim) throw std::invalid_argument("planted pair does not fit in dim");

  std::vector<Index> shared(base.indices().begin(), base.indices().end());
  for (std::size_t i = 0; i < a; ++i) {
    std::swap(shared[i], shared[i + uniform_below(rng, shared.size() - i)]);
  }
  shared.resize(a);
  const std::unordered_set<Index> exclude(base.indices().begin(), base.indices().end());
  auto extra = sample_excluding(f2 - a, dim, exclude, rng);
  shared.insert(shared.end(), extra.begin(), extra.end());
  std::sort(shared.begin(), shared.end());
  return SparseVector::binary(std::move(shared), dim);
}

std::pair<SparseVector, SparseVector> planted_pair(std::size_t f1, const PlantSpec& spec,
                                                   std::size_t dim, std::mt19937_64& rng) {
  if (f1 == 0 || f1 > dim) throw std::invalid_argument("planted pair needs 1 <= f1 <= dim");
  auto base = SparseVector::binary(random_set(f1, dim, rng), dim);
  auto neighbor = plant_neighbor(base, spec, rng);
  return {std::move(base), std::move(neighbor)};
}

SynthConfig SynthConfig::default_corpus() {
  SynthConfig c;
  c.neighbors_per_query = 10;
  c.profile = {{0.95, 1.0}, {0.9, 1.1}, {0.85, 1.25}, {0.8, 1.0}, {0.75, 1.5},
               {0.7, 1.2},  {0.65, 2.0}, {0.6, 1.0},  {0.55, 1.3}, {0.5, 4.0}};
  return c;
}

Dataset synthesize(const SynthConfig& config) {
  if (config.n_query == 0 || config.n_train == 0 || config.dim == 0) {
    throw std::invalid_argument("synthesize needs positive n_query, n_train and dim");
  }
  if (config.f_min == 0 || config.f_min > config.f_max || config.f_max > config.dim) {
    throw std::invalid_argument("synthesize needs 1 <= f_min <= f_max <= dim");
  }
  if (config.neighbors_per_query > 0 && config.profile.empty()) {
    throw std::invalid_argument("planted neighbors requested with an empty profile");
  }
  const std::size_t planted = config.n_query * config.neighbors_per_query;
  if (planted > config.n_train) {
    throw std::invalid_argument(fmt::format("{} planted neighbors exceed {} train points", planted,
                                            config.n_train));
  }
  std::mt19937_64 rng(config.seed);
  auto draw_f = [&] {
    return config.f_min + uniform_below(rng, config.f_max - config.f_min + 1);
  };

  Dataset ds;
  ds.name = "synthetic";
  ds.dim = config.dim;
  ds.weighted = config.weighted;
  ds.query.reserve(config.n_query);
  ds.train.reserve(config.n_train);
  for (std::size_t q = 0; q < config.n_query; ++q) {
    auto query = SparseVector::binary(random_set(draw_f(), config.dim, rng), config.dim);
    for (std::size_t m = 0; m < config.neighbors_per_query; ++m) {
      ds.train.push_back(plant_neighbor(query, config.profile[m % config.profile.size()], rng));
    }
    ds.query.push_back(std::move(query));
  }
  while (ds.train.size() < config.n_train) {
    ds.train.push_back(SparseVector::binary(random_set(draw_f(), config.dim, rng), config.dim));
  }
  for (std::size_t i = ds.train.size(); i > 1; --i) {
    std::swap(ds.train[i - 1], ds.train[uniform_below(rng, i)]);
  }
  if (config.weighted) {
    for (auto& v : ds.query) v = with_random_weights(v, rng);
    for (auto& v : ds.train) v = with_random_weights(v, rng);
  }
  return ds;
}

}  // namespace lshbench
