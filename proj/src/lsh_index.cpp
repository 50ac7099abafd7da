#include "lshbench/lsh_index.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <functional>
#include <limits>
#include <istream>
#include <ostream>

#include "lshbench/parallel.hpp"

namespace lshbench {

namespace {

constexpr BucketKey kKeySeed = 0x4c53484b45593031ULL;
constexpr std::array<char, 8> kMagic = {'L', 'S', 'H', 'I', 'D', 'X', '0', '1'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw std::runtime_error("truncated index snapshot");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

void IndexConfig::validate() const {
  if (K < 1 || K > kMaxK) throw std::invalid_argument("K must lie in 1..30");
  if (L < 1 || L > kMaxL) throw std::invalid_argument("L must lie in 1..200");
  if (stride != 0 && stride < K) throw std::invalid_argument("table stride must be >= K");
  family.validate();
}

BucketKey bucket_key(std::span<const HashValue> values) {
  BucketKey h = kKeySeed;
  for (HashValue v : values) h = detail::splitmix64(h ^ detail::splitmix64(v));
  return h;
}

BucketKey bucket_key(std::span<const HashValue> values, std::size_t K) {
  if (values.size() != K) {
    throw std::invalid_argument("bucket key expects " + std::to_string(K) + " values, got " +
                                std::to_string(values.size()));
  }
  return bucket_key(values);
}

InvalidPointError::InvalidPointError(PointId id, const std::string& what)
    : std::invalid_argument("point " + std::to_string(id) + ": " + what), id_(id) {}

std::vector<BucketKey> LshIndex::keys_for(const SparseVector& x) const {
  std::vector<BucketKey> keys(config_.L);
  std::vector<HashValue> values(config_.K);
  for (std::size_t t = 0; t < config_.L; ++t) {
    hash_range(x, config_.seed_index(t, 0), values, config_.family);
    keys[t] = bucket_key(values);
  }
  return keys;
}

LshIndex LshIndex::build(std::span<const SparseVector> points, const IndexConfig& config,
                         unsigned workers) {
  config.validate();
  if (points.size() > std::numeric_limits<PointId>::max()) {
    throw std::invalid_argument("too many points for 32-bit ids");
  }
  LshIndex index;
  index.config_ = config;
  index.num_points_ = points.size();
  index.tables_.resize(config.L);

  std::vector<std::vector<BucketKey>> keys(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    try {
      keys[i] = index.keys_for(points[i]);
    } catch (const std::invalid_argument& e) {
      throw InvalidPointError(static_cast<PointId>(i), e.what());
    }
  });
  // Sequential insertion keeps posting lists in ascending id order.
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t t = 0; t < config.L; ++t) {
      index.tables_[t][keys[i][t]].push_back(static_cast<PointId>(i));
    }
  }
  return index;
}

std::vector<PointId> LshIndex::query(const SparseVector& q) const {
  std::vector<PointId> out;
  if (num_points_ == 0) return out;
  const auto keys = keys_for(q);
  for (std::size_t t = 0; t < config_.L; ++t) {
    auto it = tables_[t].find(keys[t]);
    if (it != tables_[t].end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t LshIndex::num_entries() const {
  std::size_t n = 0;
  for (const auto& table : tables_) {
    for (const auto& [key, ids] : table) n += ids.size();
  }
  return n;
}

void LshIndex::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.family.kind));
  put_le<std::uint32_t>(out, config_.family.bits);
  put_le<std::uint32_t>(out, 0);
  put_le<std::uint64_t>(out, config_.K);
  put_le<std::uint64_t>(out, config_.L);
  put_le<std::uint64_t>(out, config_.stride);
  put_le<std::uint64_t>(out, config_.family.master_seed);
  put_le<std::uint64_t>(out, config_.family.num_hashes);
  put_le<std::uint64_t>(out, num_points_);
  for (const auto& table : tables_) {
    std::vector<BucketKey> sorted;
    sorted.reserve(table.size());
    for (const auto& [key, ids] : table) sorted.push_back(key);
    std::sort(sorted.begin(), sorted.end());
    put_le<std::uint64_t>(out, sorted.size());
    for (BucketKey key : sorted) put_le<std::uint64_t>(out, key);
    std::uint64_t offset = 0;
    put_le<std::uint64_t>(out, offset);
    for (BucketKey key : sorted) {
      offset += table.at(key).size();
      put_le<std::uint64_t>(out, offset);
    }
    for (BucketKey key : sorted) {
      for (PointId id : table.at(key)) put_le<std::uint32_t>(out, id);
    }
  }
  if (!out) throw std::runtime_error("failed to write index snapshot");
}

LshIndex LshIndex::load(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("not an index snapshot");
  }
  if (get_le<std::uint32_t>(in) != kSnapshotVersion) {
    throw std::runtime_error("unsupported index snapshot version");
  }
  LshIndex index;
  auto& cfg = index.config_;
  const auto kind = get_le<std::uint32_t>(in);
  if (kind > static_cast<std::uint32_t>(HashKind::bbit_minhash)) {
    throw std::runtime_error("bad hash family in snapshot");
  }
  cfg.family.kind = static_cast<HashKind>(kind);
  cfg.family.bits = get_le<std::uint32_t>(in);
  (void)get_le<std::uint32_t>(in);
  cfg.K = get_le<std::uint64_t>(in);
  cfg.L = get_le<std::uint64_t>(in);
  cfg.stride = get_le<std::uint64_t>(in);
  cfg.family.master_seed = get_le<std::uint64_t>(in);
  cfg.family.num_hashes = get_le<std::uint64_t>(in);
  index.num_points_ = get_le<std::uint64_t>(in);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad snapshot config: ") + e.what());
  }
  if (index.num_points_ > std::numeric_limits<PointId>::max()) {
    throw std::runtime_error("point count in snapshot exceeds the id range");
  }
  index.tables_.resize(cfg.L);
  std::vector<char> seen(index.num_points_);
  for (auto& table : index.tables_) {
    const auto nkeys = get_le<std::uint64_t>(in);
    if (nkeys > index.num_points_) throw std::runtime_error("corrupt bucket count in snapshot");
    std::vector<BucketKey> keys(nkeys);
    for (auto& key : keys) key = get_le<std::uint64_t>(in);
    if (std::adjacent_find(keys.begin(), keys.end(), std::greater_equal<>()) != keys.end()) {
      throw std::runtime_error("snapshot bucket keys are not strictly increasing");
    }
    std::vector<std::uint64_t> offsets(nkeys + 1);
    for (auto& off : offsets) off = get_le<std::uint64_t>(in);
    // Every point sits in exactly one nonempty bucket per table.
    if (offsets.front() != 0 || offsets.back() != index.num_points_ ||
        std::adjacent_find(offsets.begin(), offsets.end(), std::greater_equal<>()) !=
            offsets.end()) {
      throw std::runtime_error("corrupt posting offsets in snapshot");
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t k = 0; k < nkeys; ++k) {
      auto& ids = table[keys[k]];
      ids.resize(offsets[k + 1] - offsets[k]);
      for (auto& id : ids) {
        id = get_le<std::uint32_t>(in);
        if (id >= index.num_points_ || seen[id]) {
          throw std::runtime_error("bad point id in snapshot posting list");
        }
        seen[id] = 1;
      }
    }
  }
  return index;
}

}  // namespace lshbench
