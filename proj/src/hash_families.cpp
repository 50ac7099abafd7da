#include "lshbench/hash_families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace lshbench {

namespace {

using detail::kMinhashStream;
using detail::kSimhashStream;
constexpr std::uint64_t kGaussianSecond = 0xd1b54a32d192ed03ULL;

void require_hashable(const SparseVector& x, bool binary_only) {
  if (x.empty()) throw std::invalid_argument("cannot hash an empty vector");
  if (binary_only && x.is_weighted()) {
    throw std::invalid_argument("minwise hashing requires binary vectors");
  }
}

HashValue minhash_unchecked(const SparseVector& x, const detail::FunctionKey& key) {
  HashValue best = std::numeric_limits<HashValue>::max();
  for (Index j : x.indices()) best = std::min(best, detail::permute(key, j));
  return best;
}

HashValue simhash_unchecked(const SparseVector& x, const detail::FunctionKey& key) {
  auto idx = x.indices();
  auto w = x.weights();
  double projection = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const double g = detail::gaussian(key, idx[p]);
    projection += w.empty() ? g : w[p] * g;
  }
  return projection >= 0.0 ? 1 : 0;
}

HashValue low_bits(HashValue v, unsigned bits) {
  return bits >= 64 ? v : (v & ((HashValue{1} << bits) - 1));
}

}  // namespace

std::string_view to_string(HashKind kind) {
  switch (kind) {
    case HashKind::minhash: return "minhash";
    case HashKind::simhash: return "simhash";
    case HashKind::bbit_minhash: return "bbit";
  }
  return "unknown";
}

HashKind parse_hash_kind(std::string_view name) {
  if (name == "minhash") return HashKind::minhash;
  if (name == "simhash") return HashKind::simhash;
  if (name == "bbit" || name == "bbit_minhash") return HashKind::bbit_minhash;
  throw std::invalid_argument("unknown hash family '" + std::string(name) + "'");
}

HashFamilyConfig HashFamilyConfig::minhash(std::uint64_t seed, std::size_t n) {
  return {HashKind::minhash, 0, seed, n};
}

HashFamilyConfig HashFamilyConfig::simhash(std::uint64_t seed, std::size_t n) {
  return {HashKind::simhash, 0, seed, n};
}

HashFamilyConfig HashFamilyConfig::bbit(unsigned b, std::uint64_t seed, std::size_t n) {
  HashFamilyConfig c{HashKind::bbit_minhash, b, seed, n};
  c.validate();
  return c;
}

void HashFamilyConfig::validate() const {
  if (kind == HashKind::bbit_minhash) {
    if (bits < 1 || bits > 64) throw std::invalid_argument("b must lie in 1..64");
  } else if (bits != 0) {
    throw std::invalid_argument("bit width is only meaningful for b-bit minwise hashing");
  }
}

std::string HashFamilyConfig::label() const {
  if (kind == HashKind::bbit_minhash) return "bbit" + std::to_string(bits);
  return std::string(to_string(kind));
}

namespace detail {

FunctionKey function_key(std::uint64_t master_seed, std::uint64_t seed_index,
                         std::uint64_t stream) {
  const std::uint64_t base = splitmix64(master_seed ^ splitmix64(stream));
  const std::uint64_t k1 = splitmix64(base + splitmix64(seed_index));
  const std::uint64_t k2 = splitmix64(k1 ^ 0xa0761d6478bd642fULL);
  return {k1, k2};
}

double gaussian(const FunctionKey& key, std::uint64_t coordinate) {
  const std::uint64_t h1 = permute(key, coordinate);
  const std::uint64_t h2 = splitmix64(h1 ^ kGaussianSecond);
  // u1 in (0, 1], u2 in [0, 1).
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((h1 >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(h2 >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

HashValue minhash(const SparseVector& x, std::uint64_t seed_index,
                  const HashFamilyConfig& config) {
  require_hashable(x, true);
  return minhash_unchecked(x, detail::function_key(config.master_seed, seed_index, kMinhashStream));
}

HashValue simhash(const SparseVector& x, std::uint64_t seed_index,
                  const HashFamilyConfig& config) {
  require_hashable(x, false);
  return simhash_unchecked(x, detail::function_key(config.master_seed, seed_index, kSimhashStream));
}

HashValue bbit_minhash(const SparseVector& x, std::uint64_t seed_index,
                       const HashFamilyConfig& config) {
  if (config.bits < 1 || config.bits > 64) throw std::invalid_argument("b must lie in 1..64");
  return low_bits(minhash(x, seed_index, config), config.bits);
}

HashValue hash_value(const SparseVector& x, std::uint64_t seed_index,
                     const HashFamilyConfig& config) {
  switch (config.kind) {
    case HashKind::minhash: return minhash(x, seed_index, config);
    case HashKind::simhash: return simhash(x, seed_index, config);
    case HashKind::bbit_minhash: return bbit_minhash(x, seed_index, config);
  }
  throw std::invalid_argument("unknown hash family");
}

void hash_range(const SparseVector& x, std::uint64_t first, std::span<HashValue> out,
                const HashFamilyConfig& config) {
  config.validate();
  require_hashable(x, config.kind != HashKind::simhash);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t seed_index = first + i;
    switch (config.kind) {
      case HashKind::minhash:
        out[i] = minhash_unchecked(
            x, detail::function_key(config.master_seed, seed_index, kMinhashStream));
        break;
      case HashKind::simhash:
        out[i] = simhash_unchecked(
            x, detail::function_key(config.master_seed, seed_index, kSimhashStream));
        break;
      case HashKind::bbit_minhash:
        out[i] = low_bits(minhash_unchecked(x, detail::function_key(config.master_seed, seed_index,
                                                                    kMinhashStream)),
                          config.bits);
        break;
    }
  }
}

std::vector<HashValue> signature(const SparseVector& x, const HashFamilyConfig& config) {
  std::vector<HashValue> out(config.num_hashes);
  hash_range(x, 0, out, config);
  return out;
}

double estimate_collision(const SparseVector& x, const SparseVector& y,
                          const HashFamilyConfig& config, std::size_t n) {
  if (n == 0) throw std::invalid_argument("estimate_collision needs n >= 1");
  std::vector<HashValue> hx(n), hy(n);
  hash_range(x, 0, hx, config);
  hash_range(y, 0, hy, config);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < n; ++i) equal += hx[i] == hy[i] ? 1 : 0;
  return static_cast<double>(equal) / static_cast<double>(n);
}

double minhash_collision_probability(double r) { return r; }

double simhash_collision_probability(double s) {
  return 1.0 - std::acos(std::clamp(s, -1.0, 1.0)) / std::numbers::pi;
}

double bbit_collision_probability(double r, unsigned bits) {
  if (bits < 1 || bits > 64) throw std::invalid_argument("b must lie in 1..64");
  return r + (1.0 - r) * std::ldexp(1.0, -static_cast<int>(bits));
}

Rational exact_permutation_minhash_oracle(const SparseVector& x, const SparseVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("dimension mismatch");
  if (x.dim() > 9) throw std::invalid_argument("exact oracle limited to dim <= 9");
  if (x.empty() || y.empty()) throw std::invalid_argument("exact oracle needs nonempty sets");
  const std::size_t dim = x.dim();
  // rank[j] is the image of coordinate j under the permutation.
  std::vector<std::size_t> rank(dim);
  std::iota(rank.begin(), rank.end(), 0);
  std::int64_t hits = 0, total = 0;
  auto min_image = [&](const SparseVector& v) {
    std::size_t m = dim;
    for (Index j : v.indices()) m = std::min(m, rank[j]);
    return m;
  };
  do {
    ++total;
    if (min_image(x) == min_image(y)) ++hits;
  } while (std::next_permutation(rank.begin(), rank.end()));
  return Rational(hits, total);
}

}  // namespace lshbench
