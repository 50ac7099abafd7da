#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "lshbench/similarity.hpp"

namespace lshbench {

enum class HashKind { minhash, simhash, bbit_minhash };

std::string_view to_string(HashKind kind);
/// Accepts "minhash", "simhash", "bbit" (or "bbit_minhash").
HashKind parse_hash_kind(std::string_view name);

/// Documented default master seed; every published number uses it.
inline constexpr std::uint64_t kDefaultMasterSeed = 0x5eed'2014'cafe'f00dULL;

/// MinHash values are full 64-bit minima, SimHash values are 0/1,
/// b-bit values are below 2^b.
using HashValue = std::uint64_t;

struct HashFamilyConfig {
  HashKind kind = HashKind::minhash;
  unsigned bits = 0;  // b; set only for bbit_minhash
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t num_hashes = 1;

  static HashFamilyConfig minhash(std::uint64_t seed = kDefaultMasterSeed, std::size_t n = 1);
  static HashFamilyConfig simhash(std::uint64_t seed = kDefaultMasterSeed, std::size_t n = 1);
  static HashFamilyConfig bbit(unsigned b, std::uint64_t seed = kDefaultMasterSeed,
                               std::size_t n = 1);

  /// Throws std::invalid_argument on a bad bit width.
  void validate() const;
  /// Short label, e.g. "minhash", "simhash", "bbit4".
  std::string label() const;

  friend bool operator==(const HashFamilyConfig&, const HashFamilyConfig&) = default;
};

namespace detail {

// Independent key streams so MinHash and SimHash functions never share keys.
inline constexpr std::uint64_t kMinhashStream = 0x6d696e68617368ULL;
inline constexpr std::uint64_t kSimhashStream = 0x73696d68617368ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-function keys derived from (master seed, function index, stream).
struct FunctionKey {
  std::uint64_t k1;
  std::uint64_t k2;
};

FunctionKey function_key(std::uint64_t master_seed, std::uint64_t seed_index,
                         std::uint64_t stream);

/// Keyed bijection on 64-bit ids standing in for a random permutation.
constexpr std::uint64_t permute(const FunctionKey& key, std::uint64_t id) {
  return splitmix64(splitmix64(id + key.k1) ^ key.k2);
}

/// Deterministic N(0,1) draw for one (function, coordinate) counter.
double gaussian(const FunctionKey& key, std::uint64_t coordinate);

}  // namespace detail

/// min over coordinates of a keyed pseudo-permutation; binary, nonempty input.
HashValue minhash(const SparseVector& x, std::uint64_t seed_index, const HashFamilyConfig& config);

/// Sign bit of a Gaussian projection; 1 when the projection is >= 0.
HashValue simhash(const SparseVector& x, std::uint64_t seed_index, const HashFamilyConfig& config);

/// Lowest b bits of minhash(x, seed_index).
HashValue bbit_minhash(const SparseVector& x, std::uint64_t seed_index,
                       const HashFamilyConfig& config);

/// Dispatches on config.kind.
HashValue hash_value(const SparseVector& x, std::uint64_t seed_index,
                     const HashFamilyConfig& config);

/// Values for seed indices first .. first + out.size() - 1.
void hash_range(const SparseVector& x, std::uint64_t first, std::span<HashValue> out,
                const HashFamilyConfig& config);

/// config.num_hashes values starting at seed index 0.
std::vector<HashValue> signature(const SparseVector& x, const HashFamilyConfig& config);

/// Fraction of seed indices in [0, n) on which x and y hash equal.
double estimate_collision(const SparseVector& x, const SparseVector& y,
                          const HashFamilyConfig& config, std::size_t n);

/// Collision probabilities each family is designed to achieve.
double minhash_collision_probability(double resemblance);
double simhash_collision_probability(double cosine);
/// R + (1 - R) 2^-b; (R + 1)/2 at b = 1.
double bbit_collision_probability(double resemblance, unsigned bits);

using Rational = boost::rational<std::int64_t>;

/// Exact MinHash collision probability under truly random permutations:
/// enumerates all dim! orderings of the universe. dim must be at most 9.
Rational exact_permutation_minhash_oracle(const SparseVector& x, const SparseVector& y);

}  // namespace lshbench
