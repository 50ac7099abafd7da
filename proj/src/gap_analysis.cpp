#include "lshbench/gap_analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "lshbench/hash_families.hpp"

namespace lshbench {

namespace {

constexpr double kZSlack = 1e-12;

void check_s0_c(double s0, double c) {
  if (!(s0 > 0.0 && s0 < 1.0)) throw std::invalid_argument("S0 must lie in (0, 1)");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in (0, 1]");
}

void check_z(double z, const char* name) {
  if (!(z >= 2.0 - kZSlack)) throw std::invalid_argument(fmt::format("{} must be >= 2", name));
}

std::string regime_label(const Regime& regime) {
  switch (regime.kind) {
    case RegimeKind::worst: return "worst";
    case RegimeKind::restricted: return fmt::format("restricted(z={:g})", regime.z);
    case RegimeKind::idealized: return fmt::format("idealized(z={:g})", regime.z);
  }
  return "?";
}

struct ZPair {
  double lower;
  double upper;
};

ZPair z_arguments(const Regime& regime, double s0) {
  switch (regime.kind) {
    case RegimeKind::worst: return {worst_case_z(s0), 2.0};
    case RegimeKind::restricted: return {regime.z, 2.0};
    case RegimeKind::idealized: return {regime.z, regime.z};
  }
  throw std::invalid_argument("unknown regime");
}

}  // namespace

std::string_view to_string(GapMethod method) {
  switch (method) {
    case GapMethod::simhash: return "simhash";
    case GapMethod::minhash: return "minhash";
    case GapMethod::bbit: return "bbit";
  }
  return "unknown";
}

std::string_view to_string(RegimeKind regime) {
  switch (regime) {
    case RegimeKind::worst: return "worst";
    case RegimeKind::restricted: return "restricted";
    case RegimeKind::idealized: return "idealized";
  }
  return "unknown";
}

GapMethod parse_gap_method(std::string_view name) {
  if (name == "simhash") return GapMethod::simhash;
  if (name == "minhash") return GapMethod::minhash;
  if (name == "bbit") return GapMethod::bbit;
  throw std::invalid_argument(fmt::format("unknown method '{}'", name));
}

RegimeKind parse_regime(std::string_view name) {
  if (name == "worst") return RegimeKind::worst;
  if (name == "restricted") return RegimeKind::restricted;
  if (name == "idealized") return RegimeKind::idealized;
  throw std::invalid_argument(fmt::format("unknown regime '{}'", name));
}

void GapQuery::validate() const {
  check_s0_c(s0, c);
  if (c * s0 >= 1.0) throw std::invalid_argument("cS0 must be below 1");
  if (regime.kind != RegimeKind::worst) check_z(regime.z, "z");
  if (method == GapMethod::bbit && (bits < 1 || bits > 64)) {
    throw std::invalid_argument("b must lie in 1..64");
  }
}

double rho_simhash(double s0, double c) {
  check_s0_c(s0, c);
  const double p1 = simhash_collision_probability(s0);
  const double p2 = simhash_collision_probability(c * s0);
  return std::log(p1) / std::log(p2);
}

double rho_minhash_general(double s0, double c, double z_lower, double z_upper) {
  check_s0_c(s0, c);
  check_z(z_lower, "z_lower");
  check_z(z_upper, "z_upper");
  const double r1 = s0 / (z_lower - s0);
  const double r2 = c * s0 / (z_upper - c * s0);
  return std::log(r1) / std::log(r2);
}

double rho_bbit_general(double s0, double c, double z_lower, double z_upper, unsigned bits) {
  check_s0_c(s0, c);
  check_z(z_lower, "z_lower");
  check_z(z_upper, "z_upper");
  const double p1 = bbit_collision_probability(s0 / (z_lower - s0), bits);
  const double p2 = bbit_collision_probability(c * s0 / (z_upper - c * s0), bits);
  return std::log(p1) / std::log(p2);
}

double rho_bbit_restricted(double s0, double c, double z_star, unsigned bits) {
  return rho_bbit_general(s0, c, z_star, 2.0, bits);
}

double rho(const GapQuery& query) {
  query.validate();
  if (query.method == GapMethod::simhash) return rho_simhash(query.s0, query.c);
  const auto z = z_arguments(query.regime, query.s0);
  if (query.method == GapMethod::minhash) {
    return rho_minhash_general(query.s0, query.c, z.lower, z.upper);
  }
  return rho_bbit_general(query.s0, query.c, z.lower, z.upper, query.bits);
}

RhoCurve rho_curve(GapMethod method, const Regime& regime, double c,
                   std::span<const double> s0_grid, unsigned bits) {
  RhoCurve curve;
  curve.method = method;
  curve.regime = regime;
  curve.bits = bits;
  curve.c = c;
  const std::string name =
      method == GapMethod::bbit ? fmt::format("bbit{}", bits) : std::string(to_string(method));
  curve.label = name + "/" + regime_label(regime);
  curve.points.reserve(s0_grid.size());
  for (std::size_t i = 0; i < s0_grid.size(); ++i) {
    if (i > 0 && !(s0_grid[i] > s0_grid[i - 1])) {
      throw std::invalid_argument("S0 grid must be strictly increasing");
    }
    GapQuery q{s0_grid[i], c, method, regime, bits};
    curve.points.push_back({s0_grid[i], rho(q)});
  }
  return curve;
}

std::vector<BoundsRow> bounds_curve(std::span<const double> s_grid) {
  std::vector<BoundsRow> rows;
  rows.reserve(s_grid.size());
  for (double s : s_grid) {
    const auto b = resemblance_bounds(s);
    rows.push_back({s, b.lower, b.upper});
  }
  return rows;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (hi < lo) throw std::invalid_argument("grid upper end below lower end");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Snap to 12 decimals so 0.8 + 9 * 0.02 prints as 0.98.
    grid[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return grid;
}

}  // namespace lshbench
