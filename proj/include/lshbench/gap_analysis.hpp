#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lshbench {

/// Which collision-probability model enters the gap computation.
enum class GapMethod { simhash, minhash, bbit };

enum class RegimeKind { worst, restricted, idealized };

/// How resemblance is bounded from below for a pair at cosine S:
///   worst       R >= S^2
///   restricted  R >= S/(z* - S)       (data satisfy z <= z*)
///   idealized   R  = S/(z - S)        (fixed z, used on both sides)
struct Regime {
  RegimeKind kind = RegimeKind::worst;
  double z = 2.0;

  static Regime worst() { return {RegimeKind::worst, 2.0}; }
  static Regime restricted(double z_star) { return {RegimeKind::restricted, z_star}; }
  static Regime idealized(double z) { return {RegimeKind::idealized, z}; }
};

std::string_view to_string(GapMethod method);
std::string_view to_string(RegimeKind regime);
GapMethod parse_gap_method(std::string_view name);
RegimeKind parse_regime(std::string_view name);

struct GapQuery {
  double s0 = 0.9;
  double c = 0.5;
  GapMethod method = GapMethod::minhash;
  Regime regime;
  unsigned bits = 1;  // bbit only

  void validate() const;
};

// All logarithms are natural; rho is a ratio so the base cancels.
// Values above 1 are returned as computed.

/// log(1 - acos(S0)/pi) / log(1 - acos(cS0)/pi).
double rho_simhash(double s0, double c);

/// log(S0/(z_lower - S0)) / log(cS0/(z_upper - cS0)).
///
/// Worst case is z_lower = S0 + 1/S0 (then S0/(z_lower - S0) = S0^2),
/// z_upper = 2. Restricted is z_lower = z*, z_upper = 2. Idealized uses
/// z_lower = z_upper = z.
double rho_minhash_general(double s0, double c, double z_lower, double z_upper);

/// Same resemblance arguments pushed through p(R) = R + (1 - R) 2^-b.
double rho_bbit_general(double s0, double c, double z_lower, double z_upper, unsigned bits);

/// Restricted regime for b-bit hashing. At b = 1 this equals
/// log(2(z* - S0)/z*) / log(2 - cS0).
double rho_bbit_restricted(double s0, double c, double z_star, unsigned bits);

/// The z_lower that reduces the general form to the worst case.
inline double worst_case_z(double s0) { return s0 + 1.0 / s0; }

double rho(const GapQuery& query);

struct RhoPoint {
  double s0 = 0.0;
  double rho = 0.0;
};

struct RhoCurve {
  std::string label;  // e.g. "minhash/restricted(z=2.1)"
  GapMethod method = GapMethod::minhash;
  Regime regime;
  unsigned bits = 1;
  double c = 0.5;
  std::vector<RhoPoint> points;
};

/// Pointwise rho over a strictly increasing grid.
RhoCurve rho_curve(GapMethod method, const Regime& regime, double c, std::span<const double> s0_grid,
                   unsigned bits = 1);

struct BoundsRow {
  double s = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// (S, S^2, S/(2-S)) for each grid point in [0, 1].
std::vector<BoundsRow> bounds_curve(std::span<const double> s_grid);

/// lo, lo + step, ..., hi (inclusive, robust to rounding of the step count).
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace lshbench
