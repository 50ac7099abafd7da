#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lshbench/gap_analysis.hpp"
#include "lshbench/harness.hpp"

namespace lshbench::csv {

/// Fixed formatting for every real-valued cell: shortest of %.12g.
std::string format_real(double v);

/// Header `S,lower,upper`.
void write_bounds(std::ostream& out, std::span<const BoundsRow> rows);

/// Header `S0,rho_<label>...`; all curves must share one grid.
void write_rho(std::ostream& out, std::span<const RhoCurve> curves);

/// Header `bin_lo,bin_hi,count`.
void write_z_histogram(std::ostream& out, const ZHistogram& hist);

/// Header `rank,median_S,median_R,lower,upper`.
void write_profile(std::ostream& out, const LocationProfile& profile);

/// Header `T,overlap`.
void write_overlap(std::ostream& out, std::span<const double> overlap);

/// Header `K,L,recall,fraction`.
void write_sweep(std::ostream& out, const BenchmarkReport& report);

/// Header `recall_level,min_fraction,best_K,best_L`; unattained levels
/// carry `NA` and empty best_K/best_L.
void write_min_fraction(std::ostream& out, const BenchmarkReport& report);

/// Header `query,candidate`, one row per candidate.
void write_candidates(std::ostream& out, const std::vector<std::vector<PointId>>& candidates);

}  // namespace lshbench::csv
