#include "lshbench/csv.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace lshbench::csv {

std::string format_real(double v) { return fmt::format("{:.12g}", v); }

void write_bounds(std::ostream& out, std::span<const BoundsRow> rows) {
  out << "S,lower,upper\n";
  for (const auto& r : rows) {
    out << format_real(r.s) << ',' << format_real(r.lower) << ',' << format_real(r.upper) << '\n';
  }
}

void write_rho(std::ostream& out, std::span<const RhoCurve> curves) {
  if (curves.empty()) throw std::invalid_argument("no rho curves to write");
  const auto n = curves.front().points.size();
  out << "S0";
  for (const auto& c : curves) {
    if (c.points.size() != n) throw std::invalid_argument("rho curves differ in grid size");
    std::string name = c.method == GapMethod::bbit ? fmt::format("bbit{}", c.bits)
                                                   : std::string(to_string(c.method));
    out << ",rho_" << name;
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << format_real(curves.front().points[i].s0);
    for (const auto& c : curves) {
      if (c.points[i].s0 != curves.front().points[i].s0) {
        throw std::invalid_argument("rho curves differ in grid values");
      }
      out << ',' << format_real(c.points[i].rho);
    }
    out << '\n';
  }
}

void write_z_histogram(std::ostream& out, const ZHistogram& hist) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out << format_real(hist.bin_lo(i)) << ',' << format_real(hist.bin_hi(i)) << ','
        << hist.counts[i] << '\n';
  }
}

void write_profile(std::ostream& out, const LocationProfile& profile) {
  out << "rank,median_S,median_R,lower,upper\n";
  for (const auto& r : profile.rows) {
    out << r.rank << ',' << format_real(r.median_cosine) << ','
        << format_real(r.median_resemblance) << ',' << format_real(r.lower) << ','
        << format_real(r.upper) << '\n';
  }
}

void write_overlap(std::ostream& out, std::span<const double> overlap) {
  out << "T,overlap\n";
  for (std::size_t t = 0; t < overlap.size(); ++t) {
    out << (t + 1) << ',' << format_real(overlap[t]) << '\n';
  }
}

void write_sweep(std::ostream& out, const BenchmarkReport& report) {
  out << "K,L,recall,fraction\n";
  for (const auto& c : report.cells) {
    out << c.K << ',' << c.L << ',' << format_real(c.recall) << ',' << format_real(c.fraction)
        << '\n';
  }
}

void write_min_fraction(std::ostream& out, const BenchmarkReport& report) {
  out << "recall_level,min_fraction,best_K,best_L\n";
  for (const auto& lv : report.levels) {
    out << format_real(lv.level) << ',';
    if (lv.min_fraction) {
      out << format_real(*lv.min_fraction) << ',' << lv.best_K << ',' << lv.best_L << '\n';
    } else {
      out << "NA,,\n";
    }
  }
}

void write_candidates(std::ostream& out, const std::vector<std::vector<PointId>>& candidates) {
  out << "query,candidate\n";
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    for (PointId id : candidates[q]) out << q << ',' << id << '\n';
  }
}

}  // namespace lshbench::csv
