#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lshbench/csv.hpp"
#include "lshbench/dataset.hpp"
#include "lshbench/gap_analysis.hpp"
#include "lshbench/harness.hpp"
#include "lshbench/lsh_index.hpp"

namespace lshbench::cli {

namespace fs = std::filesystem;

namespace {

/// Thrown for unattained recall levels when they are treated as a failure.
struct Unattained {};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

/// Reproducible command line for a parsed subcommand.
std::string resolved_config(const CLI::App& sub) {
  std::string line = "config: lshbench " + sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_max() == 0) {
      if (opt->count() > 0) line += " --" + name;
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    line += " --" + name + " " + value;
  }
  return line;
}

struct DataOptions {
  std::string query_path;
  std::string train_path;
  bool synthetic = false;
  std::uint64_t data_seed = kDefaultMasterSeed;
  std::size_t dim = 0;
  std::string manifest;

  void add_to(CLI::App* app) {
    app->add_option("--query", query_path, "query partition (SVMlight)");
    app->add_option("--train", train_path, "train partition (SVMlight)");
    app->add_flag("--synthetic", synthetic, "use the default synthetic corpus");
    app->add_option("--data-seed", data_seed, "seed for --synthetic")->capture_default_str();
    app->add_option("--dim", dim, "override the universe size (0 = infer)")->capture_default_str();
    app->add_option("--manifest", manifest, "check sizes against a known dataset, e.g. MNIST");
  }

  Dataset load(bool binarize) const {
    Dataset ds;
    if (synthetic) {
      if (!query_path.empty() || !train_path.empty()) {
        throw std::invalid_argument("--synthetic excludes --query/--train");
      }
      auto cfg = SynthConfig::default_corpus();
      cfg.seed = data_seed;
      ds = synthesize(cfg);
    } else {
      if (query_path.empty() || train_path.empty()) {
        throw std::invalid_argument("need --query and --train, or --synthetic");
      }
      std::optional<std::size_t> dim_override;
      if (dim > 0) dim_override = dim;
      if (!manifest.empty() && !dim_override) dim_override = manifest_entry(manifest).dim;
      ds = make_dataset(fs::path(train_path).stem().string(),
                        load_svmlight(query_path, binarize, dim_override),
                        load_svmlight(train_path, binarize, dim_override));
    }
    if (!manifest.empty()) check_against_manifest(ds, manifest_entry(manifest));
    return ds;
  }
};

int cmd_bounds(const std::string& grid_spec, const fs::path& out_dir, std::ostream& out) {
  const auto grid = parse_real_list(grid_spec);
  const auto rows = bounds_curve(grid);
  auto f = open_output(out_dir, "bounds.csv");
  csv::write_bounds(f, rows);
  finish(f, out_dir / "bounds.csv");
  out << "wrote " << rows.size() << " rows to " << (out_dir / "bounds.csv").string() << '\n';
  return kExitOk;
}

struct RhoOptions {
  std::string regime = "worst";
  double c = 0.5;
  std::string grid = "0.8:0.98:0.02";
  double z = 2.1;
  std::string methods = "simhash,minhash,bbit";
  std::string bits = "1";
};

int cmd_rho(const RhoOptions& o, const fs::path& out_dir, std::ostream& out) {
  const auto grid = parse_real_list(o.grid);
  Regime regime;
  regime.kind = parse_regime(o.regime);
  regime.z = regime.kind == RegimeKind::worst ? 2.0 : o.z;
  std::vector<RhoCurve> curves;
  for (const auto& m : split(o.methods, ',')) {
    const auto method = parse_gap_method(m);
    if (method == GapMethod::bbit) {
      for (auto b : parse_size_list(o.bits)) {
        curves.push_back(rho_curve(method, regime, o.c, grid, static_cast<unsigned>(b)));
      }
    } else {
      curves.push_back(rho_curve(method, regime, o.c, grid));
    }
  }
  const std::string name = fmt::format("rho_{}.csv", to_string(regime.kind));
  auto f = open_output(out_dir, name);
  csv::write_rho(f, curves);
  finish(f, out_dir / name);
  out << "wrote " << curves.size() << " curves x " << grid.size() << " points to "
      << (out_dir / name).string() << '\n';
  return kExitOk;
}

struct StatsOptions {
  DataOptions data;
  double bin_width = 0.01;
  std::size_t T = 1000;
  bool skip_empty = false;
  unsigned workers = 1;
};

int cmd_stats(const StatsOptions& o, const fs::path& out_dir, std::ostream& out) {
  const Dataset ds = o.data.load(true);
  out << fmt::format("dataset {}: {} query, {} train, dim {}\n", ds.name, ds.query.size(),
                     ds.train.size(), ds.dim);
  const std::size_t T = std::min(o.T, ds.train.size());
  const auto hist = z_histogram(ds, o.bin_width, o.skip_empty);
  const auto profile = top_location_profile(ds, T, o.workers);
  const auto overlap = ranklist_overlap(ds, T, o.workers);

  auto h = open_output(out_dir, "z_histogram.csv");
  csv::write_z_histogram(h, hist);
  finish(h, out_dir / "z_histogram.csv");
  auto p = open_output(out_dir, "profile.csv");
  csv::write_profile(p, profile);
  finish(p, out_dir / "profile.csv");
  auto v = open_output(out_dir, "overlap.csv");
  csv::write_overlap(v, overlap);
  finish(v, out_dir / "overlap.csv");
  out << fmt::format("z histogram: {} pairs in {} bins ({} skipped)\n", hist.total(),
                     hist.counts.size(), hist.skipped);
  out << fmt::format("bound check: {} of {} pairs outside [S^2, S/(2-S)]\n",
                     profile.pair_violations, profile.pairs_checked);
  return kExitOk;
}

struct BenchOptions {
  DataOptions data;
  std::string families = "minhash,simhash";
  unsigned bits = 1;
  std::string K = "1:12";
  std::string L = "1:50";
  bool full_grid = false;
  std::string k = "1,10";
  std::string recall = "0.1:1:0.1";
  bool real_valued = false;
  bool allow_unattained = false;
  std::uint64_t seed = kDefaultMasterSeed;
  unsigned workers = 1;
};

int cmd_bench(const BenchOptions& o, const fs::path& out_dir, std::ostream& out) {
  const Dataset ds = o.data.load(!o.real_valued);
  out << fmt::format("dataset {}: {} query, {} train, dim {}\n", ds.name, ds.query.size(),
                     ds.train.size(), ds.dim);
  SweepConfig cfg;
  cfg.K_values = o.full_grid ? SweepConfig::full_K() : parse_size_list(o.K);
  cfg.L_values = o.full_grid ? SweepConfig::full_L() : parse_size_list(o.L);
  cfg.recall_levels = parse_real_list(o.recall);
  cfg.real_valued = o.real_valued;
  cfg.workers = o.workers;
  bool unattained = false;
  for (auto k : parse_size_list(o.k)) {
    cfg.k = k;
    const auto gold = gold_topk(ds, k, o.workers);
    for (const auto& fam : split(o.families, ',')) {
      const auto kind = parse_hash_kind(fam);
      cfg.family = kind == HashKind::bbit_minhash ? HashFamilyConfig::bbit(o.bits, o.seed)
                                                  : HashFamilyConfig{kind, 0, o.seed, 1};
      const auto report = sweep(ds, gold, cfg);
      const std::string stem = fmt::format("{}_k{}", report.family, k);
      auto s = open_output(out_dir, "sweep_" + stem + ".csv");
      csv::write_sweep(s, report);
      finish(s, out_dir / ("sweep_" + stem + ".csv"));
      auto m = open_output(out_dir, "minfrac_" + stem + ".csv");
      csv::write_min_fraction(m, report);
      finish(m, out_dir / ("minfrac_" + stem + ".csv"));
      out << fmt::format("{} top-{}:\n  recall  min_fraction  K   L\n", report.family, k);
      for (const auto& lv : report.levels) {
        if (lv.min_fraction) {
          out << fmt::format("  {:<6g}  {:<12.6f}  {:<3} {}\n", lv.level, *lv.min_fraction,
                             lv.best_K, lv.best_L);
        } else {
          out << fmt::format("  {:<6g}  unattained\n", lv.level);
          unattained = true;
        }
      }
    }
  }
  if (unattained && !o.allow_unattained) throw Unattained{};
  return kExitOk;
}

struct SynthOptions {
  std::size_t n_query = 200;
  std::size_t n_train = 2000;
  std::size_t dim = 5000;
  std::size_t neighbors = 10;
  std::size_t f_min = 20;
  std::size_t f_max = 160;
  bool weighted = false;
  std::uint64_t seed = kDefaultMasterSeed;
};

int cmd_synth(const SynthOptions& o, const fs::path& out_dir, std::ostream& out) {
  auto cfg = SynthConfig::default_corpus();
  cfg.n_query = o.n_query;
  cfg.n_train = o.n_train;
  cfg.dim = o.dim;
  cfg.neighbors_per_query = o.neighbors;
  cfg.f_min = o.f_min;
  cfg.f_max = o.f_max;
  cfg.weighted = o.weighted;
  cfg.seed = o.seed;
  const auto ds = synthesize(cfg);
  fs::create_directories(out_dir);
  write_svmlight(out_dir / "query.svm", ds.query);
  write_svmlight(out_dir / "train.svm", ds.train);
  out << fmt::format("wrote {} query and {} train points (dim {}) to {}\n", ds.query.size(),
                     ds.train.size(), ds.dim, out_dir.string());
  return kExitOk;
}

struct IndexOptions {
  std::string train_path;
  std::string query_path;
  std::string snapshot;
  std::string family = "minhash";
  unsigned bits = 1;
  std::size_t K = 4;
  std::size_t L = 10;
  std::size_t dim = 0;
  std::uint64_t seed = kDefaultMasterSeed;
  unsigned workers = 1;
};

int cmd_index(const IndexOptions& o, const fs::path& out_dir, std::ostream& out) {
  std::optional<std::size_t> dim_override;
  if (o.dim > 0) dim_override = o.dim;
  std::optional<LshIndex> index;
  std::size_t dim = 0;
  if (!o.train_path.empty()) {
    IndexConfig cfg;
    cfg.K = o.K;
    cfg.L = o.L;
    const auto kind = parse_hash_kind(o.family);
    cfg.family = kind == HashKind::bbit_minhash ? HashFamilyConfig::bbit(o.bits, o.seed)
                                                : HashFamilyConfig{kind, 0, o.seed, 1};
    const auto train = load_svmlight(o.train_path, kind != HashKind::simhash, dim_override);
    dim = train.dim;
    index = LshIndex::build(train.points, cfg, o.workers);
    out << fmt::format("indexed {} points into {} tables ({} entries)\n", index->num_points(),
                       cfg.L, index->num_entries());
    if (!o.snapshot.empty()) {
      std::ofstream f(o.snapshot, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + o.snapshot);
      index->save(f);
      out << "snapshot written to " << o.snapshot << '\n';
    }
  } else if (!o.snapshot.empty()) {
    std::ifstream f(o.snapshot, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + o.snapshot);
    index = LshIndex::load(f);
    out << fmt::format("loaded snapshot with {} points, K={} L={}\n", index->num_points(),
                       index->config().K, index->config().L);
  } else {
    throw std::invalid_argument("index needs --train (build) or --snapshot (load)");
  }
  if (!o.query_path.empty()) {
    const bool binary = index->config().family.kind != HashKind::simhash;
    auto queries = load_svmlight(o.query_path, binary, dim_override);
    std::vector<std::vector<PointId>> candidates;
    candidates.reserve(queries.points.size());
    for (const auto& q : queries.points) {
      const auto width = std::max(dim, q.dim());
      candidates.push_back(index->query(q.with_dim(width)));
    }
    auto f = open_output(out_dir, "candidates.csv");
    csv::write_candidates(f, candidates);
    finish(f, out_dir / "candidates.csv");
    out << fmt::format("answered {} queries\n", candidates.size());
  }
  return kExitOk;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& spec) {
  const auto colon = split(spec, ':');
  if (colon.size() == 3) return make_grid(to_real(colon[0]), to_real(colon[1]), to_real(colon[2]));
  if (colon.size() == 2) return make_grid(to_real(colon[0]), to_real(colon[1]), 1.0);
  if (colon.size() != 1) throw std::invalid_argument("expected lo:hi[:step] or a comma list");
  std::vector<double> out;
  for (const auto& p : split(spec, ',')) out.push_back(to_real(p));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& spec) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(spec)) {
    if (v < 0 || v != std::floor(v)) throw std::invalid_argument("expected integers in '" + spec + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MinHash / SimHash analysis and benchmark harness", "lshbench"};
  app.require_subcommand(1);
  std::string out_dir = "out";

  auto* bounds = app.add_subcommand("bounds", "resemblance bounds as a function of cosine");
  std::string bounds_grid = "0:1:0.01";
  bounds->add_option("--grid", bounds_grid, "S grid (lo:hi:step or list)")->capture_default_str();
  bounds->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* rho = app.add_subcommand("rho", "rho curves for each hash family");
  RhoOptions rho_opt;
  rho->add_option("--regime", rho_opt.regime, "worst | restricted | idealized")->capture_default_str();
  rho->add_option("--c", rho_opt.c, "approximation factor in (0, 1]")->capture_default_str();
  rho->add_option("--grid", rho_opt.grid, "S0 grid")->capture_default_str();
  rho->add_option("--z", rho_opt.z, "z* (restricted) or z (idealized)")->capture_default_str();
  rho->add_option("--methods", rho_opt.methods, "comma list of simhash, minhash, bbit")
      ->capture_default_str();
  rho->add_option("--bits", rho_opt.bits, "b values for bbit")->capture_default_str();
  rho->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "z histogram, rank profiles and rank-list overlap");
  StatsOptions stats_opt;
  stats_opt.data.add_to(stats);
  stats->add_option("--bin-width", stats_opt.bin_width, "z histogram bin width")->capture_default_str();
  stats->add_option("--T", stats_opt.T, "top locations (clamped to train size)")->capture_default_str();
  stats->add_flag("--skip-empty", stats_opt.skip_empty, "skip pairs with an empty vector");
  stats->add_option("--workers", stats_opt.workers, "worker threads")->capture_default_str();
  stats->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "(K, L) retrieval sweep");
  BenchOptions bench_opt;
  bench_opt.data.add_to(bench);
  bench->add_option("--families", bench_opt.families, "comma list of minhash, simhash, bbit")
      ->capture_default_str();
  bench->add_option("--bits", bench_opt.bits, "b for bbit")->capture_default_str();
  bench->add_option("--K", bench_opt.K, "K values")->capture_default_str();
  bench->add_option("--L", bench_opt.L, "L values")->capture_default_str();
  bench->add_flag("--full-grid", bench_opt.full_grid, "K in 1..30, L in 1..200");
  bench->add_option("--k", bench_opt.k, "top-k gold standard sizes")->capture_default_str();
  bench->add_option("--recall", bench_opt.recall, "recall levels")->capture_default_str();
  bench->add_flag("--real-valued", bench_opt.real_valued,
                  "SimHash on weights, MinHash on binarized data, weighted gold standard");
  bench->add_flag("--allow-unattained", bench_opt.allow_unattained,
                  "exit 0 even if a recall level is unattained");
  bench->add_option("--seed", bench_opt.seed, "master hash seed")->capture_default_str();
  bench->add_option("--workers", bench_opt.workers, "worker threads")->capture_default_str();
  bench->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "write a synthetic planted-neighbor corpus");
  SynthOptions synth_opt;
  synth->add_option("--n-query", synth_opt.n_query)->capture_default_str();
  synth->add_option("--n-train", synth_opt.n_train)->capture_default_str();
  synth->add_option("--dim", synth_opt.dim)->capture_default_str();
  synth->add_option("--neighbors", synth_opt.neighbors, "planted neighbors per query")
      ->capture_default_str();
  synth->add_option("--f-min", synth_opt.f_min)->capture_default_str();
  synth->add_option("--f-max", synth_opt.f_max)->capture_default_str();
  synth->add_flag("--weighted", synth_opt.weighted, "attach positive real weights");
  synth->add_option("--seed", synth_opt.seed)->capture_default_str();
  synth->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* index = app.add_subcommand("index", "build or load an index snapshot, optionally query it");
  IndexOptions index_opt;
  index->add_option("--train", index_opt.train_path, "points to index (SVMlight)");
  index->add_option("--query", index_opt.query_path, "queries (SVMlight)");
  index->add_option("--snapshot", index_opt.snapshot, "snapshot path to write (with --train) or read");
  index->add_option("--family", index_opt.family)->capture_default_str();
  index->add_option("--bits", index_opt.bits)->capture_default_str();
  index->add_option("--K", index_opt.K)->capture_default_str();
  index->add_option("--L", index_opt.L)->capture_default_str();
  index->add_option("--dim", index_opt.dim, "universe size (0 = infer)")->capture_default_str();
  index->add_option("--seed", index_opt.seed)->capture_default_str();
  index->add_option("--workers", index_opt.workers)->capture_default_str();
  index->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    out << resolved_config(*chosen) << '\n';
    const fs::path dir(out_dir);
    if (chosen == bounds) return cmd_bounds(bounds_grid, dir, out);
    if (chosen == rho) return cmd_rho(rho_opt, dir, out);
    if (chosen == stats) return cmd_stats(stats_opt, dir, out);
    if (chosen == bench) return cmd_bench(bench_opt, dir, out);
    if (chosen == synth) return cmd_synth(synth_opt, dir, out);
    if (chosen == index) return cmd_index(index_opt, dir, out);
  } catch (const Unattained&) {
    err << "warning: some recall levels were not attained by any (K, L)\n";
    return kExitUnattained;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace lshbench::cli
