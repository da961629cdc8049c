// tropgrad command-line harness.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure
// in at least one run when --strict is given.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tropgrad/error.hpp"
#include "tropgrad/experiment.hpp"
#include "tropgrad/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tropgrad;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  bool strict = false;
};

// Flags shared by the sweep-style subcommands; unset ones leave the config alone.
struct SweepFlags {
  std::optional<std::string> objective;
  std::optional<double> p;
  std::optional<std::size_t> blocks;
  std::optional<std::string> convention;
  std::optional<std::string> data_file;
  std::optional<std::string> family;
  std::optional<std::size_t> n, leaves, k;
  std::optional<std::uint64_t> data_seed;
  std::optional<bool> normalize;
  std::vector<std::string> methods;
  std::vector<std::string> rates;  // METHOD=VALUE or a bare VALUE for every method
  bool tune = false;
  std::optional<int> grid_min, grid_max;
  std::optional<std::size_t> grid_inits;
  std::optional<std::size_t> steps, n_inits;
  std::optional<std::string> error_mode;
  std::optional<double> f_star;
  bool svg = false;
  bool trajectories = false;
  bool no_timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "JSON config (schema tropgrad-config v1)");
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("-o,--out", c.out, "Output directory");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it");
  app->add_flag("--strict", c.strict, "Exit with code 3 if any run fails numerically");
}

void add_dataset_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--data", f.data_file, "Load the dataset from a CSV file");
  app->add_option("--family", f.family, "gaussian | coalescent | branching");
  app->add_option("--n", f.n, "Dimension (gaussian)");
  app->add_option("--leaves", f.leaves, "Leaves (tree families)");
  app->add_option("--k", f.k, "Number of samples");
  app->add_option("--data-seed", f.data_seed, "Dataset seed");
}

void add_sweep_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--objective", f.objective, "fermat_weber | frechet_mean | linear_regression | wasserstein_p | wasserstein_inf");
  app->add_option("--p", f.p, "Wasserstein order");
  app->add_option("--blocks", f.blocks, "Wasserstein block count");
  app->add_option("--convention", f.convention, "min | max");
  add_dataset_flags(app, f);
  app->add_option("--methods", f.methods, "Methods to run")->delimiter(',');
  app->add_option("--rate", f.rates, "Learning rate: METHOD=VALUE, or VALUE for all methods")->delimiter(',');
  app->add_flag("--tune", f.tune, "Tune learning rates on the grid first");
  app->add_option("--grid-min", f.grid_min, "Smallest grid exponent");
  app->add_option("--grid-max", f.grid_max, "Largest grid exponent");
  app->add_option("--grid-inits", f.grid_inits, "Initializations per grid point");
  app->add_option("--steps", f.steps, "Steps per run");
  app->add_option("--n-inits", f.n_inits, "Initializations per method");
  app->add_option("--error-mode", f.error_mode, "relative | absolute");
  app->add_option("--f-star", f.f_star, "Known optimal value (default: minimum observed)");
  app->add_flag("--svg", f.svg, "Also write ecdf.svg");
  app->add_flag("--trajectories", f.trajectories, "Write trajectories.csv");
  app->add_flag("--no-timing", f.no_timing, "Write 0 for wall times so outputs are byte-reproducible");
}

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.sweep.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  if (c.threads) cfg.sweep.threads = *c.threads;
  if (cfg.sweep.threads == 0) cfg.sweep.threads = std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

void apply_dataset(const SweepFlags& f, DatasetSpec& d) {
  if (f.data_file) d.file = *f.data_file;
  if (f.family) d.family = *f.family;
  if (f.n) d.n = *f.n;
  if (f.leaves) d.leaves = *f.leaves;
  if (f.k) d.k = *f.k;
  if (f.data_seed) d.seed = *f.data_seed;
  if (f.normalize) d.normalize = *f.normalize;
}

void apply_sweep(const SweepFlags& f, ExperimentConfig& cfg) {
  if (f.objective) cfg.objective = parse_objective(*f.objective);
  if (f.p) cfg.p = *f.p;
  if (f.blocks) cfg.blocks = *f.blocks;
  if (f.convention) {
    if (*f.convention != "min" && *f.convention != "max") throw InvalidInput("--convention must be min or max");
    cfg.convention = *f.convention == "max" ? Convention::Max : Convention::Min;
  }
  apply_dataset(f, cfg.dataset);
  if (!f.methods.empty()) {
    cfg.sweep.methods.clear();
    for (const auto& m : f.methods) cfg.sweep.methods.push_back(parse_method(m));
  }
  for (const auto& r : f.rates) {
    const auto eq = r.find('=');
    try {
      if (eq == std::string::npos) {
        for (Method m : kAllMethods) cfg.sweep.rates[m] = std::stod(r);
      } else {
        cfg.sweep.rates[parse_method(r.substr(0, eq))] = std::stod(r.substr(eq + 1));
      }
    } catch (const std::logic_error&) {
      throw InvalidInput("--rate: cannot parse '" + r + "'");
    }
  }
  for (const auto& [m, v] : cfg.sweep.rates) {
    if (!(v > 0.0)) throw InvalidInput("learning rate for " + std::string(method_name(m)) + " must be > 0");
  }
  if (f.tune) cfg.tune = true;
  if (f.grid_min) cfg.grid.log_min = *f.grid_min;
  if (f.grid_max) cfg.grid.log_max = *f.grid_max;
  if (f.grid_inits) cfg.grid.inits = *f.grid_inits;
  if (f.steps) cfg.sweep.steps = *f.steps;
  if (f.n_inits) cfg.sweep.n_inits = *f.n_inits;
  if (f.error_mode) {
    if (*f.error_mode != "relative" && *f.error_mode != "absolute") {
      throw InvalidInput("--error-mode must be relative or absolute");
    }
    cfg.sweep.error_mode = *f.error_mode == "absolute" ? ErrorMode::Absolute : ErrorMode::Relative;
  }
  if (f.f_star) cfg.sweep.f_star = *f.f_star;
  if (f.svg) cfg.emit_svg = true;
  if (f.trajectories) cfg.sweep.record_trajectories = true;
  if (f.no_timing) cfg.sweep.record_timing = false;
  if (cfg.sweep.steps < 1) throw InvalidInput("steps must be >= 1");
  if (cfg.sweep.n_inits < 1) throw InvalidInput("n_inits must be >= 1");
}

// Output files all begin with the same provenance line.
class Outputs {
 public:
  Outputs(const ExperimentConfig& cfg, std::string command)
      : dir_(cfg.out), command_(std::move(command)), hash_(fnv1a_hex(config_to_json(cfg))), seed_(cfg.sweep.seed) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InvalidInput("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  std::string header() const {
    return "tropgrad " + std::string(kVersion) + "; command=" + command_ + "; config=" + hash_ +
           "; seed=" + std::to_string(seed_);
  }

  template <class Writer>
  fs::path csv(const std::string& name, Writer write) const {
    return file(name, [&](std::ostream& os) {
      os << "# " << header() << '\n';
      write(os);
    });
  }

  template <class Writer>
  fs::path file(const std::string& name, Writer write) const {
    const fs::path path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open " + path.string() + " for writing");
    write(os);
    if (!os) throw InvalidInput("write failed for " + path.string());
    return path;
  }

  const std::string& hash() const { return hash_; }

 private:
  fs::path dir_;
  std::string command_;
  std::string hash_;
  std::uint64_t seed_;
};

json policies_json() {
  return {
      {"init", "standard normal in R^N, canonicalized; shared by every method"},
      {"f_star", "minimum objective value observed over all runs and steps of the batch unless given"},
      {"error_floor", kErrorFloor},
      {"tie_break", "lowest index"},
      {"failed_runs", "NaN final value, excluded from means and ECDFs"},
      {"zero_gradient", "deterministic methods stop and repeat the last value; stochastic methods skip the step"},
      {"isa", std::string(kernels::isa_name(kernels::active_isa()))},
  };
}

json rates_json(const std::map<Method, double>& rates) {
  json j = json::object();
  for (const auto& [m, r] : rates) j[std::string(method_name(m))] = r;
  return j;
}

std::size_t count_failures(const SweepResult& r) {
  return static_cast<std::size_t>(std::count_if(r.runs.begin(), r.runs.end(), [](const RunResult& x) { return x.failed; }));
}

json failures_json(const SweepResult& r) {
  json j = json::array();
  for (const auto& run : r.runs) {
    if (run.failed) j.push_back({{"method", method_name(run.method)}, {"init", run.init}, {"error", run.failure}});
  }
  return j;
}

void write_metadata(const Outputs& out, const ExperimentConfig& cfg, json extra) {
  json j;
  j["tool"] = "tropgrad";
  j["version"] = kVersion;
  j["command"] = extra.value("command", "");
  extra.erase("command");
  j["config_hash"] = out.hash();
  j["seed"] = cfg.sweep.seed;
  j["config"] = json::parse(config_to_json(cfg));
  j["policies"] = policies_json();
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  out.file("metadata.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::string svg_comment(const Outputs& out) { return "<!-- " + out.header() + " -->\n"; }

void write_ecdf_svg(const Outputs& out, const SweepResult& r, const std::string& title) {
  std::vector<EcdfSeries> series;
  for (const auto& s : r.summary) series.push_back({std::string(method_name(s.method)), s.stats.ecdf});
  SvgOptions o;
  o.title = title;
  out.file("ecdf.svg", [&](std::ostream& os) { os << svg_comment(out) << ecdf_svg(series, o); });
}

void print_summary(const SweepResult& r) {
  std::printf("f_star = %.10g\n", r.f_star);
  std::printf("%-9s %16s %9s\n", "method", "mean_log_error", "failures");
  for (const auto& s : r.summary) {
    std::printf("%-9s %16.4f %9zu\n", std::string(method_name(s.method)).c_str(), s.stats.mean, s.failures);
  }
}

TuneResult tune_and_report(const Objective& obj, ExperimentConfig& cfg, const Outputs& out) {
  std::printf("tuning on e^%d..e^%d with %zu inits\n", cfg.grid.log_min, cfg.grid.log_max, cfg.grid.inits);
  auto tuned = tune_rates(obj, cfg.sweep, cfg.grid);
  for (const auto& [m, r] : tuned.best) cfg.sweep.rates[m] = r;
  json j;
  j["rates"] = rates_json(tuned.best);
  j["grid"] = {{"log_min", cfg.grid.log_min}, {"log_max", cfg.grid.log_max}, {"inits", cfg.grid.inits}};
  j["f_star"] = tuned.f_star;
  out.file("tuned_rates.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  out.csv("tune_table.csv", [&](std::ostream& os) {
    os << "method,rate,mean_log_error\n";
    for (Method m : cfg.sweep.methods) {
      for (const auto& [rate, err] : tuned.table.at(m)) {
        os << method_name(m) << ',' << format_double(rate) << ',' << format_double(err) << '\n';
      }
    }
  });
  for (const auto& [m, r] : tuned.best) std::printf("  %-9s %.6g\n", std::string(method_name(m)).c_str(), r);
  return tuned;
}

int finish(const Common& c, std::size_t failures) {
  if (failures > 0) {
    std::fprintf(stderr, "%zu run(s) failed numerically; see metadata.json\n", failures);
    if (c.strict) return kExitNumerical;
  }
  return 0;
}

int cmd_gen(const Common& c, const SweepFlags& f, const std::string& file) {
  ExperimentConfig cfg = base_config(c);
  apply_dataset(f, cfg.dataset);
  if (c.seed && !f.data_seed) cfg.dataset.seed = *c.seed;
  cfg.dataset.file.clear();
  const Dataset d = materialize_dataset(cfg.dataset);
  fs::path path = file.empty() ? fs::path(cfg.out) / "dataset.csv" : fs::path(file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_dataset(path.string(), d);
  std::printf("%s\n", path.string().c_str());
  for (const auto& [k, v] : d.metadata().entries()) std::printf("  %s = %s\n", k.c_str(), v.c_str());
  std::printf("  K = %zu, N = %zu\n", d.size(), d.dim());
  return 0;
}

int cmd_run(const Common& c, const SweepFlags& f) {
  ExperimentConfig cfg = base_config(c);
  apply_sweep(f, cfg);
  const Objective obj = build_objective(cfg);
  Outputs out(cfg, "run");
  std::optional<TuneResult> tuned;
  if (cfg.tune) tuned = tune_and_report(obj, cfg, out);
  const SweepResult r = run_sweep(obj, cfg.sweep);

  out.csv("runs.csv", [&](std::ostream& os) { write_runs_csv(os, r); });
  out.csv("ecdf.csv", [&](std::ostream& os) { write_ecdf_csv(os, r); });
  out.csv("summary.csv", [&](std::ostream& os) { write_summary_csv(os, r); });
  if (cfg.sweep.record_trajectories) {
    out.csv("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(os, r); });
  }
  if (cfg.emit_svg) write_ecdf_svg(out, r, std::string(obj.name()));
  json meta = {{"command", "run"},
               {"objective", obj.name()},
               {"N", obj.dim()},
               {"K", obj.samples()},
               {"f_star", r.f_star},
               {"rates", rates_json(cfg.sweep.rates)},
               {"failures", failures_json(r)}};
  if (tuned) meta["tuning_f_star"] = tuned->f_star;
  write_metadata(out, cfg, meta);
  print_summary(r);
  return finish(c, count_failures(r));
}

int cmd_tune(const Common& c, const SweepFlags& f) {
  ExperimentConfig cfg = base_config(c);
  apply_sweep(f, cfg);
  const Objective obj = build_objective(cfg);
  Outputs out(cfg, "tune");
  const auto tuned = tune_and_report(obj, cfg, out);
  write_metadata(out, cfg, {{"command", "tune"}, {"objective", obj.name()}, {"f_star", tuned.f_star}, {"rates", rates_json(tuned.best)}});
  return 0;
}

int cmd_bounds(const Common& c, const std::string& traj_file, double alpha, const std::string& method) {
  ExperimentConfig cfg = base_config(c);
  std::ifstream in(traj_file);
  if (!in) throw InvalidInput("cannot read trajectories file '" + traj_file + "'");
  auto runs = read_trajectories_csv(in);
  const Method keep = parse_method(method);
  std::erase_if(runs, [&](const RunRecord& r) { return r.method != keep; });
  if (runs.empty()) throw InvalidInput("no " + method + " trajectories in " + traj_file);
  const std::size_t n = runs.front().trajectory.front().size();
  const auto rows = bound_curve(runs, alpha, n);
  Outputs out(cfg, "bounds");
  out.csv("bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, rows); });
  write_metadata(out, cfg,
                 {{"command", "bounds"}, {"trajectories", traj_file}, {"alpha", alpha}, {"method", method}, {"runs", runs.size()}, {"N", n}});
  std::printf("%zu trajectories of %zu steps -> %s\n", runs.size(), rows.size(), (fs::path(cfg.out) / "bounds.csv").string().c_str());
  return 0;
}

struct DemoFlags {
  std::optional<double> noise;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> data_seed;
  std::optional<std::size_t> n_inits, steps;
  std::optional<int> grid_min, grid_max;
  std::optional<std::size_t> grid_inits;
  std::vector<std::string> methods;
  std::vector<double> factors;
  std::string file;
};

void add_demo_flags(CLI::App* app, DemoFlags& d) {
  app->add_option("--noise", d.noise, "Noise level");
  app->add_option("--k", d.k, "Number of samples");
  app->add_option("--data-seed", d.data_seed, "Dataset seed");
  app->add_option("--n-inits", d.n_inits, "Initializations per method");
  app->add_option("--steps", d.steps, "Steps per run");
  app->add_option("--grid-min", d.grid_min, "Smallest tuning exponent");
  app->add_option("--grid-max", d.grid_max, "Largest tuning exponent");
  app->add_option("--grid-inits", d.grid_inits, "Initializations per grid point");
  app->add_option("--methods", d.methods, "Methods to run")->delimiter(',');
}

// Demo defaults (100 inits, 100 samples) apply unless a config file is given.
ExperimentConfig demo_config(const Common& c, const DemoFlags& d, double noise, std::size_t k, int grid_min, int grid_max) {
  ExperimentConfig cfg = base_config(c);
  if (c.config.empty()) {
    cfg.sweep.n_inits = 100;
    cfg.dataset.k = k;
    cfg.noise = noise;
    cfg.grid.log_min = grid_min;
    cfg.grid.log_max = grid_max;
  }
  if (d.noise) cfg.noise = *d.noise;
  if (d.k) cfg.dataset.k = *d.k;
  if (d.data_seed) cfg.dataset.seed = *d.data_seed;
  if (d.n_inits) cfg.sweep.n_inits = *d.n_inits;
  if (d.steps) cfg.sweep.steps = *d.steps;
  if (d.grid_min) cfg.grid.log_min = *d.grid_min;
  if (d.grid_max) cfg.grid.log_max = *d.grid_max;
  if (d.grid_inits) cfg.grid.inits = *d.grid_inits;
  if (!d.methods.empty()) {
    cfg.sweep.methods.clear();
    for (const auto& m : d.methods) cfg.sweep.methods.push_back(parse_method(m));
  }
  if (!(cfg.noise >= 0.0)) throw InvalidInput("noise must be >= 0");
  cfg.tune = true;
  return cfg;
}

int cmd_phylo(const Common& c, const DemoFlags& d) {
  ExperimentConfig cfg = demo_config(c, d, 0.5, 100, -6, 4);
  const SpeciesTree species = demo_species_tree();
  const Dataset data = normalize_avg_trop_norm(gene_tree_dataset(species, cfg.dataset.k, cfg.noise, cfg.dataset.seed));
  Outputs out(cfg, "phylo-demo");
  out.csv("gene_trees.csv", [&](std::ostream& os) { write_dataset_csv(os, data); });

  const std::string truth = newick_topology(species.distances, species.labels);
  std::vector<TopologyCount> counts;
  json rates = json::object();
  std::size_t failures = 0;
  json fails = json::array();
  for (ObjectiveKind kind : {ObjectiveKind::FermatWeber, ObjectiveKind::FrechetMean}) {
    const Objective obj = kind == ObjectiveKind::FermatWeber ? Objective::fermat_weber(data) : Objective::frechet_mean(data);
    const std::string name(obj.name());
    std::printf("%s: tuning\n", name.c_str());
    const auto tuned = tune_rates(obj, cfg.sweep, cfg.grid);
    SweepConfig sc = cfg.sweep;
    sc.rates = tuned.best;
    rates[name] = rates_json(tuned.best);
    const SweepResult r = run_sweep(obj, sc);
    failures += count_failures(r);
    for (const auto& f : failures_json(r)) fails.push_back(f);
    std::map<std::pair<Method, std::string>, std::size_t> tally;
    for (const auto& run : r.runs) {
      if (!run.failed) ++tally[{run.method, topology_of_point(run.record.final_t, species.labels)}];
    }
    std::vector<TopologyCount> part;
    for (const auto& [key, n] : tally) part.push_back({name, std::string(method_name(key.first)), key.second, n});
    // Method order of the sweep, then most frequent topology first.
    std::stable_sort(part.begin(), part.end(), [&](const TopologyCount& a, const TopologyCount& b) {
      const auto ia = std::find(sc.methods.begin(), sc.methods.end(), parse_method(a.method));
      const auto ib = std::find(sc.methods.begin(), sc.methods.end(), parse_method(b.method));
      if (ia != ib) return ia < ib;
      if (a.count != b.count) return a.count > b.count;
      return a.newick < b.newick;
    });
    for (const auto& tc : part) {
      if (tc.newick == truth) std::printf("  %-9s %zu/%zu species topology\n", tc.method.c_str(), tc.count, sc.n_inits);
    }
    counts.insert(counts.end(), part.begin(), part.end());
  }
  out.csv("topology_counts.csv", [&](std::ostream& os) {
    os << "objective,method,newick,count\n";
    for (const auto& tc : counts) os << tc.objective << ',' << tc.method << ",\"" << tc.newick << "\"," << tc.count << '\n';
  });
  out.file("tuned_rates.json", [&](std::ostream& os) { os << rates.dump(2) << '\n'; });
  write_metadata(out, cfg,
                 {{"command", "phylo-demo"},
                  {"species_tree", truth},
                  {"noise", cfg.noise},
                  {"gene_trees", cfg.dataset.k},
                  {"rates", rates},
                  {"failures", fails}});
  return finish(c, failures);
}

int cmd_auction(const Common& c, const DemoFlags& d) {
  ExperimentConfig cfg = demo_config(c, d, 0.05, 100, -10, 5);
  if (!d.factors.empty()) cfg.factors = d.factors;
  AuctionInstance inst;
  if (!d.file.empty()) {
    std::ifstream in(d.file);
    if (!in) throw InvalidInput("cannot read auction file '" + d.file + "'");
    inst = read_auction_csv(in);
    cfg.factors = inst.true_factors;
  } else {
    inst = auction_dataset(cfg.factors, cfg.dataset.k, cfg.noise, cfg.dataset.seed);
  }
  Outputs out(cfg, "auction-demo");
  out.file("auction.csv", [&](std::ostream& os) { write_auction_csv(os, inst, cfg.dataset.seed, cfg.noise); });

  const Objective obj = Objective::linear_regression(inst.regression_data());
  const auto tuned = tune_rates(obj, cfg.sweep, cfg.grid);
  SweepConfig sc = cfg.sweep;
  sc.rates = tuned.best;
  const SweepResult r = run_sweep(obj, sc);
  const auto est = factor_estimates(r);

  const std::size_t n = inst.firms();
  out.csv("factors.csv", [&](std::ostream& os) {
    os << "method,rate,runs";
    for (std::size_t i = 0; i < n; ++i) os << ",f" << i + 1 << "_mean,f" << i + 1 << "_std";
    os << '\n';
    for (const auto& e : est) {
      os << method_name(e.method) << ',' << format_double(sc.rates.at(e.method)) << ',' << e.runs;
      for (std::size_t i = 0; i < n; ++i) {
        os << ',' << format_double(e.mean.empty() ? NAN : e.mean[i]) << ',' << format_double(e.stddev.empty() ? NAN : e.stddev[i]);
      }
      os << '\n';
    }
  });
  out.file("tuned_rates.json", [&](std::ostream& os) { os << json{{"rates", rates_json(tuned.best)}, {"f_star", tuned.f_star}}.dump(2) << '\n'; });
  write_metadata(out, cfg,
                 {{"command", "auction-demo"},
                  {"true_factors", cfg.factors},
                  {"noise", cfg.noise},
                  {"products", inst.products()},
                  {"f_star", r.f_star},
                  {"rates", rates_json(tuned.best)},
                  {"failures", failures_json(r)}});

  std::printf("true f = (");
  for (std::size_t i = 0; i < n; ++i) std::printf("%s%.3f", i ? ", " : "", cfg.factors[i]);
  std::printf(")\n");
  for (const auto& e : est) {
    std::printf("%-9s (", std::string(method_name(e.method)).c_str());
    for (std::size_t i = 0; i < e.mean.size(); ++i) std::printf("%s%.2f +- %.2f", i ? ", " : "", e.mean[i], e.stddev[i]);
    std::printf(")\n");
  }
  return finish(c, count_failures(r));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tropgrad: gradient methods on the tropical projective torus"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  SweepFlags sweep;
  std::string gen_file;
  auto* gen = app.add_subcommand("gen", "Generate a dataset CSV");
  add_common(gen, common);
  add_dataset_flags(gen, sweep);
  gen->add_flag("--normalize,!--no-normalize", sweep.normalize, "Scale to mean tropical norm 1");
  gen->add_option("--file", gen_file, "Output file (default <out>/dataset.csv)");

  auto* run = app.add_subcommand("run", "Sweep methods x initializations");
  add_common(run, common);
  add_sweep_flags(run, sweep);

  auto* tune = app.add_subcommand("tune", "Tune learning rates on the log grid");
  add_common(tune, common);
  add_sweep_flags(tune, sweep);

  std::string traj_file;
  double alpha = 1.0;
  std::string bound_method = "TD";
  auto* bounds = app.add_subcommand("bounds", "Error bound curve from recorded trajectories");
  add_common(bounds, common);
  bounds->add_option("--trajectories", traj_file, "trajectories.csv written by `run --trajectories`")->required();
  bounds->add_option("--alpha", alpha, "Learning rate the trajectories were run with");
  bounds->add_option("--method", bound_method, "Which method's trajectories to use");

  DemoFlags demo;
  auto* phylo = app.add_subcommand("phylo-demo", "Species tree estimation from simulated gene trees");
  add_common(phylo, common);
  add_demo_flags(phylo, demo);

  auto* auction = app.add_subcommand("auction-demo", "Hidden preference factors by tropical linear regression");
  add_common(auction, common);
  add_demo_flags(auction, demo);
  auction->add_option("--factors", demo.factors, "True factors, max 1")->delimiter(',');
  auction->add_option("--file", demo.file, "Load an auction CSV instead of generating one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*gen) return cmd_gen(common, sweep, gen_file);
    if (*run) return cmd_run(common, sweep);
    if (*tune) return cmd_tune(common, sweep);
    if (*bounds) return cmd_bounds(common, traj_file, alpha, bound_method);
    if (*phylo) return cmd_phylo(common, demo);
    if (*auction) return cmd_auction(common, demo);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
