#include "tropgrad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tropgrad/error.hpp"
#include "tropgrad/rng.hpp"

namespace tropgrad {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kInitDomain = 0x696E69745F707473ULL;  // "init_pts"
constexpr std::uint64_t kSampleDomain = 0x73616D706C696E67ULL;  // "sampling"

std::size_t method_index(Method m) {
  return static_cast<std::size_t>(std::find(kAllMethods.begin(), kAllMethods.end(), m) - kAllMethods.begin());
}

// Runs jobs [0, count) on up to `threads` workers; job i writes only slot i.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<double> init_point(std::uint64_t seed, std::size_t init, std::size_t n) {
  CounterRng rng(substream_key(seed ^ kInitDomain, init));
  return random_init(n, rng);
}

std::uint64_t sampling_key(std::uint64_t seed, std::size_t init, Method method) {
  return substream_key(substream_key(seed ^ kSampleDomain, init), method_index(method));
}

namespace {

std::vector<RunResult> run_jobs(const Objective& obj, const SweepConfig& cfg) {
  if (cfg.steps < 1) throw InvalidInput("sweep: steps must be >= 1");
  if (cfg.n_inits < 1) throw InvalidInput("sweep: n_inits must be >= 1");
  if (cfg.methods.empty()) throw InvalidInput("sweep: no methods");
  for (Method m : cfg.methods) {
    const auto it = cfg.rates.find(m);
    if (it == cfg.rates.end()) throw InvalidInput("sweep: no learning rate for " + std::string(method_name(m)));
    if (!(it->second > 0.0)) throw InvalidInput("sweep: learning rates must be > 0");
  }

  std::vector<std::vector<double>> inits(cfg.n_inits);
  for (std::size_t i = 0; i < cfg.n_inits; ++i) inits[i] = init_point(cfg.seed, i, obj.dim());

  std::vector<RunResult> runs(cfg.methods.size() * cfg.n_inits);
  parallel_for(runs.size(), cfg.threads, [&](std::size_t job) {
    RunResult& r = runs[job];
    r.method = cfg.methods[job / cfg.n_inits];
    r.init = job % cfg.n_inits;
    r.rate = cfg.rates.at(r.method);
    RunOptions opts;
    opts.method = r.method;
    opts.steps = cfg.steps;
    opts.record_trajectory = cfg.record_trajectories;
    opts.record_timing = cfg.record_timing;
    opts.optimizer.rate = r.rate;
    opts.optimizer.normalize_each_step = cfg.normalize_each_step;
    opts.optimizer.sample_seed = sampling_key(cfg.seed, r.init, r.method);
    try {
      r.record = run(obj, inits[r.init], opts);
      r.final_value = r.record.values.back();
    } catch (const NumericalError& e) {
      r.failed = true;
      r.failure = e.what();
      r.final_value = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return runs;
}

}  // namespace

SweepResult run_sweep(const Objective& obj, const SweepConfig& cfg) {
  SweepResult result;
  result.runs = run_jobs(obj, cfg);
  result.f_star = cfg.f_star ? *cfg.f_star : observed_minimum(result.runs);
  score_sweep(result, cfg.error_mode);
  return result;
}

double observed_minimum(const std::vector<RunResult>& runs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    if (r.failed) continue;
    for (double v : r.record.values) best = std::min(best, v);
  }
  if (!std::isfinite(best)) throw NumericalError("every run failed; no baseline value");
  return best;
}

void score_sweep(SweepResult& result, ErrorMode mode) {
  result.summary.clear();
  std::vector<Method> order;
  for (const auto& r : result.runs) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  for (auto& r : result.runs) {
    r.log_error = r.failed ? std::numeric_limits<double>::quiet_NaN()
                           : log_relative_error(r.final_value, result.f_star, mode);
  }
  for (Method m : order) {
    MethodSummary s;
    s.method = m;
    std::vector<double> errs;
    for (const auto& r : result.runs) {
      if (r.method != m) continue;
      if (r.failed) {
        ++s.failures;
      } else {
        errs.push_back(r.log_error);
      }
    }
    if (!errs.empty()) {
      s.stats = ecdf(errs);
    } else {
      s.stats.mean = std::numeric_limits<double>::quiet_NaN();
    }
    result.summary.push_back(std::move(s));
  }
}

std::vector<double> TuneGrid::rates() const {
  if (log_max < log_min) throw InvalidInput("tune grid: log_max < log_min");
  std::vector<double> out;
  for (int e = log_min; e <= log_max; ++e) out.push_back(std::exp(static_cast<double>(e)));
  return out;
}

TuneResult tune_rates(const Objective& obj, const SweepConfig& cfg, const TuneGrid& grid) {
  const auto rates = grid.rates();
  std::vector<SweepResult> sweeps;
  sweeps.reserve(rates.size());
  for (double rate : rates) {
    SweepConfig c = cfg;
    c.n_inits = grid.inits;
    c.record_trajectories = false;
    c.rates.clear();
    for (Method m : c.methods) c.rates[m] = rate;
    SweepResult s;
    s.runs = run_jobs(obj, c);
    sweeps.push_back(std::move(s));
  }

  TuneResult out;
  if (cfg.f_star) {
    out.f_star = *cfg.f_star;
  } else {
    out.f_star = std::numeric_limits<double>::infinity();
    for (const auto& s : sweeps) out.f_star = std::min(out.f_star, observed_minimum(s.runs));
  }
  for (auto& s : sweeps) {
    s.f_star = out.f_star;
    score_sweep(s, cfg.error_mode);
  }
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method m = cfg.methods[mi];
    double best_err = std::numeric_limits<double>::infinity();
    double best_rate = rates.front();
    for (std::size_t g = 0; g < rates.size(); ++g) {
      const double mean = sweeps[g].summary[mi].stats.mean;
      out.table[m].emplace_back(rates[g], mean);
      if (std::isfinite(mean) && mean < best_err) {
        best_err = mean;
        best_rate = rates[g];
      }
    }
    out.best[m] = best_rate;
  }
  return out;
}

std::vector<BoundRow> bound_curve(const std::vector<RunRecord>& runs, double alpha, std::size_t n) {
  if (runs.empty()) throw InvalidInput("bound_curve: no trajectories");
  const std::size_t len = runs.front().trajectory.size();
  for (const auto& r : runs) {
    if (r.trajectory.size() != len) throw InvalidInput("bound_curve: trajectories differ in length");
  }
  struct PerRun {
    std::vector<double> t_star;
    BoundParams params;
  };
  std::vector<PerRun> per(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    BoundParams base;
    base.alpha = alpha;
    base.K = 1.0;
    base.N = static_cast<double>(n);
    const auto est = estimate_bound_params(std::span<const RunRecord>(&runs[i], 1), base);
    per[i] = {est.t_star, est.params};
  }

  std::vector<BoundRow> rows;
  rows.reserve(len > 0 ? len - 1 : 0);
  std::vector<double> logs(runs.size());
  for (std::size_t m = 1; m < len; ++m) {
    BoundRow row;
    row.m = m;
    double eps_acc = 0.0;
    std::size_t eps_n = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      logs[i] = std::log(std::max(d_tr(runs[i].trajectory[m], per[i].t_star), kErrorFloor));
      if (per[i].params.D > 0.0) {
        const auto b = epsilon_bound(m, per[i].params);
        if (b.valid_prime) {
          eps_acc += std::log(b.eps_prime);
          ++eps_n;
        }
      }
    }
    row.log_eps = eps_n ? eps_acc / static_cast<double>(eps_n) : std::numeric_limits<double>::quiet_NaN();
    row.mean_log_dist = mean_log_error(logs);
    row.p10 = percentile(logs, 0.1);
    row.p90 = percentile(logs, 0.9);
    rows.push_back(row);
  }
  return rows;
}

std::string topology_of_point(std::span<const double> t, const std::vector<std::string>& labels) {
  const double lo = *std::min_element(t.begin(), t.end());
  std::vector<double> shifted(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) shifted[i] = t[i] - lo;
  return newick_topology(single_linkage_ultrametric(matrix_from_vector(shifted)), labels);
}

std::vector<FactorEstimate> factor_estimates(const SweepResult& sweep) {
  std::vector<FactorEstimate> out;
  for (const auto& r : sweep.runs) {
    if (out.empty() || out.back().method != r.method) {
      FactorEstimate e;
      e.method = r.method;
      out.push_back(e);
    }
    if (r.failed) continue;
    auto& e = out.back();
    const auto f = recover_factors(r.record.final_t);
    if (e.mean.empty()) {
      e.mean.assign(f.size(), 0.0);
      e.stddev.assign(f.size(), 0.0);
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      e.mean[i] += f[i];
      e.stddev[i] += f[i] * f[i];  // sum of squares until normalized below
    }
    ++e.runs;
  }
  for (auto& e : out) {
    if (e.runs == 0) continue;
    const double n = static_cast<double>(e.runs);
    for (std::size_t i = 0; i < e.mean.size(); ++i) {
      e.mean[i] /= n;
      e.stddev[i] = std::sqrt(std::max(0.0, e.stddev[i] / n - e.mean[i] * e.mean[i]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

DatasetSpec parse_dataset(const json& j, const char* where) {
  DatasetSpec d;
  if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
  d.file = j.value("file", d.file);
  d.family = j.value("family", d.family);
  d.n = j.value("n", d.n);
  d.leaves = j.value("leaves", d.leaves);
  d.k = j.value("k", d.k);
  d.seed = j.value("seed", d.seed);
  d.normalize = j.value("normalize", d.normalize);
  if (d.file.empty() && d.family != "gaussian" && d.family != "coalescent" && d.family != "branching") {
    throw InvalidInput(std::string(where) + ".family must be gaussian, coalescent or branching");
  }
  return d;
}

json dataset_json(const DatasetSpec& d) {
  json j;
  if (!d.file.empty()) {
    j["file"] = d.file;
    return j;
  }
  j["family"] = d.family;
  if (d.family == "gaussian") {
    j["n"] = d.n;
  } else {
    j["leaves"] = d.leaves;
  }
  j["k"] = d.k;
  j["seed"] = d.seed;
  j["normalize"] = d.normalize;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");
  if (j.value("schema", std::string(kConfigSchema)) != kConfigSchema) {
    throw InvalidInput("config: schema must be '" + std::string(kConfigSchema) + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("objective")) {
      const auto& o = j["objective"];
      if (o.is_string()) {
        c.objective = parse_objective(o.get<std::string>());
      } else {
        c.objective = parse_objective(o.at("kind").get<std::string>());
        c.p = o.value("p", c.p);
        c.blocks = o.value("blocks", c.blocks);
        const std::string conv = o.value("convention", std::string("min"));
        if (conv != "min" && conv != "max") throw InvalidInput("config: objective.convention must be min or max");
        c.convention = conv == "max" ? Convention::Max : Convention::Min;
      }
    }
    if (j.contains("dataset")) c.dataset = parse_dataset(j["dataset"], "dataset");
    if (j.contains("target")) c.target = parse_dataset(j["target"], "target");
    if (j.contains("methods")) {
      c.sweep.methods.clear();
      for (const auto& m : j["methods"]) c.sweep.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("rates")) {
      const auto& r = j["rates"];
      if (r.is_string()) {
        if (r.get<std::string>() != "tune") throw InvalidInput("config: rates must be an object or \"tune\"");
        c.tune = true;
      } else if (r.is_number()) {
        for (Method m : kAllMethods) c.sweep.rates[m] = r.get<double>();
      } else {
        for (auto it = r.begin(); it != r.end(); ++it) c.sweep.rates[parse_method(it.key())] = it.value().get<double>();
      }
    }
    if (j.contains("tune_grid")) {
      const auto& g = j["tune_grid"];
      c.grid.log_min = g.value("log_min", c.grid.log_min);
      c.grid.log_max = g.value("log_max", c.grid.log_max);
      c.grid.inits = g.value("inits", c.grid.inits);
    }
    c.sweep.steps = j.value("steps", c.sweep.steps);
    c.sweep.n_inits = j.value("n_inits", c.sweep.n_inits);
    c.sweep.seed = j.value("seed", c.sweep.seed);
    c.sweep.threads = j.value("threads", c.sweep.threads);
    const std::string mode = j.value("error_mode", std::string("relative"));
    if (mode != "relative" && mode != "absolute") throw InvalidInput("config: error_mode must be relative or absolute");
    c.sweep.error_mode = mode == "absolute" ? ErrorMode::Absolute : ErrorMode::Relative;
    if (j.contains("f_star") && !j["f_star"].is_null()) c.sweep.f_star = j["f_star"].get<double>();
    c.sweep.record_trajectories = j.value("record_trajectories", c.sweep.record_trajectories);
    c.sweep.normalize_each_step = j.value("normalize_each_step", c.sweep.normalize_each_step);
    c.sweep.record_timing = j.value("record_timing", c.sweep.record_timing);
    c.emit_svg = j.value("emit_svg", c.emit_svg);
    c.out = j.value("out", c.out);
    c.noise = j.value("noise", c.noise);
    if (j.contains("factors")) c.factors = j["factors"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  if (c.sweep.steps < 1) throw InvalidInput("config: steps must be >= 1");
  if (c.sweep.n_inits < 1) throw InvalidInput("config: n_inits must be >= 1");
  if (c.grid.inits < 1) throw InvalidInput("config: tune_grid.inits must be >= 1");
  for (const auto& [m, r] : c.sweep.rates) {
    if (!(r > 0.0)) throw InvalidInput("config: learning rate for " + std::string(method_name(m)) + " must be > 0");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  json o;
  o["kind"] = std::string(objective_name(c.objective));
  if (c.objective == ObjectiveKind::WassersteinP) o["p"] = c.p;
  if (c.blocks) o["blocks"] = c.blocks;
  o["convention"] = c.convention == Convention::Max ? "max" : "min";
  j["objective"] = o;
  j["dataset"] = dataset_json(c.dataset);
  if (c.target) j["target"] = dataset_json(*c.target);
  json methods = json::array();
  for (Method m : c.sweep.methods) methods.push_back(std::string(method_name(m)));
  j["methods"] = methods;
  if (c.tune) {
    j["rates"] = "tune";
  } else {
    json r = json::object();
    for (const auto& [m, v] : c.sweep.rates) r[std::string(method_name(m))] = v;
    j["rates"] = r;
  }
  j["tune_grid"] = {{"log_min", c.grid.log_min}, {"log_max", c.grid.log_max}, {"inits", c.grid.inits}};
  j["steps"] = c.sweep.steps;
  j["n_inits"] = c.sweep.n_inits;
  j["seed"] = c.sweep.seed;
  j["error_mode"] = c.sweep.error_mode == ErrorMode::Absolute ? "absolute" : "relative";
  if (c.sweep.f_star) j["f_star"] = *c.sweep.f_star;
  j["record_trajectories"] = c.sweep.record_trajectories;
  j["normalize_each_step"] = c.sweep.normalize_each_step;
  j["record_timing"] = c.sweep.record_timing;
  j["emit_svg"] = c.emit_svg;
  j["noise"] = c.noise;
  j["factors"] = c.factors;
  return j.dump(2);
}

Dataset materialize_dataset(const DatasetSpec& spec) {
  Dataset d;
  if (!spec.file.empty()) {
    d = load_dataset(spec.file);
  } else if (spec.family == "gaussian") {
    d = gaussian_dataset(spec.n, spec.k, spec.seed);
  } else if (spec.family == "coalescent") {
    d = coalescent_dataset(spec.leaves, spec.k, spec.seed);
  } else if (spec.family == "branching") {
    d = branching_dataset(spec.leaves, spec.k, spec.seed);
  } else {
    throw InvalidInput("unknown dataset family '" + spec.family + "'");
  }
  return spec.normalize ? normalize_avg_trop_norm(d) : d;
}

std::size_t default_blocks(std::size_t n) {
  for (std::size_t leaves = 3; pair_count(leaves) <= n; ++leaves) {
    if (pair_count(leaves) == n) return std::max<std::size_t>(2, pair_count(leaves - 1));
  }
  return std::max<std::size_t>(2, n / 2);
}

Objective build_objective(const ExperimentConfig& cfg) {
  Dataset data = materialize_dataset(cfg.dataset);
  switch (cfg.objective) {
    case ObjectiveKind::FermatWeber:
      return Objective::fermat_weber(std::move(data), cfg.convention);
    case ObjectiveKind::FrechetMean:
      return Objective::frechet_mean(std::move(data), cfg.convention);
    case ObjectiveKind::LinearRegression:
      return Objective::linear_regression(std::move(data));
    case ObjectiveKind::WassersteinP:
    case ObjectiveKind::WassersteinInf:
      break;
  }
  const std::size_t m = cfg.blocks ? cfg.blocks : default_blocks(data.dim());
  DatasetSpec tspec;
  if (cfg.target) {
    tspec = *cfg.target;
  } else {
    tspec = cfg.dataset;
    tspec.file.clear();
    tspec.seed = cfg.dataset.seed + 1;
    if (tspec.family == "gaussian" || !cfg.dataset.file.empty()) {
      tspec.family = "gaussian";
      tspec.n = m;
    } else {
      tspec.leaves = leaves_for_dimension(m);
    }
  }
  tspec.k = data.size();
  Dataset target = materialize_dataset(tspec);
  if (target.dim() != m) throw InvalidInput("target dimension " + std::to_string(target.dim()) + " != block count " +
                                            std::to_string(m));
  auto partition = contiguous_partition(data.dim(), m);
  if (cfg.objective == ObjectiveKind::WassersteinInf) {
    return Objective::wasserstein_inf(std::move(data), std::move(target), std::move(partition));
  }
  return Objective::wasserstein(std::move(data), std::move(target), std::move(partition), cfg.p);
}

void write_runs_csv(std::ostream& out, const SweepResult& r) {
  out << "method,init,final_value,log_error,seconds\n";
  for (const auto& run : r.runs) {
    out << method_name(run.method) << ',' << run.init << ',' << fmt(run.final_value) << ',' << fmt(run.log_error)
        << ',' << fmt(run.record.wall_time_seconds) << '\n';
  }
}

void write_ecdf_csv(std::ostream& out, const SweepResult& r) {
  out << "method,error,cum_frac\n";
  for (const auto& s : r.summary) {
    for (const auto& [e, f] : s.stats.ecdf) out << method_name(s.method) << ',' << fmt(e) << ',' << fmt(f) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& r) {
  out << "method,mean_log_error\n";
  for (const auto& s : r.summary) out << method_name(s.method) << ',' << fmt(s.stats.mean) << '\n';
}

void write_trajectories_csv(std::ostream& out, const SweepResult& r) {
  if (r.runs.empty() || r.runs.front().record.trajectory.empty()) {
    throw InvalidInput("write_trajectories_csv: runs carry no trajectories");
  }
  const std::size_t n = r.runs.front().record.trajectory.front().size();
  out << "method,init,m,grad_norm_tr";
  for (std::size_t i = 0; i < n; ++i) out << ",t" << i;
  out << '\n';
  for (const auto& run : r.runs) {
    if (run.failed) continue;
    const auto& tr = run.record.trajectory;
    for (std::size_t m = 0; m < tr.size(); ++m) {
      const double g = m == 0 ? 0.0 : run.record.grad_norms_tr[m - 1];
      out << method_name(run.method) << ',' << run.init << ',' << m << ',' << fmt(g);
      for (double v : tr[m]) out << ',' << fmt(v);
      out << '\n';
    }
  }
}

std::vector<RunRecord> read_trajectories_csv(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  if (line.rfind("method,init,m,grad_norm_tr", 0) != 0) {
    throw InvalidInput("trajectories: missing header 'method,init,m,grad_norm_tr,...'");
  }
  std::vector<RunRecord> out;
  std::string cur_key;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 6) throw InvalidInput("trajectories: short row");
    const std::string key = cells[0] + "/" + cells[1];
    if (out.empty() || key != cur_key) {
      RunRecord r;
      r.method = parse_method(cells[0]);
      out.push_back(std::move(r));
      cur_key = key;
    }
    auto& r = out.back();
    std::vector<double> t;
    for (std::size_t c = 4; c < cells.size(); ++c) t.push_back(std::stod(cells[c]));
    if (!r.trajectory.empty()) r.grad_norms_tr.push_back(std::stod(cells[3]));
    r.trajectory.push_back(std::move(t));
  }
  if (out.empty()) throw InvalidInput("trajectories: no rows");
  for (auto& r : out) {
    r.steps = r.trajectory.size() - 1;
    r.final_t = r.trajectory.back();
  }
  return out;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "m,log_eps,mean_log_dist,p10,p90\n";
  for (const auto& r : rows) {
    out << r.m << ',' << fmt(r.log_eps) << ',' << fmt(r.mean_log_dist) << ',' << fmt(r.p10) << ',' << fmt(r.p90)
        << '\n';
  }
}

}  // namespace tropgrad
