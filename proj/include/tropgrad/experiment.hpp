#pragma once

// Benchmark harness: seeded sweeps over methods x initializations, learning
// rate tuning, bound curves and the two application demos. Results are
// collected by (method, init) index, so the thread count never changes them.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropgrad/analysis.hpp"
#include "tropgrad/datagen.hpp"
#include "tropgrad/objectives.hpp"
#include "tropgrad/optimizers.hpp"

namespace tropgrad {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kConfigSchema = "tropgrad-config v1";

/// Initial point for init index i: shared by every method of a sweep.
std::vector<double> init_point(std::uint64_t seed, std::size_t init, std::size_t n);
/// Key of the SGD/TSGD sampling stream for (seed, init, method).
std::uint64_t sampling_key(std::uint64_t seed, std::size_t init, Method method);

struct SweepConfig {
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::map<Method, double> rates;
  std::size_t steps = 1000;
  std::size_t n_inits = 50;
  std::uint64_t seed = 0;
  ErrorMode error_mode = ErrorMode::Relative;
  std::optional<double> f_star{};  // nullopt: minimum observed in the batch
  bool normalize_each_step = true;
  bool record_trajectories = false;
  bool record_timing = true;
  std::size_t threads = 1;
};

struct RunResult {
  Method method = Method::TD;
  std::size_t init = 0;
  double rate = 0.0;
  RunRecord record;
  bool failed = false;
  std::string failure;
  double final_value = 0.0;
  double log_error = 0.0;
};

struct MethodSummary {
  Method method = Method::TD;
  ErrorStats stats;
  std::size_t failures = 0;
};

struct SweepResult {
  std::vector<RunResult> runs;  // sorted by (method order, init)
  double f_star = 0.0;
  std::vector<MethodSummary> summary;
};

/// Runs every (method, init) pair, then computes f_star and per-method error
/// statistics. Failed runs keep a NaN final value and are left out of means.
SweepResult run_sweep(const Objective& obj, const SweepConfig& cfg);

/// Minimum objective value over every step of every successful run.
double observed_minimum(const std::vector<RunResult>& runs);

/// Fills log_error of each run and the per-method summaries.
void score_sweep(SweepResult& result, ErrorMode mode);

struct TuneGrid {
  int log_min = -6;
  int log_max = 4;
  std::size_t inits = 10;

  std::vector<double> rates() const;  // e^log_min, ..., e^log_max
};

struct TuneResult {
  std::map<Method, double> best;
  // Per method, (rate, mean log error) for every grid point.
  std::map<Method, std::vector<std::pair<double, double>>> table;
  double f_star = 0.0;
};

/// Evaluates the grid with cfg.steps steps and grid.inits inits; errors are
/// measured against one f_star shared by the whole tuning batch. Picks the
/// rate with the smallest mean log error, ties to the smaller rate.
TuneResult tune_rates(const Objective& obj, const SweepConfig& cfg, const TuneGrid& grid);

struct BoundRow {
  std::size_t m = 0;
  double log_eps = 0.0;  // mean of log eps'_m over inits where it is valid; NaN if none
  double mean_log_dist = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

/// Bound curve from trajectories of TD runs on one objective: for every run
/// t* = tail mean, D and L via estimate_bound_params, eps'_m with K = 1.
std::vector<BoundRow> bound_curve(const std::vector<RunRecord>& runs, double alpha, std::size_t n);

struct TopologyCount {
  std::string objective;
  std::string method;
  std::string newick;
  std::size_t count = 0;
};

/// Shifts t so its smallest coordinate is 0, reads it as a cophenetic vector
/// and returns the canonical topology of its single-linkage projection.
std::string topology_of_point(std::span<const double> t, const std::vector<std::string>& labels);

struct FactorEstimate {
  Method method = Method::TD;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation over inits
  std::size_t runs = 0;
};

std::vector<FactorEstimate> factor_estimates(const SweepResult& sweep);

// ---------------------------------------------------------------------------
// Configuration and output files.

struct DatasetSpec {
  std::string file;  // if set, load instead of generating
  std::string family = "gaussian";  // gaussian | coalescent | branching
  std::size_t n = 6;                // dimension (gaussian)
  std::size_t leaves = 4;           // tree families
  std::size_t k = 10;
  std::uint64_t seed = 1;
  bool normalize = false;
};

struct ExperimentConfig {
  ObjectiveKind objective = ObjectiveKind::LinearRegression;
  double p = 2.0;
  std::size_t blocks = 0;  // Wasserstein M; 0 picks the default for N
  Convention convention = Convention::Min;
  DatasetSpec dataset{};
  std::optional<DatasetSpec> target{};
  SweepConfig sweep{};
  bool tune = false;
  TuneGrid grid{};
  std::string out = "results";
  bool emit_svg = false;

  // Application demos.
  double noise = 0.5;
  std::vector<double> factors{1.0, 0.8, 0.6};
};

/// Parses a `tropgrad-config v1` JSON document. InvalidInput on schema or
/// value errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of a string, hex-encoded.
std::string fnv1a_hex(const std::string& text);

Dataset materialize_dataset(const DatasetSpec& spec);

/// Default Wasserstein block count. For a cophenetic dimension n(n-1)/2 the
/// target lives on trees with one leaf fewer: (n-1)(n-2)/2, so 3 for N = 6 and
/// 21 for N = 28. Other dimensions get N/2 (at least 2).
std::size_t default_blocks(std::size_t n);

Objective build_objective(const ExperimentConfig& cfg);

void write_runs_csv(std::ostream& out, const SweepResult& r);
void write_ecdf_csv(std::ostream& out, const SweepResult& r);
void write_summary_csv(std::ostream& out, const SweepResult& r);
void write_trajectories_csv(std::ostream& out, const SweepResult& r);
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

/// Reads trajectories.csv back into one RunRecord per (method, init).
std::vector<RunRecord> read_trajectories_csv(std::istream& in);

}  // namespace tropgrad
