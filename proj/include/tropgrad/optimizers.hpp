#pragma once

// Direction rules, the step-size schedule and the seven iterative methods:
// classical descent (CD), tropical descent (TD), their stochastic versions
// (SGD, TSGD), Adam, Adamax and tropical Adamax (TrAdamax).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tropgrad/objectives.hpp"
#include "tropgrad/rng.hpp"
#include "tropgrad/trop_core.hpp"

namespace tropgrad {

enum class Method { CD, TD, SGD, TSGD, Adam, Adamax, TrAdamax };

inline constexpr std::array<Method, 7> kAllMethods = {Method::CD,   Method::TD,     Method::SGD,     Method::TSGD,
                                                      Method::Adam, Method::Adamax, Method::TrAdamax};

std::string_view method_name(Method m) noexcept;
/// Case-insensitive; throws InvalidInput for unknown names.
Method parse_method(std::string_view name);
bool is_stochastic(Method m) noexcept;
bool is_tropical(Method m) noexcept;

/// d_i = 1 iff g_i < 0.
std::vector<double> min_trop_direction(std::span<const double> g);
/// d_i = -1 iff g_i > 0.
std::vector<double> max_trop_direction(std::span<const double> g);

double euclidean_norm(std::span<const double> g);

/// a_m = gamma * grad_norm / sqrt(m). InvalidInput for m = 0.
double step_size(std::size_t m, double gamma, double grad_norm);

struct Betas {
  double beta1 = 0.9;
  double beta2 = 0.999;
};

/// Guard for 0/0 in the Adam-family ratios.
inline constexpr double kMomentEps = 1e-8;

struct OptimizerOptions {
  double rate = 0.1;  // gamma for CD/TD/SGD/TSGD, alpha for the Adam family
  Betas betas{};
  bool normalize_each_step = true;
  /// Direction convention for the tropical methods; nullopt takes the
  /// objective's convention.
  std::optional<Convention> direction{};
  /// Seeds the sampling stream of SGD/TSGD.
  std::uint64_t sample_seed = 0;
};

struct OptimizerState {
  Method method = Method::TD;
  std::vector<double> t;
  std::size_t m = 0;
  double rate = 0.1;
  Betas betas{};
  std::vector<double> v;
  std::vector<double> u;
  bool normalize_each_step = true;
  Convention direction = Convention::Min;
  CounterRng rng{0};
  bool terminated = false;

  // Diagnostics of the most recent step.
  double last_grad_norm_tr = 0.0;
  double last_step_length = 0.0;

  static OptimizerState init(Method method, std::span<const double> t0, const OptimizerOptions& opts,
                             Convention objective_convention = Convention::Min);
};

/// Applies one update of state.method with the given (sub)gradient and
/// advances m. A zero gradient marks the state terminated and leaves t as it
/// is. Non-finite g throws NumericalError.
void apply_update(OptimizerState& state, std::span<const double> g);

/// One iteration against an objective: computes the full gradient, or the
/// gradient of a uniformly drawn single-sample loss for SGD/TSGD, then calls
/// apply_update. For the stochastic methods a zero sample gradient skips the
/// move without terminating. Returns the gradient used.
std::vector<double> step(OptimizerState& state, const Objective& obj);

struct RunOptions {
  Method method = Method::TD;
  OptimizerOptions optimizer{};
  std::size_t steps = 1000;
  bool record_trajectory = false;
  bool record_timing = true;
};

struct RunRecord {
  Method method = Method::TD;
  std::vector<double> values;          // f(t_0), ..., f(t_steps)
  std::vector<double> grad_norms_tr;   // tropical norm of the gradient used at step m = 1..steps
  std::vector<std::vector<double>> trajectory;  // t_0..t_steps when recorded
  std::vector<double> final_t;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
  std::optional<std::size_t> terminated_at{};
};

/// Runs `steps` iterations from t0. Deterministic given all inputs. After a
/// termination the remaining entries of values replay the final value.
RunRecord run(const Objective& obj, std::span<const double> t0, const RunOptions& opts);

/// Standard normal in R^N, canonicalized.
std::vector<double> random_init(std::size_t n, CounterRng& rng);

}  // namespace tropgrad
