#include "tropgrad/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "tropgrad/error.hpp"

namespace tropgrad {

namespace {

bool all_zero(std::span<const double> g) {
  return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
}

void normalize_in_place(std::vector<double>& t) {
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  for (double& v : t) v -= mean;
}

double safe_ratio(double num, double den) { return den < kMomentEps ? 0.0 : num / den; }

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::CD:
      return "CD";
    case Method::TD:
      return "TD";
    case Method::SGD:
      return "SGD";
    case Method::TSGD:
      return "TSGD";
    case Method::Adam:
      return "Adam";
    case Method::Adamax:
      return "Adamax";
    case Method::TrAdamax:
      return "TrAdamax";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(name);
  for (Method m : kAllMethods) {
    if (lower(method_name(m)) == key) return m;
  }
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

bool is_stochastic(Method m) noexcept { return m == Method::SGD || m == Method::TSGD; }

bool is_tropical(Method m) noexcept { return m == Method::TD || m == Method::TSGD || m == Method::TrAdamax; }

std::vector<double> min_trop_direction(std::span<const double> g) {
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i] < 0.0 ? 1.0 : 0.0;
  return d;
}

std::vector<double> max_trop_direction(std::span<const double> g) {
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i] > 0.0 ? -1.0 : 0.0;
  return d;
}

double euclidean_norm(std::span<const double> g) {
  double acc = 0.0;
  for (double v : g) acc += v * v;
  return std::sqrt(acc);
}

double step_size(std::size_t m, double gamma, double grad_norm) {
  if (m == 0) throw InvalidInput("step_size: step counter starts at 1");
  return gamma * grad_norm / std::sqrt(static_cast<double>(m));
}

OptimizerState OptimizerState::init(Method method, std::span<const double> t0, const OptimizerOptions& opts,
                                    Convention objective_convention) {
  if (!(opts.rate > 0.0) || !std::isfinite(opts.rate)) throw InvalidInput("optimizer: learning rate must be > 0");
  if (!(opts.betas.beta1 >= 0.0 && opts.betas.beta1 < 1.0 && opts.betas.beta2 >= 0.0 && opts.betas.beta2 < 1.0)) {
    throw InvalidInput("optimizer: betas must lie in [0, 1)");
  }
  OptimizerState s;
  s.method = method;
  s.t.assign(t0.begin(), t0.end());
  if (s.t.size() < 2) throw DimensionError("optimizer: dimension must be at least 2");
  s.rate = opts.rate;
  s.betas = opts.betas;
  s.v.assign(s.t.size(), 0.0);
  s.u.assign(s.t.size(), 0.0);
  s.normalize_each_step = opts.normalize_each_step;
  s.direction = opts.direction.value_or(objective_convention);
  s.rng = CounterRng(opts.sample_seed);
  return s;
}

void apply_update(OptimizerState& s, std::span<const double> g) {
  if (g.size() != s.t.size()) throw DimensionError("apply_update: gradient length differs from iterate");
  for (double v : g) {
    if (!std::isfinite(v)) throw NumericalError("non-finite gradient at step " + std::to_string(s.m + 1));
  }
  ++s.m;
  s.last_grad_norm_tr = trop_norm(g);
  s.last_step_length = 0.0;
  if (all_zero(g)) {
    s.terminated = true;
    return;
  }

  const std::size_t n = s.t.size();
  const double mm = static_cast<double>(s.m);
  const bool min_dir = s.direction == Convention::Min;

  switch (s.method) {
    case Method::CD:
    case Method::SGD: {
      const double scale = s.rate / std::sqrt(mm);
      for (std::size_t i = 0; i < n; ++i) s.t[i] -= scale * g[i];
      s.last_step_length = step_size(s.m, s.rate, euclidean_norm(g));
      break;
    }
    case Method::TD:
    case Method::TSGD: {
      const double a = step_size(s.m, s.rate, s.last_grad_norm_tr);
      const auto d = min_dir ? min_trop_direction(g) : max_trop_direction(g);
      for (std::size_t i = 0; i < n; ++i) s.t[i] += a * d[i];
      s.last_step_length = a;
      break;
    }
    case Method::Adam: {
      const double c1 = 1.0 - std::pow(s.betas.beta1, mm);
      const double c2 = 1.0 - std::pow(s.betas.beta2, mm);
      for (std::size_t i = 0; i < n; ++i) {
        s.v[i] = s.betas.beta1 * s.v[i] + (1.0 - s.betas.beta1) * g[i];
        s.u[i] = s.betas.beta2 * s.u[i] + (1.0 - s.betas.beta2) * g[i] * g[i];
        s.t[i] -= s.rate * (s.v[i] / c1) / (std::sqrt(s.u[i] / c2) + kMomentEps);
      }
      break;
    }
    case Method::Adamax: {
      const double lr = s.rate / (1.0 - std::pow(s.betas.beta1, mm));
      for (std::size_t i = 0; i < n; ++i) {
        s.v[i] = s.betas.beta1 * s.v[i] + (1.0 - s.betas.beta1) * g[i];
        s.u[i] = std::max(s.betas.beta2 * s.u[i], std::abs(g[i]));
        s.t[i] -= lr * safe_ratio(s.v[i], s.u[i]);
      }
      break;
    }
    case Method::TrAdamax: {
      // Moments of the unnormalized tropical direction. The max convention is
      // the recursion as usually written (d on g > 0, subtract); the min
      // convention is its mirror (d on g < 0, add).
      const double range = s.last_grad_norm_tr;
      const double lr = s.rate / (1.0 - std::pow(s.betas.beta1, mm));
      const double sign = min_dir ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool on = min_dir ? g[i] < 0.0 : g[i] > 0.0;
        const double d = on ? range : 0.0;
        s.v[i] = s.betas.beta1 * s.v[i] + (1.0 - s.betas.beta1) * d;
        s.u[i] = std::max(s.betas.beta2 * s.u[i], std::abs(d));
        s.t[i] += sign * lr * safe_ratio(s.v[i], s.u[i]);
      }
      break;
    }
  }
  for (double v : s.t) {
    if (!std::isfinite(v)) throw NumericalError("non-finite iterate at step " + std::to_string(s.m));
  }
  if (s.normalize_each_step) normalize_in_place(s.t);
}

std::vector<double> step(OptimizerState& s, const Objective& obj) {
  std::vector<double> g(s.t.size());
  if (is_stochastic(s.method)) {
    const std::size_t k = static_cast<std::size_t>(s.rng.below(obj.samples()));
    obj.evaluate_sample(k, s.t, g);
    if (all_zero(g)) {
      ++s.m;
      s.last_grad_norm_tr = 0.0;
      s.last_step_length = 0.0;
      if (s.normalize_each_step) normalize_in_place(s.t);
      return g;
    }
  } else {
    obj.evaluate(s.t, g);
  }
  apply_update(s, g);
  return g;
}

RunRecord run(const Objective& obj, std::span<const double> t0, const RunOptions& opts) {
  if (opts.steps < 1) throw InvalidInput("run: steps must be >= 1");
  if (t0.size() != obj.dim()) throw DimensionError("run: initial point has the wrong dimension");
  const auto start = std::chrono::steady_clock::now();

  auto state = OptimizerState::init(opts.method, t0, opts.optimizer, obj.convention());
  RunRecord rec;
  rec.method = opts.method;
  rec.seed = opts.optimizer.sample_seed;
  rec.steps = opts.steps;
  rec.values.reserve(opts.steps + 1);
  rec.grad_norms_tr.reserve(opts.steps);
  if (opts.record_trajectory) rec.trajectory.reserve(opts.steps + 1);

  std::vector<double> g(obj.dim());
  double f = obj.evaluate(state.t, g);
  if (!std::isfinite(f)) throw NumericalError("non-finite objective value at the initial point");
  rec.values.push_back(f);
  if (opts.record_trajectory) rec.trajectory.push_back(state.t);

  for (std::size_t m = 1; m <= opts.steps; ++m) {
    if (state.terminated) {
      rec.values.push_back(f);
      rec.grad_norms_tr.push_back(0.0);
      if (opts.record_trajectory) rec.trajectory.push_back(state.t);
      continue;
    }
    if (is_stochastic(state.method)) {
      step(state, obj);
    } else {
      apply_update(state, g);  // g is the gradient at the current iterate
    }
    if (state.terminated) rec.terminated_at = m;
    rec.grad_norms_tr.push_back(state.last_grad_norm_tr);
    f = obj.evaluate(state.t, g);
    if (!std::isfinite(f)) throw NumericalError("non-finite objective value at step " + std::to_string(m));
    rec.values.push_back(f);
    if (opts.record_trajectory) rec.trajectory.push_back(state.t);
  }
  rec.final_t = state.t;
  if (opts.record_timing) {
    rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<double> random_init(std::size_t n, CounterRng& rng) {
  std::vector<double> raw(n);
  for (double& v : raw) v = rng.normal();
  const auto p = TropPoint::canonicalize(raw);
  return {p.coords().begin(), p.coords().end()};
}

}  // namespace tropgrad
