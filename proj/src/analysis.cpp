#include "tropgrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tropgrad/error.hpp"
#include "tropgrad/kernels.hpp"

namespace tropgrad {

namespace {

std::vector<double> positive_parts(std::span<const double> t, const Dataset& x) {
  if (x.empty()) throw InvalidInput("delta: empty dataset");
  if (t.size() != x.dim()) throw DimensionError("delta: point dimension mismatch");
  std::vector<double> out(x.size() * x.dim());
  kernels::positive_part_sums(t, x.columns(), out);
  return out;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string("epsilon_bound: ") + name + " must be positive");
}

}  // namespace

std::vector<double> delta_small(std::span<const double> t, const Dataset& x) {
  const auto pp = positive_parts(t, x);
  const std::size_t n = x.dim();
  std::vector<double> out(pp.begin(), pp.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t k = 1; k < x.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) out[j] = std::min(out[j], pp[k * n + j]);
  }
  return out;
}

std::vector<double> delta_big(std::span<const double> t, const Dataset& x) {
  const auto pp = positive_parts(t, x);
  const std::size_t n = x.dim();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) out[j] += pp[k * n + j];
  }
  return out;
}

EpsilonBound epsilon_bound(std::size_t m, const BoundParams& p) {
  if (m == 0) throw InvalidInput("epsilon_bound: m must be >= 1");
  check_positive(p.alpha, "alpha");
  check_positive(p.K, "K");
  check_positive(p.N, "N");
  check_positive(p.L, "L");
  check_positive(p.D, "D");
  if (p.L * p.N < 1.0) throw InvalidInput("epsilon_bound: L * N must be >= 1");

  const double md = static_cast<double>(m);
  const double step_floor = 2.0 * p.alpha * p.N / p.D;
  const bool enough_steps = md >= step_floor * step_floor;
  auto eval = [&](double k, double& eps, bool& valid) {
    const double denom = std::sqrt(md + 1.0) - k * p.D * p.L / (2.0 * p.alpha) + std::sqrt(p.L * k * p.N - 1.0) -
                         std::sqrt(2.0);
    eps = 2.0 * std::sqrt(2.0) * p.alpha * p.N / denom;
    valid = denom > 0.0 && enough_steps;
  };
  EpsilonBound out;
  eval(p.K, out.eps, out.valid);
  eval(1.0, out.eps_prime, out.valid_prime);
  return out;
}

std::vector<double> tail_mean(const std::vector<std::vector<double>>& trajectory, std::size_t count) {
  if (count == 0) throw InvalidInput("tail_mean: count must be positive");
  if (trajectory.size() < count) {
    throw InvalidInput("tail_mean: trajectory has " + std::to_string(trajectory.size()) + " iterates, need " +
                       std::to_string(count));
  }
  const std::size_t n = trajectory.front().size();
  std::vector<double> acc(n, 0.0);
  for (std::size_t s = trajectory.size() - count; s < trajectory.size(); ++s) {
    if (trajectory[s].size() != n) throw DimensionError("tail_mean: iterates differ in dimension");
    for (std::size_t i = 0; i < n; ++i) acc[i] += trajectory[s][i];
  }
  for (double& v : acc) v /= static_cast<double>(count);
  const auto p = TropPoint::canonicalize(acc);
  return {p.coords().begin(), p.coords().end()};
}

BoundEstimate estimate_bound_params(std::span<const RunRecord> runs, const BoundParams& base) {
  if (runs.empty()) throw InvalidInput("estimate_bound_params: no runs");
  return estimate_bound_params(runs, tail_mean(runs.front().trajectory, 10), base);
}

BoundEstimate estimate_bound_params(std::span<const RunRecord> runs, std::span<const double> t_star,
                                    const BoundParams& base) {
  if (runs.empty()) throw InvalidInput("estimate_bound_params: no runs");
  BoundEstimate out;
  out.params = base;
  out.t_star.assign(t_star.begin(), t_star.end());
  double d = 0.0;
  double min_norm = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    if (r.trajectory.size() < 10) throw InvalidInput("estimate_bound_params: trajectory shorter than 10 iterates");
    for (const auto& t : r.trajectory) d = std::max(d, d_tri_max(t_star, t));
    for (double g : r.grad_norms_tr) {
      if (g > 0.0) min_norm = std::min(min_norm, g);
    }
  }
  out.params.D = d;
  out.params.L = std::isfinite(min_norm) ? std::max(1.0, std::ceil(1.0 / min_norm)) : 1.0;
  return out;
}

double log_relative_error(double f_val, double f_star, ErrorMode mode) {
  if (mode == ErrorMode::Relative) {
    if (!(f_star > 0.0)) throw InvalidInput("log_relative_error: relative mode needs f_star > 0");
    return std::log(std::max((f_val - f_star) / f_star, kErrorFloor));
  }
  return std::log(std::max(f_val - f_star, kErrorFloor));
}

ErrorStats ecdf(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("ecdf: no values");
  ErrorStats s;
  s.errors.assign(values.begin(), values.end());
  std::vector<double> sorted = s.errors;
  std::sort(sorted.begin(), sorted.end());
  const double r = static_cast<double>(sorted.size());
  s.ecdf.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) s.ecdf.emplace_back(sorted[i], static_cast<double>(i + 1) / r);
  s.mean = mean_log_error(values);
  return s;
}

double mean_log_error(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("mean_log_error: no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double rate_slope(const std::vector<std::vector<double>>& trajectory, std::span<const double> t_star,
                  std::size_t window_begin, std::size_t window_end) {
  if (trajectory.empty()) throw InvalidInput("rate_slope: empty trajectory");
  const std::size_t lo = std::max<std::size_t>(window_begin, 1);
  const std::size_t hi = std::min(window_end, trajectory.size() - 1);
  if (hi <= lo) throw InvalidInput("rate_slope: window holds fewer than two steps");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(hi - lo + 1);
  for (std::size_t m = lo; m <= hi; ++m) {
    const double x = std::log(static_cast<double>(m));
    const double y = std::log(std::max(d_tr(trajectory[m], t_star), kErrorFloor));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("percentile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("percentile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, values.size() - 1);
  return values[i] + (pos - static_cast<double>(i)) * (values[j] - values[i]);
}

}  // namespace tropgrad
