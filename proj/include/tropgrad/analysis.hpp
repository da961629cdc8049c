#pragma once

// Convergence diagnostics, error bounds for tropical descent and error
// statistics over batches of runs.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tropgrad/dataset.hpp"
#include "tropgrad/optimizers.hpp"

namespace tropgrad {

/// delta_j(t) = min_k sum_i [t_j - x_kj - t_i + x_ki]^+.
std::vector<double> delta_small(std::span<const double> t, const Dataset& x);
/// Delta_j(t) = sum_k sum_i [t_j - x_kj - t_i + x_ki]^+.
std::vector<double> delta_big(std::span<const double> t, const Dataset& x);

struct BoundParams {
  double alpha = 1.0;
  double K = 1.0;
  double N = 2.0;
  double L = 1.0;
  double D = 1.0;
};

struct EpsilonBound {
  double eps = 0.0;        // K as given
  double eps_prime = 0.0;  // K = 1
  bool valid = false;
  bool valid_prime = false;
};

/// eps_m = 2 sqrt(2) alpha N / (sqrt(m+1) - K D L / (2 alpha) + sqrt(L K N - 1) - sqrt(2)).
/// eps_prime is the same expression with K = 1. A value is valid when its
/// denominator is positive (equivalently m >= (sqrt 2 + KDL/2alpha -
/// sqrt(LKN - 1))^2 - 1 whenever that base is positive) and m >= (2 alpha N / D)^2.
/// Invalid values are still returned. InvalidInput for m = 0, nonpositive
/// parameters, or L K N < 1.
EpsilonBound epsilon_bound(std::size_t m, const BoundParams& p);

/// Estimates D and L from recorded trajectories: t* is the canonicalized mean
/// of the final 10 iterates of the first run unless given, D = max over all
/// runs and steps of d_tri_max(t*, t_m), L = max(1, ceil(1 / min positive
/// tropical gradient norm)). alpha, K, N are copied from `base`.
struct BoundEstimate {
  BoundParams params;
  std::vector<double> t_star;
};
BoundEstimate estimate_bound_params(std::span<const RunRecord> runs, const BoundParams& base);
BoundEstimate estimate_bound_params(std::span<const RunRecord> runs, std::span<const double> t_star,
                                    const BoundParams& base);

/// Canonicalized coordinatewise mean of the last `count` iterates.
std::vector<double> tail_mean(const std::vector<std::vector<double>>& trajectory, std::size_t count = 10);

enum class ErrorMode { Relative, Absolute };

inline constexpr double kErrorFloor = 1e-12;

/// ln((f - f*) / f*) or ln(f - f*), with the argument floored at 1e-12.
double log_relative_error(double f_val, double f_star, ErrorMode mode);

struct ErrorStats {
  std::vector<double> errors;                      // input order
  std::vector<std::pair<double, double>> ecdf;     // (sorted error, i / R)
  double mean = 0.0;
};

ErrorStats ecdf(std::span<const double> values);
double mean_log_error(std::span<const double> values);

/// Least-squares slope of ln d_tr(t_m, t*) against ln m for m in
/// [window_begin, window_end] (inclusive, clipped to the trajectory; m >= 1).
/// Distances are floored at 1e-12 before the log.
double rate_slope(const std::vector<std::vector<double>>& trajectory, std::span<const double> t_star,
                  std::size_t window_begin, std::size_t window_end);

/// Linear-interpolation percentile of unsorted values, q in [0, 1].
double percentile(std::vector<double> values, double q);

}  // namespace tropgrad
