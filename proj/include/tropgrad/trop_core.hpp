#pragma once

// Tropical algebra and geometry on the tropical projective torus R^N / R1.
//
// Points are stored as their sum-zero representative. Distance-like functions
// take raw spans as well, since they are invariant under adding c*1 to either
// argument; anything that returns a point returns a canonical TropPoint.

#include <cstddef>
#include <span>
#include <vector>

namespace tropgrad {

class TropPoint {
 public:
  /// Subtracts the coordinate mean. Throws DimensionError for fewer than two
  /// coordinates and InvalidInput for non-finite entries.
  static TropPoint canonicalize(std::span<const double> raw);

  /// Wraps coordinates that are already sum-zero (checked to 1e-9 * scale).
  static TropPoint from_canonical(std::vector<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  operator std::span<const double>() const noexcept { return coords_; }  // NOLINT: implicit by design of the API

  bool operator==(const TropPoint&) const = default;

 private:
  explicit TropPoint(std::vector<double> coords) : coords_(std::move(coords)) {}
  std::vector<double> coords_;
};

inline TropPoint canonicalize(std::span<const double> raw) { return TropPoint::canonicalize(raw); }

enum class Convention { Max, Min };

/// max_i x_i - min_i x_i.
double trop_norm(std::span<const double> x);

/// Tropical (generalized Hilbert projective) metric.
double d_tr(std::span<const double> x, std::span<const double> y);

/// sum_i (b - a)_i - N min_j (b - a)_j.
double d_tri_min(std::span<const double> a, std::span<const double> b);
/// N max_j (b - a)_j - sum_i (b - a)_i.
double d_tri_max(std::span<const double> a, std::span<const double> b);

/// Distance from x to the max-plus tropical hyperplane with the given apex:
/// max_i (x - apex)_i - 2ndmax_i (x - apex)_i.
double hyperplane_distance(std::span<const double> x, std::span<const double> apex);

/// Value of the largest and second-largest entry; under a tie for the
/// maximum the second value equals the first.
struct TopTwo {
  double first;
  double second;
  std::size_t first_index;
  std::size_t second_index;
};
TopTwo top_two(std::span<const double> y);

/// Finite set of generators spanning a tropical polytope.
class TropPolytope {
 public:
  TropPolytope(std::vector<TropPoint> generators, Convention convention = Convention::Max);

  std::size_t size() const noexcept { return generators_.size(); }
  std::size_t dim() const noexcept { return generators_.front().dim(); }
  Convention convention() const noexcept { return convention_; }
  const std::vector<TropPoint>& generators() const noexcept { return generators_; }

 private:
  std::vector<TropPoint> generators_;
  Convention convention_;
};

/// Coordinatewise max_k (c_k + x_k) (or min, for the min convention).
TropPoint trop_combination(std::span<const double> coeffs, const TropPolytope& polytope);

/// Samples lambda (.) a (+) 0 (.) b for lambda on a uniform grid over
/// [-d_tr(a, b), d_tr(a, b)], with (+) the max or min of the convention.
/// The grid ends saturate, so the first and last samples are the endpoints.
std::vector<TropPoint> trop_segment_sample(std::span<const double> a, std::span<const double> b,
                                           std::size_t n_samples, Convention convention);

/// Metric projection onto a max-convention hull:
/// lambda_k = min_i (t_i - x_ki), pi(t) = max_k (lambda_k + x_k).
TropPoint project_tconv(std::span<const double> t, const TropPolytope& polytope);

/// d_tr(t, project_tconv(t, polytope)).
double dist_to_tconv(std::span<const double> t, const TropPolytope& polytope);

/// Throws DimensionError unless a and b have equal length >= 2.
void require_same_dim(std::span<const double> a, std::span<const double> b, const char* where);

}  // namespace tropgrad
