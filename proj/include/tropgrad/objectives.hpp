#pragma once

// Statistical loss functions on the tropical projective torus, each with a
// value oracle and a subgradient oracle.
//
// Subgradients are the gradient of one active linear piece, chosen by
// lowest-index tie-breaking at every argmax/argmin. With that rule the
// negative entries of g always sit at an argmin of t - x_k (or t - z_k for
// the Wasserstein problems), which is what tropical descent needs.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tropgrad/dataset.hpp"
#include "tropgrad/trop_core.hpp"

namespace tropgrad {

enum class ObjectiveKind { FermatWeber, FrechetMean, LinearRegression, WassersteinP, WassersteinInf };

std::string_view objective_name(ObjectiveKind kind) noexcept;

/// Parses "fermat_weber", "frechet_mean", "linear_regression",
/// "wasserstein_p" or "wasserstein_inf". Throws InvalidInput otherwise.
ObjectiveKind parse_objective(std::string_view name);

/// Disjoint nonempty blocks J_1..J_M covering {0..N-1}.
using Partition = std::vector<std::vector<std::size_t>>;

/// M contiguous blocks whose sizes differ by at most one.
Partition contiguous_partition(std::size_t n, std::size_t m);

class Objective {
 public:
  static Objective fermat_weber(Dataset data, Convention direction = Convention::Min);
  static Objective frechet_mean(Dataset data, Convention direction = Convention::Min);
  static Objective linear_regression(Dataset data);
  static Objective wasserstein(Dataset data, Dataset target, Partition partition, double p);
  static Objective wasserstein_inf(Dataset data, Dataset target, Partition partition);

  ObjectiveKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return objective_name(kind_); }

  /// Descent-direction convention used by the tropical methods. Min for every
  /// kind by default; Fermat-Weber and Frechet mean also accept Max.
  Convention convention() const noexcept { return convention_; }

  std::size_t dim() const noexcept { return data_.dim(); }
  std::size_t samples() const noexcept { return data_.size(); }
  const Dataset& data() const noexcept { return data_; }
  const Dataset& target() const noexcept { return target_; }
  const Partition& partition() const noexcept { return partition_; }
  double p() const noexcept { return p_; }
  bool is_wasserstein() const noexcept {
    return kind_ == ObjectiveKind::WassersteinP || kind_ == ObjectiveKind::WassersteinInf;
  }

  /// Points whose tropical convex hull attracts tropical descent: the z_k
  /// for Wasserstein kinds, the data otherwise.
  const Dataset& kernel_points() const noexcept { return is_wasserstein() ? z_ : data_; }

  double value(std::span<const double> t) const;
  std::vector<double> subgradient(std::span<const double> t) const;

  /// Value and subgradient in one pass. g must have length dim().
  double evaluate(std::span<const double> t, std::span<double> g) const;

  /// Single-sample loss f(t; x_k) (and its subgradient), as used by SGD:
  /// d_tr for Fermat-Weber and Frechet mean, the per-sample term h_k otherwise.
  double evaluate_sample(std::size_t k, std::span<const double> t, std::span<double> g) const;

  /// The same objective restricted to sample k.
  Objective subset(std::size_t k) const;

  Objective with_convention(Convention direction) const;

 private:
  Objective() = default;
  void check_point(std::span<const double> t) const;
  double wasserstein_term(std::size_t k, std::span<const double> t, std::span<double> g, double weight) const;

  ObjectiveKind kind_ = ObjectiveKind::FermatWeber;
  Convention convention_ = Convention::Min;
  Dataset data_;
  Dataset target_;
  Partition partition_;
  std::vector<std::size_t> block_of_;
  Dataset z_;
  double p_ = 1.0;
};

/// z_ki = x_ki - y_kj where block J_j contains i. InvalidInput unless the
/// objective is a Wasserstein kind.
Dataset build_z_points(const Objective& obj);

/// Assumption-1 check under the objective's convention: for Min, every j with
/// g_j < 0 must lie in argmin_i (t_i - p_ki) for some kernel point p_k; for
/// Max, every j with g_j > 0 must lie in argmax_i (t_i - p_ki). Ties within 1e-9.
bool check_assumption1(const Objective& obj, std::span<const double> t);
bool check_assumption1(const Objective& obj, std::span<const double> t, std::span<const double> g);
bool check_assumption1(const Objective& obj, std::span<const double> t, std::span<const double> g,
                       Convention convention);

}  // namespace tropgrad
