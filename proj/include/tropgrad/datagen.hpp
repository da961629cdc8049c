#pragma once

// Seeded dataset simulators. Every generator is a pure function of its
// parameters and seed; sample k draws from its own RNG substream.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tropgrad/dataset.hpp"
#include "tropgrad/trees.hpp"

namespace tropgrad {

/// K standard-normal vectors in R^N, canonicalized.
Dataset gaussian_dataset(std::size_t n, std::size_t k, std::uint64_t seed);

/// K Kingman-coalescent trees on n_leaves leaves as cophenetic vectors
/// (dimension n(n-1)/2, lexicographic pair order).
Dataset coalescent_dataset(std::size_t n_leaves, std::size_t k, std::uint64_t seed);

/// K Yule trees with Exp(1) edges as cophenetic vectors.
Dataset branching_dataset(std::size_t n_leaves, std::size_t k, std::uint64_t seed);

/// Gene trees sampled around the demo species tree, as cophenetic vectors.
Dataset gene_tree_dataset(const SpeciesTree& species, std::size_t k, double noise, std::uint64_t seed);

/// Scales every point by 1 / (mean tropical norm). InvalidInput if all points are zero.
Dataset normalize_avg_trop_norm(const Dataset& x);

double mean_trop_norm(const Dataset& x);

/// Auction with hidden preference factors: N firms, K products,
/// p_ij = c_j - ln f_i + eta_ij, c_j ~ U(0, 10), eta_ij ~ U(-noise, noise).
struct AuctionInstance {
  std::vector<std::vector<double>> prices;  // N x K
  std::vector<double> true_factors;         // N, max = 1

  std::size_t firms() const noexcept { return prices.size(); }
  std::size_t products() const noexcept { return prices.empty() ? 0 : prices.front().size(); }

  /// Product columns x_j = (-p_ij)_i as points of TPT^N.
  Dataset regression_data() const;
};

AuctionInstance auction_dataset(std::span<const double> factors, std::size_t k, double noise, std::uint64_t seed);

/// f_hat = exp(t - max t).
std::vector<double> recover_factors(std::span<const double> t);

/// Auction CSV: `# tropgrad-auction v1; true_factors=a|b|c; ...` then one row per firm.
void write_auction_csv(std::ostream& out, const AuctionInstance& a, std::uint64_t seed, double noise);
AuctionInstance read_auction_csv(std::istream& in);

}  // namespace tropgrad
