#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "test_util.hpp"
#include "tropgrad/datagen.hpp"
#include "tropgrad/error.hpp"

using namespace tropgrad;
using namespace tropgrad::testutil;

namespace {

DistanceMatrix random_metric(CounterRng& rng, std::size_t n) {
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 0.1 + rng.uniform(0.0, 5.0);
  }
  return d;
}

// Minimax path distance by enumerating every simple path.
void minimax_dfs(const DistanceMatrix& d, std::size_t at, std::size_t target, double worst, std::vector<bool>& seen,
                 double& best) {
  if (at == target) {
    best = std::min(best, worst);
    return;
  }
  for (std::size_t next = 0; next < d.size(); ++next) {
    if (seen[next]) continue;
    seen[next] = true;
    minimax_dfs(d, next, target, std::max(worst, d[at][next]), seen, best);
    seen[next] = false;
  }
}

DistanceMatrix minimax_oracle(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  DistanceMatrix u(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<bool> seen(n, false);
      seen[i] = true;
      double best = std::numeric_limits<double>::infinity();
      minimax_dfs(d, i, j, 0.0, seen, best);
      u[i][j] = best;
    }
  }
  return u;
}

bool triangle_ok(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (d[i][j] > d[i][k] + d[k][j] + 1e-9) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST(Cophenetic, PairOrderAndRoundTrip) {
  const DistanceMatrix d{{0, 1, 2, 3}, {1, 0, 4, 5}, {2, 4, 0, 6}, {3, 5, 6, 0}};
  EXPECT_EQ(cophenetic_vector(d), (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(matrix_from_vector(cophenetic_vector(d)), d);
  EXPECT_EQ(pair_count(4), 6u);
  EXPECT_EQ(pair_count(8), 28u);
  EXPECT_EQ(leaves_for_dimension(28), 8u);
  EXPECT_THROW(leaves_for_dimension(7), InvalidInput);
  EXPECT_THROW(validate_distance_matrix({{0, 1}, {2, 0}}), InvalidInput);
  EXPECT_THROW(validate_distance_matrix({{0, -1}, {-1, 0}}), InvalidInput);
  EXPECT_THROW(validate_distance_matrix({{1, 1}, {1, 0}}), InvalidInput);
}

TEST(SingleLinkage, Examples) {
  const DistanceMatrix ultra{{0, 1, 4}, {1, 0, 4}, {4, 4, 0}};
  EXPECT_EQ(single_linkage_ultrametric(ultra), ultra);
  const DistanceMatrix d{{0, 1, 3}, {1, 0, 2}, {3, 2, 0}};
  const DistanceMatrix want{{0, 1, 2}, {1, 0, 2}, {2, 2, 0}};
  EXPECT_EQ(single_linkage_ultrametric(d), want);
  EXPECT_THROW(single_linkage_ultrametric({{0, 1}, {3, 0}}), InvalidInput);
}

TEST(SingleLinkage, MatchesMinimaxOracleUpToSixLeaves) {
  CounterRng rng(71);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      auto d = random_metric(rng, n);
      if (trial % 4 == 0) {
        // Integer distances force ties in the merge order.
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = std::floor(d[i][j]);
        }
      }
      const auto u = single_linkage_ultrametric(d);
      const auto oracle = minimax_oracle(d);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          EXPECT_EQ(u[i][j], oracle[i][j]);
          EXPECT_LE(u[i][j], d[i][j]);
        }
      }
      EXPECT_TRUE(is_ultrametric(u));
      EXPECT_EQ(single_linkage_ultrametric(u), u);
    }
  }
}

TEST(SingleLinkage, ThreePointConditionOnRandomInputs) {
  CounterRng rng(72);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_metric(rng, 3 + rng.below(6));
    EXPECT_TRUE(is_ultrametric(single_linkage_ultrametric(d)));
  }
}

TEST(Newick, SpeciesTreeTopology) {
  const auto s = demo_species_tree();
  EXPECT_TRUE(is_ultrametric(s.distances));
  EXPECT_EQ(newick_topology(s.distances, s.labels), "(((((F,E),(H,G)),(D,C)),B),A)");
}

TEST(Newick, ThreeLeaves) {
  // Cherries are written in descending label order, as in the species tree string.
  const DistanceMatrix u{{0, 1, 4}, {1, 0, 4}, {4, 4, 0}};
  EXPECT_EQ(newick_topology(u, {"A", "B", "C"}), "((B,A),C)");
  const DistanceMatrix v{{0, 4, 4}, {4, 0, 1}, {4, 1, 0}};
  EXPECT_EQ(newick_topology(v, {"A", "B", "C"}), "((C,B),A)");
}

TEST(Newick, InvariantUnderLeafPermutation) {
  const auto s = demo_species_tree();
  CounterRng rng(73);
  std::vector<std::size_t> perm(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    DistanceMatrix d(8, std::vector<double>(8));
    std::vector<std::string> labels(8);
    for (std::size_t i = 0; i < 8; ++i) {
      labels[i] = s.labels[perm[i]];
      for (std::size_t j = 0; j < 8; ++j) d[i][j] = s.distances[perm[i]][perm[j]];
    }
    EXPECT_EQ(newick_topology(d, labels), "(((((F,E),(H,G)),(D,C)),B),A)");
  }
  // The same holds for random coalescent trees.
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = kingman_coalescent_tree(6, rng);
    const auto labels = default_labels(6);
    const auto ref = newick_topology(d, labels);
    std::iota(perm.begin(), perm.begin() + 6, 0);
    std::shuffle(perm.begin(), perm.begin() + 6, rng);
    DistanceMatrix p(6, std::vector<double>(6));
    std::vector<std::string> pl(6);
    for (std::size_t i = 0; i < 6; ++i) {
      pl[i] = labels[perm[i]];
      for (std::size_t j = 0; j < 6; ++j) p[i][j] = d[perm[i]][perm[j]];
    }
    EXPECT_EQ(newick_topology(p, pl), ref);
  }
}

TEST(Newick, Labels) {
  const auto l = default_labels(28);
  EXPECT_EQ(l[0], "A");
  EXPECT_EQ(l[25], "Z");
  EXPECT_EQ(l[26], "L26");
}

TEST(Trees, CoalescentIsUltrametric) {
  CounterRng rng(74);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(6);
    const auto d = kingman_coalescent_tree(n, rng);
    EXPECT_TRUE(is_ultrametric(d));
    EXPECT_TRUE(triangle_ok(d));
    if (n == 3) {
      auto v = cophenetic_vector(d);
      std::sort(v.begin(), v.end());
      EXPECT_NEAR(v[1], v[2], 1e-12);
    }
  }
}

TEST(Trees, CoalescentMeanHeight) {
  // E[T_MRCA] = sum_{j=2}^{n} 2 / (j (j - 1)) = 2 (1 - 1/n).
  double oracle = 0;
  for (int j = 2; j <= 8; ++j) oracle += 2.0 / (j * (j - 1.0));
  EXPECT_NEAR(oracle, 2 * (1 - 1.0 / 8), 1e-12);
  CounterRng rng(75);
  double acc = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto d = kingman_coalescent_tree(8, rng);
    double h = 0;
    for (const auto& row : d) h = std::max(h, *std::max_element(row.begin(), row.end()));
    acc += h / 2;
  }
  EXPECT_NEAR(acc / 10000, oracle, 0.05 * oracle);
}

TEST(Trees, BranchingIsATreeMetric) {
  CounterRng rng(76);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(5);
    const auto d = yule_tree(n, rng);
    validate_distance_matrix(d);
    EXPECT_TRUE(triangle_ok(d));
    EXPECT_TRUE(is_tree_metric(d));
  }
  int ultrametric = 0;
  for (int trial = 0; trial < 50; ++trial) ultrametric += is_ultrametric(yule_tree(5, rng));
  EXPECT_LT(ultrametric, 50);
}

TEST(Trees, GeneTreesAreUltrametricAndZeroNoiseIsTheSpeciesTree) {
  const auto s = demo_species_tree();
  CounterRng rng(77);
  EXPECT_EQ(sample_gene_tree(s, 0.0, rng), s.distances);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = sample_gene_tree(s, 0.5, rng);
    EXPECT_TRUE(is_ultrametric(g));
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) EXPECT_GE(g[i][j], s.distances[i][j] - 1e-12);
    }
  }
  EXPECT_THROW(sample_gene_tree(s, -1.0, rng), InvalidInput);
}

TEST(Datagen, GaussianShapesAndReproducibility) {
  const auto a = gaussian_dataset(6, 10, 1), b = gaussian_dataset(6, 10, 1), c = gaussian_dataset(6, 10, 2);
  ASSERT_EQ(a.size(), 10u);
  ASSERT_EQ(a.dim(), 6u);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_NEAR(sum_of(a.row(k)), 0.0, 1e-12);
    EXPECT_TRUE(std::equal(a.row(k).begin(), a.row(k).end(), b.row(k).begin()));
  }
  EXPECT_FALSE(std::equal(a.row(0).begin(), a.row(0).end(), c.row(0).begin()));
  EXPECT_THROW(gaussian_dataset(1, 10, 1), InvalidInput);
  EXPECT_THROW(gaussian_dataset(6, 0, 1), InvalidInput);
}

TEST(Datagen, GaussianMeanIsNearZero) {
  const std::size_t n = 6, k = 10000;
  const auto x = gaussian_dataset(n, k, 3);
  double all = 0;
  std::vector<double> per(n, 0.0);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      all += x.row(s)[i];
      per[i] += x.row(s)[i];
    }
  }
  EXPECT_LE(std::abs(all / (n * k)), 4 / std::sqrt(static_cast<double>(n * k)));
  // Each canonical coordinate has variance (N-1)/N <= 1.
  for (double v : per) EXPECT_LE(std::abs(v / k), 4 / std::sqrt(static_cast<double>(k)));
}

TEST(Datagen, TreeFamiliesShapesAndProperties) {
  const auto c4 = coalescent_dataset(4, 20, 7), c8 = coalescent_dataset(8, 5, 7);
  EXPECT_EQ(c4.dim(), 6u);
  EXPECT_EQ(c8.dim(), 28u);
  EXPECT_EQ(c4.metadata().get("pair_order"), "lexicographic");
  const auto b5 = branching_dataset(5, 20, 7);
  EXPECT_EQ(b5.dim(), 10u);
  // The three-point condition is shift invariant, so it survives canonicalization.
  for (std::size_t k = 0; k < 20; ++k) {
    auto v = std::vector<double>(c4.row(k).begin(), c4.row(k).end());
    EXPECT_TRUE(is_ultrametric(matrix_from_vector(v)));
  }
  const auto again = coalescent_dataset(4, 20, 7);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_TRUE(std::equal(c4.row(k).begin(), c4.row(k).end(), again.row(k).begin()));
  EXPECT_THROW(coalescent_dataset(2, 5, 1), InvalidInput);
  EXPECT_THROW(branching_dataset(2, 5, 1), InvalidInput);
}

TEST(Datagen, NormalizeAverageTropicalNorm) {
  const auto one = Dataset::from_rows({{0, 4, 0}});
  EXPECT_NEAR(trop_norm(normalize_avg_trop_norm(one).row(0)), 1.0, 1e-12);
  const auto mixed = Dataset::from_rows({{0, 2, 0}, {0, 0, 4}});
  const auto nm = normalize_avg_trop_norm(mixed);
  EXPECT_NEAR(trop_norm(nm.row(0)), 2.0 / 3, 1e-12);
  EXPECT_NEAR(trop_norm(nm.row(1)), 4.0 / 3, 1e-12);
  EXPECT_NEAR(mean_trop_norm(nm), 1.0, 1e-9);
  const auto twice = normalize_avg_trop_norm(nm);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(twice.row(k)[i], nm.row(k)[i], 1e-12);
  }
  EXPECT_EQ(nm.metadata().get("normalized"), "avg_trop_norm");
  EXPECT_THROW(normalize_avg_trop_norm(Dataset::from_rows({{1, 1, 1}})), InvalidInput);
  EXPECT_NEAR(mean_trop_norm(normalize_avg_trop_norm(coalescent_dataset(8, 50, 2))), 1.0, 1e-9);
}

TEST(Auction, NoiseFreeColumnsAreOneClass) {
  const std::vector<double> f{1.0, 0.8, 0.6};
  const auto a = auction_dataset(f, 20, 0.0, 5);
  const auto x = a.regression_data();
  std::vector<double> logf{std::log(1.0), std::log(0.8), std::log(0.6)};
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_NEAR(d_tr(x.row(j), logf), 0.0, 1e-12);
  const auto rec = recover_factors(canonicalize(logf).coords());
  EXPECT_EQ(rec[0], 1.0);
  EXPECT_NEAR(rec[1], 0.8, 1e-15);
  EXPECT_NEAR(rec[2], 0.6, 1e-15);
}

TEST(Auction, NoisyColumnsClusterNearTheTruth) {
  const std::vector<double> f{1.0, 0.8, 0.6};
  const auto a = auction_dataset(f, 100, 0.05, 1);
  EXPECT_EQ(a.firms(), 3u);
  EXPECT_EQ(a.products(), 100u);
  const auto x = a.regression_data();
  const std::vector<double> logf{0.0, std::log(0.8), std::log(0.6)};
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_LE(d_tr(x.row(j), logf), 0.2);
}

TEST(Auction, Validation) {
  EXPECT_THROW(auction_dataset(std::vector<double>{1.0}, 10, 0.0, 1), InvalidInput);
  EXPECT_THROW(auction_dataset(std::vector<double>{0.9, 0.8}, 10, 0.0, 1), InvalidInput);
  EXPECT_THROW(auction_dataset(std::vector<double>{1.0, -0.5}, 10, 0.0, 1), InvalidInput);
  EXPECT_THROW(auction_dataset(std::vector<double>{1.0, 0.5}, 10, -1.0, 1), InvalidInput);
}

TEST(Auction, CsvRoundTrip) {
  const std::vector<double> f{1.0, 0.8, 0.6};
  const auto a = auction_dataset(f, 7, 0.05, 3);
  std::stringstream ss;
  write_auction_csv(ss, a, 3, 0.05);
  EXPECT_EQ(ss.str().rfind("# tropgrad-auction v1; true_factors=1|0.8|0.6", 0), 0u);
  const auto b = read_auction_csv(ss);
  EXPECT_EQ(b.prices, a.prices);
  EXPECT_EQ(b.true_factors, a.true_factors);
  std::stringstream bad("1,2\n3,4\n");
  EXPECT_THROW(read_auction_csv(bad), InvalidInput);
}

TEST(DatasetFile, RoundTripKeepsBitsAndMetadata) {
  const auto x = coalescent_dataset(4, 12, 9);
  std::stringstream ss;
  write_dataset_csv(ss, x);
  const auto header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_NE(header.find("# tropgrad-dataset v1; generator=coalescent; seed=9"), std::string::npos);
  EXPECT_NE(header.find("N=6"), std::string::npos);
  EXPECT_NE(header.find("K=12"), std::string::npos);
  const auto y = read_dataset_csv(ss);
  ASSERT_EQ(y.size(), 12u);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_TRUE(std::equal(x.row(k).begin(), x.row(k).end(), y.row(k).begin()));
  EXPECT_EQ(y.metadata().get("generator"), "coalescent");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
}
