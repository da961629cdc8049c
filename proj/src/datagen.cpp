#include "tropgrad/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "tropgrad/error.hpp"
#include "tropgrad/rng.hpp"

namespace tropgrad {

namespace {

void check_counts(std::size_t k, const char* where) {
  if (k < 1) throw InvalidInput(std::string(where) + ": need at least one sample");
}

Metadata base_meta(const std::string& generator, std::uint64_t seed) {
  Metadata m;
  m.set("generator", generator);
  m.set("seed", std::to_string(seed));
  m.set("normalized", "false");
  return m;
}

template <class Sampler>
Dataset tree_dataset(std::size_t n_leaves, std::size_t k, std::uint64_t seed, const std::string& name,
                     Sampler sample) {
  if (n_leaves < 3) throw InvalidInput(name + ": need at least 3 leaves");
  check_counts(k, name.c_str());
  std::vector<std::vector<double>> rows;
  rows.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    CounterRng rng(seed, s);
    rows.push_back(cophenetic_vector(sample(rng)));
  }
  auto meta = base_meta(name, seed);
  meta.set("leaves", std::to_string(n_leaves));
  meta.set("pair_order", "lexicographic");
  return Dataset::from_rows(rows, meta);
}

}  // namespace

Dataset gaussian_dataset(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("gaussian: dimension must be at least 2");
  check_counts(k, "gaussian");
  std::vector<std::vector<double>> rows(k, std::vector<double>(n));
  for (std::size_t s = 0; s < k; ++s) {
    CounterRng rng(seed, s);
    for (double& v : rows[s]) v = rng.normal();
  }
  return Dataset::from_rows(rows, base_meta("gaussian", seed));
}

Dataset coalescent_dataset(std::size_t n_leaves, std::size_t k, std::uint64_t seed) {
  return tree_dataset(n_leaves, k, seed, "coalescent",
                      [n_leaves](CounterRng& rng) { return kingman_coalescent_tree(n_leaves, rng); });
}

Dataset branching_dataset(std::size_t n_leaves, std::size_t k, std::uint64_t seed) {
  return tree_dataset(n_leaves, k, seed, "branching",
                      [n_leaves](CounterRng& rng) { return yule_tree(n_leaves, rng); });
}

Dataset gene_tree_dataset(const SpeciesTree& species, std::size_t k, double noise, std::uint64_t seed) {
  auto d = tree_dataset(species.labels.size(), k, seed, "gene_trees",
                        [&](CounterRng& rng) { return sample_gene_tree(species, noise, rng); });
  std::ostringstream ns;
  ns << noise;
  d.metadata().set("noise", ns.str());
  return d;
}

double mean_trop_norm(const Dataset& x) {
  if (x.empty()) throw InvalidInput("mean_trop_norm: empty dataset");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += trop_norm(x.row(k));
  return acc / static_cast<double>(x.size());
}

Dataset normalize_avg_trop_norm(const Dataset& x) {
  const double mean = mean_trop_norm(x);
  if (!(mean > 0.0)) throw InvalidInput("normalize_avg_trop_norm: every point is the zero class");
  auto out = x.scaled(1.0 / mean);
  out.metadata().set("normalized", "avg_trop_norm");
  return out;
}

Dataset AuctionInstance::regression_data() const {
  const std::size_t n = firms(), k = products();
  std::vector<std::vector<double>> rows(k, std::vector<double>(n));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) rows[j][i] = -prices[i][j];
  }
  Metadata meta;
  meta.set("generator", "auction");
  return Dataset::from_rows(rows, meta);
}

AuctionInstance auction_dataset(std::span<const double> factors, std::size_t k, double noise, std::uint64_t seed) {
  if (factors.size() < 2) throw InvalidInput("auction: need at least 2 firms");
  check_counts(k, "auction");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidInput("auction: noise must be finite and >= 0");
  double fmax = 0.0;
  for (double f : factors) {
    if (!(f > 0.0) || !std::isfinite(f)) throw InvalidInput("auction: factors must be positive");
    fmax = std::max(fmax, f);
  }
  if (std::abs(fmax - 1.0) > 1e-12) throw InvalidInput("auction: the largest factor must be 1");

  AuctionInstance a;
  a.true_factors.assign(factors.begin(), factors.end());
  a.prices.assign(factors.size(), std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    CounterRng rng(seed, j);
    const double c = rng.uniform(0.0, 10.0);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const double eta = noise > 0.0 ? rng.uniform(-noise, noise) : 0.0;
      a.prices[i][j] = c - std::log(factors[i]) + eta;
    }
  }
  return a;
}

std::vector<double> recover_factors(std::span<const double> t) {
  if (t.empty()) throw InvalidInput("recover_factors: empty point");
  const double m = *std::max_element(t.begin(), t.end());
  std::vector<double> f(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) f[i] = t[i] == m ? 1.0 : std::exp(t[i] - m);
  return f;
}

void write_auction_csv(std::ostream& out, const AuctionInstance& a, std::uint64_t seed, double noise) {
  out << "# tropgrad-auction v1; true_factors=";
  for (std::size_t i = 0; i < a.true_factors.size(); ++i) out << (i ? "|" : "") << format_double(a.true_factors[i]);
  out << "; seed=" << seed << "; noise=" << format_double(noise) << "; N=" << a.firms() << "; K=" << a.products()
      << '\n';
  for (const auto& row : a.prices) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
}

AuctionInstance read_auction_csv(std::istream& in) {
  AuctionInstance a;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("true_factors=");
      if (pos == std::string::npos) continue;
      header = true;
      std::string list = line.substr(pos + 13);
      list = list.substr(0, list.find(';'));
      std::stringstream ss(list);
      std::string tok;
      while (std::getline(ss, tok, '|')) a.true_factors.push_back(std::stod(tok));
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (!a.prices.empty() && row.size() != a.prices.front().size()) throw InvalidInput("auction csv: ragged rows");
    a.prices.push_back(std::move(row));
  }
  if (!header) throw InvalidInput("auction csv: missing '# true_factors=' header");
  if (a.prices.size() != a.true_factors.size()) throw InvalidInput("auction csv: factor count differs from firm count");
  return a;
}

}  // namespace tropgrad
