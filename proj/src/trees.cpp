#include "tropgrad/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "tropgrad/error.hpp"

namespace tropgrad {

namespace {

struct Node {
  int left = -1;
  int right = -1;
  std::size_t size = 1;
  std::string min_label;
};

bool leaf_first(const std::vector<Node>& nodes, const std::vector<std::string>& labels, int a, int b) {
  const Node& na = nodes[static_cast<std::size_t>(a)];
  const Node& nb = nodes[static_cast<std::size_t>(b)];
  if (na.size != nb.size) return na.size > nb.size;
  if (na.size == 1) return labels[static_cast<std::size_t>(a)] > labels[static_cast<std::size_t>(b)];
  return na.min_label < nb.min_label;
}

void render(const std::vector<Node>& nodes, const std::vector<std::string>& labels, int id, std::string& out) {
  const Node& n = nodes[static_cast<std::size_t>(id)];
  if (n.left < 0) {
    out += labels[static_cast<std::size_t>(id)];
    return;
  }
  int first = n.left, second = n.right;
  if (!leaf_first(nodes, labels, first, second)) std::swap(first, second);
  out += '(';
  render(nodes, labels, first, out);
  out += ',';
  render(nodes, labels, second, out);
  out += ')';
}

}  // namespace

std::size_t pair_count(std::size_t n_leaves) { return n_leaves * (n_leaves - 1) / 2; }

std::size_t leaves_for_dimension(std::size_t dim) {
  for (std::size_t n = 3; pair_count(n) <= dim; ++n) {
    if (pair_count(n) == dim) return n;
  }
  throw InvalidInput("dimension " + std::to_string(dim) + " is not n(n-1)/2 for any n >= 3");
}

void validate_distance_matrix(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) throw InvalidInput("distance matrix: need at least 2 leaves");
  for (const auto& row : d) {
    if (row.size() != n) throw InvalidInput("distance matrix: not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i][i] != 0.0) throw InvalidInput("distance matrix: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j])) throw InvalidInput("distance matrix: non-finite entry");
      if (d[i][j] < 0.0) throw InvalidInput("distance matrix: negative entry");
      if (d[i][j] != d[j][i]) throw InvalidInput("distance matrix: not symmetric");
    }
  }
}

std::vector<double> cophenetic_vector(const DistanceMatrix& d) {
  std::vector<double> v;
  v.reserve(pair_count(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) v.push_back(d[i][j]);
  }
  return v;
}

DistanceMatrix matrix_from_vector(std::span<const double> v) {
  const std::size_t n = leaves_for_dimension(v.size());
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = v[idx++];
  }
  return d;
}

bool is_ultrametric(const DistanceMatrix& d, double tol) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        double a[3] = {d[i][j], d[i][k], d[j][k]};
        std::sort(a, a + 3);
        if (a[2] - a[1] > tol) return false;
      }
    }
  }
  return true;
}

bool is_tree_metric(const DistanceMatrix& d, double tol) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
          double s[3] = {d[i][j] + d[k][l], d[i][k] + d[j][l], d[i][l] + d[j][k]};
          std::sort(s, s + 3);
          if (s[2] - s[1] > tol) return false;
        }
      }
    }
  }
  return true;
}

DistanceMatrix single_linkage_ultrametric(const DistanceMatrix& d) {
  validate_distance_matrix(d);
  DistanceMatrix u = d;
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) u[i][j] = std::min(u[i][j], std::max(u[i][k], u[k][j]));
    }
  }
  return u;
}

std::string newick_topology(const DistanceMatrix& u, const std::vector<std::string>& labels) {
  validate_distance_matrix(u);
  const std::size_t n = u.size();
  if (labels.size() != n) throw InvalidInput("newick_topology: one label per leaf");

  struct Edge {
    double w;
    const std::string* lo;
    const std::string* hi;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool swap = labels[j] < labels[i];
      edges.push_back({u[i][j], swap ? &labels[j] : &labels[i], swap ? &labels[i] : &labels[j], i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.w, *a.lo, *a.hi) < std::tie(b.w, *b.lo, *b.hi);
  });

  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].min_label = labels[i];
  std::vector<int> cluster(n);  // leaf -> current root node
  std::iota(cluster.begin(), cluster.end(), 0);
  std::vector<std::size_t> parent(n);  // union-find over leaves
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  int root = 0;
  for (const auto& e : edges) {
    const std::size_t a = find(e.i), b = find(e.j);
    if (a == b) continue;
    Node merged;
    merged.left = cluster[a];
    merged.right = cluster[b];
    merged.size = nodes[static_cast<std::size_t>(merged.left)].size + nodes[static_cast<std::size_t>(merged.right)].size;
    merged.min_label = std::min(nodes[static_cast<std::size_t>(merged.left)].min_label,
                                nodes[static_cast<std::size_t>(merged.right)].min_label);
    nodes.push_back(merged);
    parent[b] = a;
    cluster[a] = root = static_cast<int>(nodes.size() - 1);
  }
  std::string out;
  render(nodes, labels, n == 1 ? 0 : root, out);
  return out;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(i < 26 ? std::string(1, static_cast<char>('A' + i)) : "L" + std::to_string(i));
  return out;
}

DistanceMatrix kingman_coalescent_tree(std::size_t n_leaves, CounterRng& rng) {
  if (n_leaves < 3) throw InvalidInput("coalescent: need at least 3 leaves");
  DistanceMatrix d(n_leaves, std::vector<double>(n_leaves, 0.0));
  std::vector<std::vector<std::size_t>> lineages(n_leaves);
  for (std::size_t i = 0; i < n_leaves; ++i) lineages[i] = {i};
  double height = 0.0;
  while (lineages.size() > 1) {
    const double j = static_cast<double>(lineages.size());
    height += rng.exponential(j * (j - 1.0) / 2.0);
    const std::size_t a = rng.below(lineages.size());
    std::size_t b = rng.below(lineages.size() - 1);
    if (b >= a) ++b;
    for (std::size_t x : lineages[a]) {
      for (std::size_t y : lineages[b]) d[x][y] = d[y][x] = 2.0 * height;
    }
    lineages[a].insert(lineages[a].end(), lineages[b].begin(), lineages[b].end());
    lineages.erase(lineages.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return d;
}

DistanceMatrix yule_tree(std::size_t n_leaves, CounterRng& rng) {
  if (n_leaves < 3) throw InvalidInput("branching: need at least 3 leaves");
  std::vector<int> parent{-1};
  std::vector<double> depth{0.0};
  std::vector<std::size_t> leaves{0};
  while (leaves.size() < n_leaves) {
    const std::size_t pick = rng.below(leaves.size());
    const std::size_t node = leaves[pick];
    for (int c = 0; c < 2; ++c) {
      parent.push_back(static_cast<int>(node));
      depth.push_back(depth[node] + rng.exponential(1.0));
    }
    leaves[pick] = parent.size() - 2;
    leaves.push_back(parent.size() - 1);
  }
  // Fisher-Yates shuffle of leaf labels.
  for (std::size_t i = leaves.size() - 1; i > 0; --i) std::swap(leaves[i], leaves[rng.below(i + 1)]);

  auto lca_depth = [&](std::size_t a, std::size_t b) {
    std::vector<char> on_path(parent.size(), 0);
    for (int x = static_cast<int>(a); x >= 0; x = parent[static_cast<std::size_t>(x)]) on_path[static_cast<std::size_t>(x)] = 1;
    int y = static_cast<int>(b);
    while (!on_path[static_cast<std::size_t>(y)]) y = parent[static_cast<std::size_t>(y)];
    return depth[static_cast<std::size_t>(y)];
  };
  DistanceMatrix d(n_leaves, std::vector<double>(n_leaves, 0.0));
  for (std::size_t i = 0; i < n_leaves; ++i) {
    for (std::size_t j = i + 1; j < n_leaves; ++j) {
      const std::size_t a = leaves[i], b = leaves[j];
      d[i][j] = d[j][i] = depth[a] + depth[b] - 2.0 * lca_depth(a, b);
    }
  }
  return d;
}

SpeciesTree demo_species_tree() {
  SpeciesTree s;
  s.labels = default_labels(8);  // A..H -> 0..7
  // Divergence heights of (((((F,E),(H,G)),(D,C)),B),A).
  const double h_fe = 0.5, h_hg = 0.75, h_fehg = 1.25, h_dc = 1.0, h_c6 = 1.75, h_b = 2.5, h_a = 3.25;
  const std::vector<std::size_t> fe{4, 5}, hg{6, 7}, dc{2, 3};
  s.distances.assign(8, std::vector<double>(8, 0.0));
  auto set_between = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y, double h) {
    for (std::size_t a : x) {
      for (std::size_t b : y) s.distances[a][b] = s.distances[b][a] = 2.0 * h;
    }
  };
  set_between({4}, {5}, h_fe);
  set_between({6}, {7}, h_hg);
  set_between(fe, hg, h_fehg);
  set_between({2}, {3}, h_dc);
  set_between({2, 3}, {4, 5, 6, 7}, h_c6);
  set_between({1}, {2, 3, 4, 5, 6, 7}, h_b);
  set_between({0}, {1, 2, 3, 4, 5, 6, 7}, h_a);
  return s;
}

DistanceMatrix sample_gene_tree(const SpeciesTree& species, double noise, CounterRng& rng) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidInput("gene tree: noise must be finite and >= 0");
  DistanceMatrix d = species.distances;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = d[i][j] + noise * rng.exponential(1.0);
  }
  return single_linkage_ultrametric(d);
}

}  // namespace tropgrad
