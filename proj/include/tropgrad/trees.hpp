#pragma once

// Phylogenetic tree utilities: cophenetic vectors, tree simulators,
// single-linkage (subdominant ultrametric) projection and canonical Newick
// topologies.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tropgrad/rng.hpp"

namespace tropgrad {

/// Dense symmetric n x n matrix.
using DistanceMatrix = std::vector<std::vector<double>>;

/// n(n-1)/2.
std::size_t pair_count(std::size_t n_leaves);

/// Inverse of pair_count; InvalidInput if dim is not a triangular number >= 3.
std::size_t leaves_for_dimension(std::size_t dim);

/// Upper triangle in lexicographic pair order (0,1),(0,2),...,(n-2,n-1).
std::vector<double> cophenetic_vector(const DistanceMatrix& d);
DistanceMatrix matrix_from_vector(std::span<const double> v);

/// InvalidInput unless d is square, symmetric, finite, nonnegative with zero diagonal.
void validate_distance_matrix(const DistanceMatrix& d);

/// Three-point condition: in every triple the two largest distances agree within tol.
bool is_ultrametric(const DistanceMatrix& d, double tol = 1e-9);
/// Four-point condition: for every quadruple the two largest of the three pair sums agree within tol.
bool is_tree_metric(const DistanceMatrix& d, double tol = 1e-9);

/// Subdominant ultrametric: u_ij = min over paths i -> j of the largest edge.
DistanceMatrix single_linkage_ultrametric(const DistanceMatrix& d);

/// Rooted topology of an ultrametric, merging pairs in order of (distance,
/// label pair). Canonical child order at every internal node: larger clades
/// first; among equal-sized clades the one holding the alphabetically
/// smallest label comes first; two leaves are written in descending label
/// order. Branch lengths are omitted and no trailing ';' is added.
std::string newick_topology(const DistanceMatrix& u, const std::vector<std::string>& labels);

/// Labels "A", "B", ... (then "L26", "L27", ... beyond Z).
std::vector<std::string> default_labels(std::size_t n);

/// Kingman coalescent with unit population size: while j lineages remain the
/// waiting time is Exp(j(j-1)/2) and a uniform pair merges. Cophenetic
/// distance is twice the merge height.
DistanceMatrix kingman_coalescent_tree(std::size_t n_leaves, CounterRng& rng);

/// Yule topology (a uniformly chosen leaf splits until n leaves exist), every
/// edge Exp(1), leaf labels shuffled. Returns path-length distances.
DistanceMatrix yule_tree(std::size_t n_leaves, CounterRng& rng);

/// Species tree with topology (((((F,E),(H,G)),(D,C)),B),A).
struct SpeciesTree {
  std::vector<std::string> labels;
  DistanceMatrix distances;  // ultrametric, twice the divergence heights
};
SpeciesTree demo_species_tree();

/// Gene tree around a species tree: every pairwise distance gets independent
/// noise * Exp(1) added (coalescence is always older than the species split),
/// then the result is projected back to an ultrametric by single linkage.
DistanceMatrix sample_gene_tree(const SpeciesTree& species, double noise, CounterRng& rng);

}  // namespace tropgrad
