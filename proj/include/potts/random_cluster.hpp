#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "potts/model.hpp"
#include "potts/union_find.hpp"

namespace potts {

using Rng = std::mt19937_64;

// G+ : the model graph plus a ghost vertex joined to every vertex. Edge
// order is the model's edge order followed by ghost edges in vertex order.
struct AugmentedGraph {
  PottsModel base;
  VertexId ghost = 0;  // == base.num_vertices()
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<double> open_probability;  // 1 - exp(-J_e), then 1 - exp(-h_v)

  std::size_t num_edges() const noexcept { return edges.size(); }
  std::size_t ghost_edge(VertexId v) const noexcept { return base.num_edges() + v; }
};

AugmentedGraph augment(const PottsModel& model);

// omega_e in {0, 1} per edge of G+ (1 = open).
using BondConfig = std::vector<std::uint8_t>;

struct ClusterPartition {
  std::vector<VertexId> ghost_cluster;              // A_g without g itself
  std::vector<std::vector<VertexId>> other_clusters;  // A_1..A_k, ordered by smallest member
  std::vector<int> label;                           // per vertex: -1 for A_g, else r-1

  std::size_t k() const noexcept { return other_clusters.size(); }
};

ClusterPartition clusters(const AugmentedGraph& aug, std::span<const std::uint8_t> omega);

// Partition read off a forest over V plus the ghost (index `ghost`).
ClusterPartition partition_from_forest(UnionFind& forest, std::size_t num_vertices, VertexId ghost);

// prod_e p_e^{w_e} (1-p_e)^{1-w_e} q^{k(omega)}, k counting C_g as a cluster.
double rc_weight(const AugmentedGraph& aug, std::span<const std::uint8_t> omega);
double rc_weight(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, const ClusterPartition& part);

// Throws EnumerationTooLarge when 2^|E+| exceeds the cap.
void check_bond_enumeration(const AugmentedGraph& aug, const EnumerationLimits& limits);

// Visits every configuration of positive weight (edges with p = 0 stay
// closed) in increasing mask order; returns the total weight.
using BondVisitor = std::function<void(const BondConfig&, const ClusterPartition&, double weight)>;
double for_each_bond_config(const AugmentedGraph& aug, const EnumerationLimits& limits, const BondVisitor& visit);

double rc_partition_function(const AugmentedGraph& aug, const EnumerationLimits& limits = {});
double rc_probability(const AugmentedGraph& aug, std::span<const std::uint8_t> omega,
                      const EnumerationLimits& limits = {});

// phi(g) for a function of the bond configuration.
using BondFunction = std::function<Complex(const BondConfig&, const ClusterPartition&)>;
Complex rc_expectation(const AugmentedGraph& aug, const BondFunction& g, const EnumerationLimits& limits = {});

// C_g gets spin 0, every other cluster an independent uniform spin.
SpinConfig sample_spins(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, Rng& rng);
SpinConfig sample_spins(const ClusterPartition& part, int q, Rng& rng);

// sum_omega phi(omega) P(sigma | omega), indexed like spin_distribution().
std::vector<double> coupled_spin_marginal(const AugmentedGraph& aug, const EnumerationLimits& limits = {});

// E(prod_i f_i(sigma)^{R_i} | omega).
Complex conditional_expectation(const AugmentedGraph& aug, std::span<const std::uint8_t> omega,
                                std::span<const Factor> factors);
Complex conditional_expectation(const ClusterPartition& part, int q, std::span<const Factor> factors);

// prod_r E f(X)^{|R cap A_r|}, times f(0)^{|R cap A_g|} when `ghost_term`.
// With ghost_term this is g_R (and F_0); without it, F_1.
Complex cluster_moment_product(const ClusterPartition& part, const SpinFunction& f, const Region& region,
                               bool ghost_term);

// 1 iff no open path joins S to R or to the ghost.
bool event_Z(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, const Region& r, const Region& s);
bool event_Z(const ClusterPartition& part, const Region& r, const Region& s);

}  // namespace potts
