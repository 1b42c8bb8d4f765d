#include "potts/random_cluster.hpp"

#include <cmath>
#include <unordered_map>

#include "potts/error.hpp"
#include "potts/function_classes.hpp"
#include "potts/union_find.hpp"

namespace potts {

AugmentedGraph augment(const PottsModel& model) {
  validate_model(model);
  AugmentedGraph aug;
  aug.base = model;
  aug.ghost = model.num_vertices();
  aug.edges.reserve(model.num_edges() + model.num_vertices());
  aug.open_probability.reserve(model.num_edges() + model.num_vertices());
  for (const auto& e : model.edges) {
    aug.edges.emplace_back(e.u, e.v);
    aug.open_probability.push_back(-std::expm1(-e.coupling));
  }
  for (VertexId v = 0; v < model.num_vertices(); ++v) {
    aug.edges.emplace_back(aug.ghost, v);
    aug.open_probability.push_back(-std::expm1(-model.fields[v]));
  }
  return aug;
}

namespace {

void check_omega(const AugmentedGraph& aug, std::span<const std::uint8_t> omega) {
  if (omega.size() != aug.num_edges()) {
    throw Error(ErrorCode::BadInput, "bond configuration is not indexed by the augmented edge set");
  }
}

}  // namespace

ClusterPartition partition_from_forest(UnionFind& uf, std::size_t n, VertexId ghost) {
  ClusterPartition part;
  part.label.assign(n, -1);
  const std::size_t ghost_root = uf.find(ghost);
  std::unordered_map<std::size_t, int> index_of_root;
  for (VertexId v = 0; v < n; ++v) {
    const std::size_t root = uf.find(v);
    if (root == ghost_root) {
      part.ghost_cluster.push_back(v);
      continue;
    }
    auto [it, inserted] = index_of_root.try_emplace(root, static_cast<int>(part.other_clusters.size()));
    if (inserted) part.other_clusters.emplace_back();
    part.other_clusters[static_cast<std::size_t>(it->second)].push_back(v);
    part.label[v] = it->second;
  }
  return part;
}

namespace {

// Exponents |R_i cap A| per factor i and cluster A; column 0 is A_g,
// column r is A_r.
std::vector<std::vector<int>> region_counts(const ClusterPartition& part, std::span<const Factor> factors) {
  std::vector<std::vector<int>> counts(factors.size(), std::vector<int>(part.k() + 1, 0));
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (VertexId v : factors[i].region.members()) {
      ++counts[i][static_cast<std::size_t>(part.label.at(v) + 1)];
    }
  }
  return counts;
}

}  // namespace

ClusterPartition clusters(const AugmentedGraph& aug, std::span<const std::uint8_t> omega) {
  check_omega(aug, omega);
  const std::size_t n = aug.base.num_vertices();
  UnionFind uf(n + 1);
  for (std::size_t e = 0; e < aug.num_edges(); ++e) {
    if (omega[e]) uf.unite(aug.edges[e].first, aug.edges[e].second);
  }
  return partition_from_forest(uf, n, aug.ghost);
}

double rc_weight(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, const ClusterPartition& part) {
  double w = 1.0;
  for (std::size_t e = 0; e < aug.num_edges(); ++e) {
    const double p = aug.open_probability[e];
    w *= omega[e] ? p : 1.0 - p;
  }
  return w * std::pow(static_cast<double>(aug.base.q), static_cast<double>(part.k() + 1));
}

double rc_weight(const AugmentedGraph& aug, std::span<const std::uint8_t> omega) {
  return rc_weight(aug, omega, clusters(aug, omega));
}

void check_bond_enumeration(const AugmentedGraph& aug, const EnumerationLimits& limits) {
  const std::size_t m = aug.num_edges();
  if (m >= 63 || (std::uint64_t{1} << m) > limits.cap) {
    throw Error(ErrorCode::EnumerationTooLarge,
                "2^|E+| = 2^" + std::to_string(m) + " exceeds enumeration cap " + std::to_string(limits.cap));
  }
}

double for_each_bond_config(const AugmentedGraph& aug, const EnumerationLimits& limits, const BondVisitor& visit) {
  check_bond_enumeration(aug, limits);
  std::vector<std::size_t> active;
  for (std::size_t e = 0; e < aug.num_edges(); ++e) {
    if (aug.open_probability[e] > 0.0) active.push_back(e);
  }
  CompensatedSum total;
  BondConfig omega(aug.num_edges(), 0);
  const std::uint64_t count = std::uint64_t{1} << active.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t j = 0; j < active.size(); ++j) omega[active[j]] = (mask >> j) & 1U;
    const ClusterPartition part = clusters(aug, omega);
    const double w = rc_weight(aug, omega, part);
    total.add(w);
    visit(omega, part, w);
  }
  return total.value();
}

double rc_partition_function(const AugmentedGraph& aug, const EnumerationLimits& limits) {
  return for_each_bond_config(aug, limits, [](const BondConfig&, const ClusterPartition&, double) {});
}

double rc_probability(const AugmentedGraph& aug, std::span<const std::uint8_t> omega,
                      const EnumerationLimits& limits) {
  check_omega(aug, omega);
  const double z = rc_partition_function(aug, limits);
  return rc_weight(aug, omega) / z;
}

Complex rc_expectation(const AugmentedGraph& aug, const BondFunction& g, const EnumerationLimits& limits) {
  ComplexCompensatedSum sum;
  const double z = for_each_bond_config(aug, limits, [&](const BondConfig& omega, const ClusterPartition& part,
                                                         double w) { sum.add(w * g(omega, part)); });
  return sum.value() / z;
}

SpinConfig sample_spins(const ClusterPartition& part, int q, Rng& rng) {
  SpinConfig spins(part.label.size(), 0);
  std::uniform_int_distribution<int> colour(0, q - 1);
  for (const auto& cluster : part.other_clusters) {
    const int s = colour(rng);
    for (VertexId v : cluster) spins[v] = s;
  }
  return spins;
}

SpinConfig sample_spins(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, Rng& rng) {
  return sample_spins(clusters(aug, omega), aug.base.q, rng);
}

std::vector<double> coupled_spin_marginal(const AugmentedGraph& aug, const EnumerationLimits& limits) {
  const std::uint64_t states = checked_state_count(aug.base, limits);
  check_bond_enumeration(aug, limits);
  const int q = aug.base.q;
  std::vector<double> probs(states, 0.0);
  SpinConfig spins(aug.base.num_vertices(), 0);
  const double z = for_each_bond_config(aug, limits, [&](const BondConfig&, const ClusterPartition& part, double w) {
    const std::size_t k = part.k();
    const double share = w / std::pow(static_cast<double>(q), static_cast<double>(k));
    std::vector<int> colours(k, 0);
    for (VertexId v : part.ghost_cluster) spins[v] = 0;
    while (true) {
      for (std::size_t r = 0; r < k; ++r) {
        for (VertexId v : part.other_clusters[r]) spins[v] = colours[r];
      }
      probs[spin_index(spins, q)] += share;
      std::size_t r = k;
      while (r > 0) {
        if (++colours[r - 1] < q) break;
        colours[r - 1] = 0;
        --r;
      }
      if (r == 0) break;
    }
  });
  for (double& p : probs) p /= z;
  return probs;
}

Complex conditional_expectation(const ClusterPartition& part, int q, std::span<const Factor> factors) {
  const auto counts = region_counts(part, factors);
  Complex value{1.0, 0.0};
  for (std::size_t i = 0; i < factors.size(); ++i) value *= int_pow(factors[i].f(0), counts[i][0]);

  const bool single_function = std::all_of(factors.begin(), factors.end(),
                                           [&](const Factor& fac) { return fac.f == factors.front().f; });
  if (single_function && !factors.empty()) {
    std::size_t total = 0;
    for (const auto& fac : factors) total += fac.region.size();
    const MomentTable table = moments(factors.front().f, static_cast<int>(total));
    for (std::size_t r = 1; r <= part.k(); ++r) {
      int m = 0;
      for (const auto& c : counts) m += c[r];
      value *= table.mean(m);
    }
    return value;
  }

  for (std::size_t r = 1; r <= part.k(); ++r) {
    ComplexCompensatedSum sum;
    for (int x = 0; x < q; ++x) {
      Complex term{1.0, 0.0};
      for (std::size_t i = 0; i < factors.size(); ++i) term *= int_pow(factors[i].f(x), counts[i][r]);
      sum.add(term);
    }
    value *= sum.value() / static_cast<double>(q);
  }
  return value;
}

Complex conditional_expectation(const AugmentedGraph& aug, std::span<const std::uint8_t> omega,
                                std::span<const Factor> factors) {
  return conditional_expectation(clusters(aug, omega), aug.base.q, factors);
}

Complex cluster_moment_product(const ClusterPartition& part, const SpinFunction& f, const Region& region,
                               bool ghost_term) {
  const Factor factor{f, region};
  const auto counts = region_counts(part, std::span(&factor, 1)).front();
  const MomentTable table = moments(f, static_cast<int>(region.size()));
  Complex value = ghost_term ? int_pow(f(0), counts[0]) : Complex{1.0, 0.0};
  for (std::size_t r = 1; r <= part.k(); ++r) value *= table.mean(counts[r]);
  return value;
}

bool event_Z(const ClusterPartition& part, const Region& r, const Region& s) {
  for (VertexId v : s.members()) {
    const int label = part.label.at(v);
    if (label < 0) return false;
    for (VertexId u : r.members()) {
      if (part.label.at(u) == label) return false;
    }
  }
  return true;
}

bool event_Z(const AugmentedGraph& aug, std::span<const std::uint8_t> omega, const Region& r, const Region& s) {
  return event_Z(clusters(aug, omega), r, s);
}

}  // namespace potts
