#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "potts/model.hpp"
#include "potts/random_cluster.hpp"
#include "potts/union_find.hpp"

namespace potts {

struct ChainState {
  SpinConfig spins;
  std::uint64_t sweeps = 0;
  Rng rng;
};

// All spins 0, sweep counter 0.
ChainState initial_state(const PottsModel& model, std::uint64_t seed);

// Swendsen-Wang dynamics with ghost bonds. A sweep opens each real edge
// with probability p_e when its endpoints agree and each ghost edge with
// probability p_v when the spin is 0, then recolours clusters: the ghost
// cluster gets 0 and every other cluster an independent uniform spin.
class SwendsenWang {
 public:
  explicit SwendsenWang(const PottsModel& model);

  const AugmentedGraph& graph() const noexcept { return aug_; }

  // Bond half of a sweep; leaves the clusters in the internal forest.
  void bond_step(std::span<const int> spins, Rng& rng);
  // Clusters of the last bond step.
  ClusterPartition partition();
  // Spin half of a sweep, using the clusters of the last bond step.
  void spin_step(SpinConfig& spins, Rng& rng);

  void sweep(ChainState& state);

 private:
  AugmentedGraph aug_;
  UnionFind forest_;
  std::vector<int> colour_of_root_;
};

// One full sweep on a fresh workspace.
void sw_sweep(const PottsModel& model, ChainState& state);

enum class EstimatorMode {
  Raw,           // time average of prod_i f_i(sigma)^{R_i}
  RaoBlackwell,  // time average of E(prod_i f_i(sigma)^{R_i} | omega)
};

inline constexpr std::size_t kBatchCount = 16;

struct EstimateOptions {
  std::uint64_t sweeps = 0;
  std::optional<std::uint64_t> burn_in;  // default: sweeps / 10
  std::uint64_t seed = 0;
  EstimatorMode mode = EstimatorMode::Raw;
};

struct Estimate {
  Complex mean;
  double standard_error = 0.0;  // batch means over kBatchCount batches
  double effective_samples = 0.0;
  double sample_variance = 0.0;  // per-sample, ignoring autocorrelation
  std::uint64_t sweeps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t samples = 0;  // samples entering the batches
};

// Throws BadWindow unless sweeps > burn_in.
Estimate estimate(const PottsModel& model, std::span<const Factor> factors, const EstimateOptions& opts);

// Independent chains, one per seed, run on up to `jobs` threads. Results
// are in seed order.
std::vector<Estimate> estimate_chains(const PottsModel& model, std::span<const Factor> factors,
                                      const EstimateOptions& opts, std::span<const std::uint64_t> seeds,
                                      unsigned jobs);

// Batch-means summary of a series (exposed for testing).
Estimate summarize_series(std::span<const Complex> series, std::size_t batches = kBatchCount);

}  // namespace potts
