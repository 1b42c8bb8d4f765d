#include "potts/sampler.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "potts/error.hpp"

namespace potts {

ChainState initial_state(const PottsModel& model, std::uint64_t seed) {
  ChainState state;
  state.spins.assign(model.num_vertices(), 0);
  state.rng.seed(seed);
  return state;
}

SwendsenWang::SwendsenWang(const PottsModel& model) : aug_(augment(model)), forest_(model.num_vertices() + 1) {}

void SwendsenWang::bond_step(std::span<const int> spins, Rng& rng) {
  const std::size_t n = aug_.base.num_vertices();
  forest_.reset(n + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t real_edges = aug_.base.num_edges();
  for (std::size_t e = 0; e < real_edges; ++e) {
    const auto [u, v] = aug_.edges[e];
    const double p = aug_.open_probability[e];
    if (p > 0.0 && spins[u] == spins[v] && unit(rng) < p) forest_.unite(u, v);
  }
  for (VertexId v = 0; v < n; ++v) {
    const double p = aug_.open_probability[real_edges + v];
    if (p > 0.0 && spins[v] == 0 && unit(rng) < p) forest_.unite(aug_.ghost, v);
  }
}

ClusterPartition SwendsenWang::partition() {
  return partition_from_forest(forest_, aug_.base.num_vertices(), aug_.ghost);
}

void SwendsenWang::spin_step(SpinConfig& spins, Rng& rng) {
  const std::size_t n = aug_.base.num_vertices();
  colour_of_root_.assign(n + 1, -1);
  colour_of_root_[forest_.find(aug_.ghost)] = 0;
  std::uniform_int_distribution<int> colour(0, aug_.base.q - 1);
  for (VertexId v = 0; v < n; ++v) {
    int& c = colour_of_root_[forest_.find(v)];
    if (c < 0) c = colour(rng);
    spins[v] = c;
  }
}

void SwendsenWang::sweep(ChainState& state) {
  bond_step(state.spins, state.rng);
  spin_step(state.spins, state.rng);
  ++state.sweeps;
}

void sw_sweep(const PottsModel& model, ChainState& state) {
  SwendsenWang sw(model);
  sw.sweep(state);
}

Estimate summarize_series(std::span<const Complex> series, std::size_t batches) {
  Estimate est;
  const std::size_t n = series.size();
  if (n == 0) throw Error(ErrorCode::BadWindow, "no samples to summarize");
  const std::size_t b = std::min(batches, n);
  const std::size_t batch_size = n / b;
  const std::size_t used = batch_size * b;
  est.samples = used;

  std::vector<Complex> batch_means;
  batch_means.reserve(b);
  ComplexCompensatedSum total;
  for (std::size_t k = 0; k < b; ++k) {
    ComplexCompensatedSum sum;
    for (std::size_t i = k * batch_size; i < (k + 1) * batch_size; ++i) sum.add(series[i]);
    total.add(sum.value());
    batch_means.push_back(sum.value() / static_cast<double>(batch_size));
  }
  est.mean = total.value() / static_cast<double>(used);

  CompensatedSum sq;
  for (std::size_t i = 0; i < used; ++i) sq.add(std::norm(series[i] - est.mean));
  est.sample_variance = used > 1 ? sq.value() / static_cast<double>(used - 1) : 0.0;

  if (b < 2) {
    est.standard_error = std::numeric_limits<double>::infinity();
    est.effective_samples = 1.0;
    return est;
  }
  CompensatedSum batch_sq;
  for (const auto& m : batch_means) batch_sq.add(std::norm(m - est.mean));
  const double batch_variance = batch_sq.value() / static_cast<double>(b - 1);
  est.standard_error = std::sqrt(batch_variance / static_cast<double>(b));
  if (est.standard_error == 0.0) {
    est.effective_samples = static_cast<double>(used);
  } else {
    const double ess = est.sample_variance / (est.standard_error * est.standard_error);
    est.effective_samples = std::min(ess, static_cast<double>(used));
  }
  return est;
}

Estimate estimate(const PottsModel& model, std::span<const Factor> factors, const EstimateOptions& opts) {
  validate_model(model);
  for (const auto& factor : factors) {
    if (factor.f.q() != model.q) throw Error(ErrorCode::BadInput, "spin function length differs from q");
  }
  const std::uint64_t burn_in = opts.burn_in.value_or(opts.sweeps / 10);
  if (burn_in >= opts.sweeps) throw Error(ErrorCode::BadWindow, "burn-in must be smaller than the sweep count");

  SwendsenWang sw(model);
  ChainState state = initial_state(model, opts.seed);
  std::vector<Complex> series;
  series.reserve(opts.sweeps - burn_in);

  for (std::uint64_t t = 0; t < opts.sweeps; ++t) {
    if (opts.mode == EstimatorMode::RaoBlackwell) {
      sw.bond_step(state.spins, state.rng);
      if (t >= burn_in) series.push_back(conditional_expectation(sw.partition(), model.q, factors));
      sw.spin_step(state.spins, state.rng);
      ++state.sweeps;
    } else {
      sw.sweep(state);
      if (t >= burn_in) {
        Complex value{1.0, 0.0};
        for (const auto& factor : factors) {
          for (VertexId v : factor.region.members()) value *= factor.f(state.spins[v]);
        }
        series.push_back(value);
      }
    }
  }

  Estimate est = summarize_series(series);
  est.sweeps = opts.sweeps;
  est.burn_in = burn_in;
  return est;
}

std::vector<Estimate> estimate_chains(const PottsModel& model, std::span<const Factor> factors,
                                      const EstimateOptions& opts, std::span<const std::uint64_t> seeds,
                                      unsigned jobs) {
  std::vector<Estimate> out(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        EstimateOptions o = opts;
        o.seed = seeds[i];
        out[i] = estimate(model, factors, o);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), seeds.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace potts
