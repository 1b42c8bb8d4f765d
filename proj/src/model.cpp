#include "potts/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>
#include <utility>

#include "potts/error.hpp"

namespace potts {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeCoupling: return "NegativeCoupling";
    case ErrorCode::NegativeField: return "NegativeField";
    case ErrorCode::BadQ: return "BadQ";
    case ErrorCode::BadEdge: return "BadEdge";
    case ErrorCode::BadRegion: return "BadRegion";
    case ErrorCode::BadSpin: return "BadSpin";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::BadFamilyC: return "BadFamilyC";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

std::optional<VertexId> PottsModel::find_vertex(std::string_view name) const {
  const auto it = std::find(vertices.begin(), vertices.end(), name);
  if (it == vertices.end()) return std::nullopt;
  return static_cast<VertexId>(it - vertices.begin());
}

bool PottsModel::field_free() const noexcept {
  return std::all_of(fields.begin(), fields.end(), [](double h) { return h == 0.0; });
}

void validate_model(const PottsModel& model) {
  if (model.q < 2) throw Error(ErrorCode::BadQ, "q must be at least 2, got " + std::to_string(model.q));
  if (model.fields.size() != model.vertices.size()) {
    throw Error(ErrorCode::BadInput, "field vector length does not match vertex count");
  }
  std::set<std::string_view> names;
  for (const auto& name : model.vertices) {
    if (!names.insert(name).second) throw Error(ErrorCode::BadInput, "duplicate vertex '" + name + "'");
  }
  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& e : model.edges) {
    if (e.u >= model.num_vertices() || e.v >= model.num_vertices()) {
      throw Error(ErrorCode::BadEdge, "edge endpoint is not a vertex");
    }
    if (e.u == e.v) throw Error(ErrorCode::BadEdge, "self-loop at '" + model.vertices[e.u] + "'");
    if (!seen.insert(std::minmax(e.u, e.v)).second) {
      throw Error(ErrorCode::BadEdge,
                  "duplicate edge <" + model.vertices[e.u] + "," + model.vertices[e.v] + ">");
    }
    if (!(e.coupling >= 0.0) || !std::isfinite(e.coupling)) {
      throw Error(ErrorCode::NegativeCoupling, "coupling must be finite and non-negative");
    }
  }
  for (double h : model.fields) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::NegativeField, "field must be finite and non-negative");
    }
  }
}

void validate_spins(const PottsModel& model, std::span<const int> spins) {
  if (spins.size() != model.num_vertices()) throw Error(ErrorCode::BadSpin, "spin vector has wrong length");
  for (int s : spins) {
    if (s < 0 || s >= model.q) throw Error(ErrorCode::BadSpin, "spin out of range");
  }
}

Region Region::from_indices(const PottsModel& model, std::vector<VertexId> members) {
  std::set<VertexId> seen;
  for (VertexId v : members) {
    if (v >= model.num_vertices()) throw Error(ErrorCode::BadRegion, "region member is not a vertex");
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::BadRegion, "vertex '" + model.vertices[v] + "' repeated in region");
    }
  }
  Region r;
  r.members_ = std::move(members);
  return r;
}

Region Region::from_names(const PottsModel& model, std::span<const std::string> names) {
  std::vector<VertexId> ids;
  ids.reserve(names.size());
  for (const auto& name : names) {
    const auto id = model.find_vertex(name);
    if (!id) throw Error(ErrorCode::BadRegion, "unknown vertex '" + name + "'");
    ids.push_back(*id);
  }
  return from_indices(model, std::move(ids));
}

bool Region::contains(VertexId v) const noexcept {
  return std::find(members_.begin(), members_.end(), v) != members_.end();
}

SpinFunction::SpinFunction(std::vector<Complex> values) : values_(std::move(values)) {}

SpinFunction SpinFunction::real(std::span<const double> values) {
  return SpinFunction(std::vector<Complex>(values.begin(), values.end()));
}

SpinFunction SpinFunction::constant(int q, Complex c) {
  return SpinFunction(std::vector<Complex>(static_cast<std::size_t>(q), c));
}

double SpinFunction::max_modulus() const noexcept {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

std::uint64_t checked_state_count(const PottsModel& model, const EnumerationLimits& limits) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < model.num_vertices(); ++i) {
    if (count > limits.cap / static_cast<std::uint64_t>(model.q)) {
      throw Error(ErrorCode::EnumerationTooLarge,
                  "q^|V| exceeds enumeration cap " + std::to_string(limits.cap));
    }
    count *= static_cast<std::uint64_t>(model.q);
  }
  if (count > limits.cap) {
    throw Error(ErrorCode::EnumerationTooLarge, "q^|V| exceeds enumeration cap " + std::to_string(limits.cap));
  }
  return count;
}

std::uint64_t spin_index(std::span<const int> spins, int q) noexcept {
  std::uint64_t index = 0;
  for (int s : spins) index = index * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(s);
  return index;
}

SpinConfig spins_from_index(std::uint64_t index, std::size_t num_vertices, int q) {
  SpinConfig spins(num_vertices, 0);
  for (std::size_t i = num_vertices; i-- > 0;) {
    spins[i] = static_cast<int>(index % static_cast<std::uint64_t>(q));
    index /= static_cast<std::uint64_t>(q);
  }
  return spins;
}

double coordinate_value(const PottsModel& model, Coordinate c) {
  return c.kind == Coordinate::Kind::Edge ? model.edges.at(c.index).coupling : model.fields.at(c.index);
}

PottsModel with_coordinate(const PottsModel& model, Coordinate c, double value) {
  PottsModel out = model;
  if (c.kind == Coordinate::Kind::Edge) {
    out.edges.at(c.index).coupling = value;
  } else {
    out.fields.at(c.index) = value;
  }
  return out;
}

namespace {

constexpr double kLogSpaceThreshold = 600.0;
constexpr std::uint64_t kChunkSize = 1 << 12;

// Evaluates Gibbs weights. Direct products of precomputed exponentials are
// used unless the largest possible exponent could overflow, in which case
// weights are exp(exponent - shift) with shift the largest exponent.
class WeightKernel {
 public:
  explicit WeightKernel(const PottsModel& model) : model_(model) {
    double max_j = 0.0;
    double max_h = 0.0;
    double total = 0.0;
    for (const auto& e : model.edges) {
      max_j = std::max(max_j, e.coupling);
      total += e.coupling;
    }
    for (double h : model.fields) {
      max_h = std::max(max_h, h);
      total += h;
    }
    log_space_ = static_cast<double>(model.num_edges()) * max_j +
                     static_cast<double>(model.num_vertices()) * max_h >
                 kLogSpaceThreshold;
    if (log_space_) {
      shift_ = total;
    } else {
      edge_factor_.reserve(model.num_edges());
      for (const auto& e : model.edges) edge_factor_.push_back(std::exp(e.coupling));
      vertex_factor_.reserve(model.num_vertices());
      for (double h : model.fields) vertex_factor_.push_back(std::exp(h));
    }
  }

  double shift() const noexcept { return shift_; }

  // Weight divided by exp(shift).
  double operator()(std::span<const int> spins) const noexcept {
    if (log_space_) {
      double exponent = 0.0;
      for (const auto& e : model_.edges) {
        if (spins[e.u] == spins[e.v]) exponent += e.coupling;
      }
      for (std::size_t v = 0; v < spins.size(); ++v) {
        if (spins[v] == 0) exponent += model_.fields[v];
      }
      return std::exp(exponent - shift_);
    }
    double w = 1.0;
    for (std::size_t i = 0; i < model_.edges.size(); ++i) {
      const auto& e = model_.edges[i];
      if (spins[e.u] == spins[e.v]) w *= edge_factor_[i];
    }
    for (std::size_t v = 0; v < spins.size(); ++v) {
      if (spins[v] == 0) w *= vertex_factor_[v];
    }
    return w;
  }

 private:
  const PottsModel& model_;
  bool log_space_ = false;
  double shift_ = 0.0;
  std::vector<double> edge_factor_;
  std::vector<double> vertex_factor_;
};

Complex evaluate(const Observable& obs, const PottsModel& model, std::span<const int> spins) {
  if (obs.delta) {
    const auto& c = *obs.delta;
    if (c.kind == Coordinate::Kind::Edge) {
      const auto& e = model.edges[c.index];
      if (spins[e.u] != spins[e.v]) return {0.0, 0.0};
    } else if (spins[c.index] != 0) {
      return {0.0, 0.0};
    }
  }
  Complex value{1.0, 0.0};
  for (const auto& factor : obs.factors) {
    for (VertexId v : factor.region.members()) value *= factor.f(spins[v]);
  }
  return value;
}

void increment(SpinConfig& spins, int q) noexcept {
  for (std::size_t i = spins.size(); i-- > 0;) {
    if (++spins[i] < q) return;
    spins[i] = 0;
  }
}

// Runs `body(begin, end, chunk)` over fixed-size chunks of the state index
// range. Chunk boundaries do not depend on the number of workers, so any
// per-chunk result reduced in chunk order is independent of `jobs`.
template <class Body>
void for_each_chunk(std::uint64_t total, unsigned jobs, Body&& body) {
  const std::uint64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, jobs), chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      body(c * kChunkSize, std::min(total, (c + 1) * kChunkSize), c);
    }
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        body(c * kChunkSize, std::min(total, (c + 1) * kChunkSize), c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct WeightedSums {
  double weight = 0.0;  // partition function divided by exp(shift)
  double shift = 0.0;
  std::vector<Complex> sums;
};

void check_observables(const PottsModel& model, std::span<const Observable> observables) {
  for (const auto& obs : observables) {
    for (const auto& factor : obs.factors) {
      if (factor.f.q() != model.q) throw Error(ErrorCode::BadInput, "spin function length differs from q");
      for (VertexId v : factor.region.members()) {
        if (v >= model.num_vertices()) throw Error(ErrorCode::BadRegion, "region member is not a vertex");
      }
    }
    if (obs.delta) {
      const auto& c = *obs.delta;
      const std::size_t limit = c.kind == Coordinate::Kind::Edge ? model.num_edges() : model.num_vertices();
      if (c.index >= limit) throw Error(ErrorCode::BadInput, "coordinate index out of range");
    }
  }
}

WeightedSums weighted_sums(const PottsModel& model, std::span<const Observable> observables,
                           const EnumerationLimits& limits) {
  validate_model(model);
  check_observables(model, observables);
  const std::uint64_t total = checked_state_count(model, limits);
  const WeightKernel kernel(model);
  const std::uint64_t chunks = (total + kChunkSize - 1) / kChunkSize;

  struct Partial {
    double weight = 0.0;
    std::vector<Complex> sums;
  };
  std::vector<Partial> partials(chunks);

  for_each_chunk(total, limits.jobs, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t chunk) {
    SpinConfig spins = spins_from_index(begin, model.num_vertices(), model.q);
    CompensatedSum weight;
    std::vector<ComplexCompensatedSum> sums(observables.size());
    for (std::uint64_t i = begin; i < end; ++i) {
      const double w = kernel(spins);
      weight.add(w);
      for (std::size_t k = 0; k < observables.size(); ++k) {
        sums[k].add(w * evaluate(observables[k], model, spins));
      }
      increment(spins, model.q);
    }
    auto& p = partials[chunk];
    p.weight = weight.value();
    p.sums.reserve(sums.size());
    for (const auto& s : sums) p.sums.push_back(s.value());
  });

  CompensatedSum weight;
  std::vector<ComplexCompensatedSum> sums(observables.size());
  for (const auto& p : partials) {
    weight.add(p.weight);
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k].add(p.sums[k]);
  }
  WeightedSums out;
  out.weight = weight.value();
  out.shift = kernel.shift();
  out.sums.reserve(sums.size());
  for (const auto& s : sums) out.sums.push_back(s.value());
  return out;
}

}  // namespace

double potts_weight(const PottsModel& model, std::span<const int> spins) {
  double exponent = 0.0;
  for (const auto& e : model.edges) {
    if (spins[e.u] == spins[e.v]) exponent += e.coupling;
  }
  for (std::size_t v = 0; v < spins.size(); ++v) {
    if (spins[v] == 0) exponent += model.fields[v];
  }
  return std::exp(exponent);
}

double log_partition_function(const PottsModel& model, const EnumerationLimits& limits) {
  const auto sums = weighted_sums(model, {}, limits);
  return std::log(sums.weight) + sums.shift;
}

double partition_function(const PottsModel& model, const EnumerationLimits& limits) {
  const auto sums = weighted_sums(model, {}, limits);
  return sums.shift == 0.0 ? sums.weight : std::exp(std::log(sums.weight) + sums.shift);
}

std::vector<Complex> potts_expectations(const PottsModel& model, std::span<const Observable> observables,
                                        const EnumerationLimits& limits) {
  const auto sums = weighted_sums(model, observables, limits);
  std::vector<Complex> means;
  means.reserve(sums.sums.size());
  for (const auto& s : sums.sums) means.push_back(s / sums.weight);
  return means;
}

Complex potts_expectation(const PottsModel& model, std::span<const Factor> factors,
                          const EnumerationLimits& limits) {
  const Observable obs{std::vector<Factor>(factors.begin(), factors.end()), std::nullopt};
  return potts_expectations(model, std::span(&obs, 1), limits).front();
}

std::vector<double> spin_distribution(const PottsModel& model, const EnumerationLimits& limits) {
  validate_model(model);
  const std::uint64_t total = checked_state_count(model, limits);
  const WeightKernel kernel(model);
  std::vector<double> probs(total);
  for_each_chunk(total, limits.jobs, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t) {
    SpinConfig spins = spins_from_index(begin, model.num_vertices(), model.q);
    for (std::uint64_t i = begin; i < end; ++i) {
      probs[i] = kernel(spins);
      increment(spins, model.q);
    }
  });
  CompensatedSum z;
  for (double w : probs) z.add(w);
  const double norm = z.value();
  for (double& p : probs) p /= norm;
  return probs;
}

}  // namespace potts
