#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/numeric.hpp"

namespace potts {

using VertexId = std::size_t;

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  double coupling = 0.0;  // J_e

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Ferromagnetic q-state Potts model with external field on a finite simple
// graph. The field h_v rewards spin 0 at v.
struct PottsModel {
  int q = 2;
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<double> fields;  // h_v, indexed like `vertices`

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_edges() const noexcept { return edges.size(); }
  std::optional<VertexId> find_vertex(std::string_view name) const;
  bool field_free() const noexcept;

  friend bool operator==(const PottsModel&, const PottsModel&) = default;
};

// Throws Error with NegativeCoupling, NegativeField, BadQ or BadEdge.
void validate_model(const PottsModel& model);

// Spin value per vertex, each in {0, ..., q-1}.
using SpinConfig = std::vector<int>;

void validate_spins(const PottsModel& model, std::span<const int> spins);

// A set of vertices. Construction rejects repeated or unknown vertices.
class Region {
 public:
  Region() = default;
  static Region from_indices(const PottsModel& model, std::vector<VertexId> members);
  static Region from_names(const PottsModel& model, std::span<const std::string> names);

  std::span<const VertexId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(VertexId v) const noexcept;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<VertexId> members_;
};

// f : {0, ..., q-1} -> C, stored as its value table.
class SpinFunction {
 public:
  SpinFunction() = default;
  explicit SpinFunction(std::vector<Complex> values);
  static SpinFunction real(std::span<const double> values);
  static SpinFunction constant(int q, Complex c);

  int q() const noexcept { return static_cast<int>(values_.size()); }
  Complex operator()(int x) const { return values_[static_cast<std::size_t>(x)]; }
  std::span<const Complex> values() const noexcept { return values_; }
  double max_modulus() const noexcept;

  friend bool operator==(const SpinFunction&, const SpinFunction&) = default;

 private:
  std::vector<Complex> values_;
};

// One term f(sigma)^R of a product observable.
struct Factor {
  SpinFunction f;
  Region region;
};

// A model parameter with respect to which means are differentiated.
struct Coordinate {
  enum class Kind { Edge, Vertex };
  Kind kind = Kind::Edge;
  std::size_t index = 0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

// Product of factors, optionally multiplied by the Kronecker delta attached
// to a coordinate (delta_e for an edge, delta_{sigma_v,0} for a vertex).
struct Observable {
  std::vector<Factor> factors;
  std::optional<Coordinate> delta;
};

struct EnumerationLimits {
  static constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 24;
  std::uint64_t cap = kDefaultCap;
  unsigned jobs = 1;
};

// Number of spin states q^|V|; throws EnumerationTooLarge past the cap.
std::uint64_t checked_state_count(const PottsModel& model, const EnumerationLimits& limits);

// Unnormalized Gibbs weight exp{sum_e J_e delta_e + sum_v h_v delta_v}.
double potts_weight(const PottsModel& model, std::span<const int> spins);

double partition_function(const PottsModel& model, const EnumerationLimits& limits = {});
double log_partition_function(const PottsModel& model, const EnumerationLimits& limits = {});

// Exact mean of prod_i f_i(sigma)^{R_i} under the Potts measure.
Complex potts_expectation(const PottsModel& model, std::span<const Factor> factors,
                          const EnumerationLimits& limits = {});

// Several means from a single pass over the state space.
std::vector<Complex> potts_expectations(const PottsModel& model,
                                        std::span<const Observable> observables,
                                        const EnumerationLimits& limits = {});

// pi(sigma) for every sigma, indexed lexicographically (vertex 0 most significant).
std::vector<double> spin_distribution(const PottsModel& model, const EnumerationLimits& limits = {});

std::uint64_t spin_index(std::span<const int> spins, int q) noexcept;
SpinConfig spins_from_index(std::uint64_t index, std::size_t num_vertices, int q);

PottsModel with_coordinate(const PottsModel& model, Coordinate c, double value);
double coordinate_value(const PottsModel& model, Coordinate c);

}  // namespace potts
