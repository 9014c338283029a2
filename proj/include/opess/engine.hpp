#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "opess/distances.hpp"
#include "opess/models.hpp"
#include "opess/rng.hpp"

namespace opess {

// One observed-prior-impact computation: a model, the observed data, the
// chain cap L, the realization count S, and the base seed. The optional
// fields pin parts of the simulation for diagnostics: forced_theta replaces
// the posterior draw of theta*, and forced_chain_value makes every future
// observation equal that constant.
struct OpessProblem {
  ModelSpec spec;
  Dataset data;
  long L = 0;
  long S = 1;
  std::uint64_t seed = 0;
  std::optional<ParamValue> forced_theta;
  std::optional<double> forced_chain_value;

  long n() const { return dataset_size(data); }
};

// Outcome of a single realization: the signed sample-size impact m_n, the
// sign, the argmin chain length on the winning branch, and the winning
// squared distance.
struct OpessRealization {
  long m_n = 0;
  int sign = 1;
  long argmin_m = 0;
  DistanceValue min_distance;
};

// Aggregate over S realizations.
struct OpessResult {
  double mopess = 0.0;
  std::map<double, double> quantiles;  // keys 0.05, 0.5, 0.95
  std::map<long, double> pmf;          // m_n -> frequency
  std::map<long, long> counts;         // m_n -> count
  double mean_min_distance = 0.0;
  double boundary_fraction = 0.0;
  bool boundary_warning = false;
  std::uint64_t seed = 0;
  long S = 0;
  long L = 0;
  long n = 0;
};

// Default chain cap: n plus max(10 * ceil(nominal pseudo-observations), 50).
long default_chain_cap(const ModelSpec& spec, long n);

// Both distance curves for one set of future chains. Element k of each
// vector is the squared distance at chain length m = n + k, so index 0
// holds the shared m = n value.
std::pair<std::vector<double>, std::vector<double>> distance_curves(
    const OpessProblem& problem, const FutureChains& chains);

struct SignMn {
  int sign = 1;
  long m_n = 0;
  long argmin_m = 0;
  double min_distance = 0.0;
};

// Sign rule and signed impact from the two curves. Ties resolve to the
// smallest chain length, and a tie between the curves' minima keeps the
// positive sign.
SignMn sign_and_mn(const std::vector<double>& w,
                   const std::vector<double>& w_tilde, long n);

// Realization `index` of the problem. Depends only on (seed, index), never
// on execution order.
OpessRealization opess_realization(const OpessProblem& problem, long index);

// Full posterior over m_n from S realizations, optionally spread over
// worker threads. The result is identical for every worker count.
OpessResult mopess(const OpessProblem& problem, int workers = 1);

}  // namespace opess
