#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "opess/numerics.hpp"
#include "opess/rng.hpp"

namespace opess {

using Eigen::Matrix2d;
using Eigen::Vector2d;

// Known-variance Gaussian location family. An absent prior_var means the
// flat improper prior on the location.
struct GaussianModelSpec {
  double sigma2 = 1.0;
  double mu0 = 0.0;
  std::optional<double> prior_var;  // lambda0^2

  bool flat() const { return !prior_var.has_value(); }
  // Nominal prior sample size z = sigma^2 / lambda0^2 (0 under a flat prior).
  double pseudo_obs() const { return flat() ? 0.0 : sigma2 / *prior_var; }
  GaussianModelSpec baseline() const { return {sigma2, mu0, std::nullopt}; }
};

// Bernoulli likelihood with a Beta(alpha, beta) informative prior; the
// baseline prior is fixed at Beta(1, 1).
struct BetaBernoulliModelSpec {
  double alpha = 1.0;
  double beta = 1.0;

  double pseudo_obs() const { return alpha + beta - 2.0; }
};

// Simple linear regression y = b1 + b2 x + e with known noise variance and
// independent Gaussian priors on the two coefficients. Absent prior
// variances mean the flat baseline prior.
struct RegressionModelSpec {
  double sigma2 = 1.0;
  Vector2d eta0 = Vector2d::Zero();
  std::optional<double> tau1_sq;
  std::optional<double> tau2_sq;

  bool flat() const { return !tau1_sq.has_value() || !tau2_sq.has_value(); }
  double pseudo_obs() const;
  RegressionModelSpec baseline() const {
    return {sigma2, eta0, std::nullopt, std::nullopt};
  }
};

using ModelSpec =
    std::variant<GaussianModelSpec, BetaBernoulliModelSpec, RegressionModelSpec>;

enum class Family { gaussian, bernoulli, regression };

Family family_of(const ModelSpec& spec);

// Nominal prior sample size of the informative prior in spec.
double nominal_pseudo_obs(const ModelSpec& spec);

// Observations for the scalar families, with the running sum cached so
// posterior updates never rescan the data.
struct ScalarData {
  std::vector<double> values;
  double sum = 0.0;

  static ScalarData from_values(std::vector<double> v);
  long n() const { return static_cast<long>(values.size()); }
  double ybar() const { return values.empty() ? 0.0 : sum / n(); }
  // Number of 1s when the values are Bernoulli.
  long successes() const { return static_cast<long>(std::llround(sum)); }
};

// Paired observations (x, y) with the cross sums needed by the regression
// posteriors.
struct RegressionData {
  std::vector<std::pair<double, double>> xy;
  double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;

  static RegressionData from_pairs(std::vector<std::pair<double, double>> p);
  long n() const { return static_cast<long>(xy.size()); }
};

using Dataset = std::variant<ScalarData, RegressionData>;

long dataset_size(const Dataset& data);

struct Gaussian1D {
  double mean = 0.0;
  double var = 1.0;
};

struct BetaDist {
  double a = 1.0;
  double b = 1.0;
};

struct Gaussian2D {
  Vector2d mean = Vector2d::Zero();
  Spd2x2 cov;
};

using Posterior = std::variant<Gaussian1D, BetaDist, Gaussian2D>;

using ParamValue = std::variant<double, Vector2d>;

// Sufficient statistics of one future chain, captured while the chain is
// generated so each expanded posterior costs O(1).
struct ChainStats {
  long len = 0;
  double s1 = 0.0;   // scalar families: sum of values; regression: sum of x
  double s2 = 0.0;   // regression: sum of x^2
  double sy = 0.0;   // regression: sum of y
  double sxy = 0.0;  // regression: sum of x*y
};

using ScalarChain = std::vector<double>;
using PairChain = std::vector<std::pair<double, double>>;

// The doubly indexed future-sample family: for each m in n+1..L one primary
// chain and one mirror chain, each holding m-n fresh draws from the sampling
// model at theta_star. Chains are indexed by c = m - n - 1. Scalar families
// fill primary/mirror; the regression family fills primary_xy/mirror_xy.
struct FutureChains {
  long n = 0;
  long L = 0;
  ParamValue theta_star = 0.0;
  std::vector<ScalarChain> primary, mirror;
  std::vector<PairChain> primary_xy, mirror_xy;
  std::vector<ChainStats> primary_stats, mirror_stats;

  long chain_count() const { return L - n; }
};

// Posterior of the Gaussian location given n observations with mean ybar.
Posterior posterior_gaussian(const GaussianModelSpec& spec, long n, double ybar);

// Beta posterior from success counts; use_baseline selects Beta(1,1) over
// the informative prior.
Posterior posterior_beta(const BetaBernoulliModelSpec& spec, long successes,
                         long n, bool use_baseline);

// Conjugate or flat-prior regression posterior for the coefficient pair.
Posterior posterior_regression(const RegressionModelSpec& spec,
                               const RegressionData& data, bool use_baseline);

// Same posterior from raw sums, for expanded datasets assembled from
// sufficient statistics.
Posterior posterior_regression_sums(const RegressionModelSpec& spec, long n,
                                    double sx, double sxx, double sy,
                                    double sxy, bool use_baseline);

// One exact draw from a posterior.
ParamValue sample_theta(const Posterior& post, RngStream& rng);

// Generate the whole future-sample family at a single shared theta_star.
// Every chain consumes its own substream keyed off rng, so chains are
// mutually independent across m and across the primary/mirror split.
FutureChains generate_future_chains(const ModelSpec& spec,
                                    const ParamValue& theta_star, long n,
                                    long L, RngStream& rng);

ChainStats stats_of_chain(const ScalarChain& chain);
ChainStats stats_of_chain(const PairChain& chain);

// Posterior of data extended by one chain, from sufficient statistics only.
Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const ChainStats& chain, bool use_baseline);

// Convenience overloads taking the raw chain observations.
Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const ScalarChain& chain, bool use_baseline);
Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const PairChain& chain, bool use_baseline);

}  // namespace opess
