#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opess/rng.hpp"

namespace opess {

// Closed-form machinery for the Gaussian known-variance model. Location
// arguments here are measured relative to the prior mean, so ybar and mu
// stand for ybar - mu0 and mu - mu0; every quantity below is invariant
// under a common shift of (ybar, mu, mu0).

// Parameters of the two conditional distance laws at chain length m given
// the data mean and the latent mean: the primary branch distance is
// tau_m * chi2_1(lambda_m / tau_m) + c2_m and the mirror branch distance is
// kappa_m * chi2_1(delta_m / kappa_m) + c2t_m.
struct CondDistParams {
  double tau_m = 0.0;
  double lambda_m = 0.0;
  double c2_m = 0.0;
  double kappa_m = 0.0;
  double delta_m = 0.0;
  double c2t_m = 0.0;
};

CondDistParams cond_dist_params(long m, long n, double z, double sigma,
                                double ybar, double mu);

enum class Branch { primary, mirror };

// One draw from the conditional distance law of the given branch.
double cond_distance_sample(const CondDistParams& p, Branch branch,
                            RngStream& rng);

// Parameters of the distance laws with the latent mean integrated out:
// the primary branch noncentral scale is tau_m with fixed noncentrality
// numerator lambda, the mirror branch uses kappa_m and delta.
struct MarginalDistParams {
  double tau_m = 0.0;
  double lambda = 0.0;
  double kappa_m = 0.0;
  double delta = 0.0;
};

MarginalDistParams marginal_dist_params(long m, long n, double z, double sigma,
                                        double ybar);

// Largest chain lengths whose distance can still fall below t. Both bounds
// are absent when t >= sigma^2 / (n + z), where every chain length stays
// eligible.
struct TruncationBounds {
  std::optional<long> M;
  std::optional<long> M_tilde;
};

TruncationBounds truncation_bounds(double t, long n, double z, double sigma);

// Query for the closed-form posterior probability of one signed impact
// value v. mu_draws latent means are drawn from their conditional law
// (or pinned to forced_mu), and for v != 0 each pairs with t_draws winning
// distances.
struct PmfQuery {
  long v = 0;
  double ybar = 0.0;
  long n = 0;
  double z = 0.0;
  double sigma = 1.0;
  long mu_draws = 1000;
  long t_draws = 1000;
  std::optional<double> forced_mu;
  std::uint64_t seed = 0;
};

double opess_pmf(const PmfQuery& query);

// Deterministic distance curves when every future observation equals a
// fixed constant: the posterior mean (posterior_predictive), the data mean
// (bootstrap), or the prior mean (prior).
enum class Prop1Mode { posterior_predictive, bootstrap, prior };

struct Prop1Result {
  std::vector<double> W;        // index k is chain length m = n + k
  std::vector<double> W_tilde;  // same indexing
  long m_n = 0;
  int sign = 1;
};

Prop1Result prop1_curves(Prop1Mode mode, long n, double z, double sigma,
                         double ybar, double mu0, long L);

// Exceedance probabilities for small impact values at offset r: p is the
// chance the primary curve dips below its m = n value at m = n + r, p_tilde
// the mirror analogue. epsilon is ybar minus the posterior mean.
struct SmallMopessProbs {
  double p = 0.0;
  double p_tilde = 0.0;
};

SmallMopessProbs small_mopess_probs(long r, long n, double z, double sigma,
                                    double epsilon, long mc, RngStream& rng);

// Largest epsilon^2 at which p_tilde(1) is still exactly zero.
double p_tilde_threshold(long n, double z, double sigma);

// Chain length minimizing the expected KL divergence from the flat-prior
// m-observation posterior to the n-observation conjugate posterior.
long kl_optimal_m(long n, double z, double sigma, double ybar, double mu0);

// The expected KL objective at one chain length, for the same divergence.
double expected_kl_profile(long n, double z, double sigma, double ybar,
                           double mu0, long m);

}  // namespace opess
