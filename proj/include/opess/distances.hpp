#pragma once

#include <functional>
#include <vector>

#include "opess/models.hpp"
#include "opess/numerics.hpp"

namespace opess {

enum class DistanceKind { w2sq, kl };

// Nonnegative discrepancy between two posteriors. All 2-Wasserstein values
// in this library are on the squared scale; ordering, argmins and the sign
// rule are unchanged by the monotone square root.
struct DistanceValue {
  double value = 0.0;
  DistanceKind kind = DistanceKind::w2sq;
};

// Squared W2 between univariate Gaussians:
// (mean_a - mean_b)^2 + (sd_a - sd_b)^2.
DistanceValue w2sq_gaussian1d(const Gaussian1D& a, const Gaussian1D& b);

// Squared W2 between bivariate Gaussians:
// |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sb^1/2 Sa Sb^1/2)^1/2).
DistanceValue w2sq_gaussian_mv(const Gaussian2D& a, const Gaussian2D& b);

// Squared W2 of two univariate laws given their quantile functions,
// integrated over (0,1) with the supplied rule.
DistanceValue w2sq_quantile(const std::function<double(double)>& qf_a,
                            const std::function<double(double)>& qf_b,
                            const QuadratureRule& rule);

// Same integral when both quantile functions are already evaluated on the
// rule's nodes.
double w2sq_from_quantile_values(const std::vector<double>& qa,
                                 const std::vector<double>& qb,
                                 const QuadratureRule& rule);

// Quantile values of a Beta law on every node of the rule, for callers that
// integrate one distribution against many others.
std::vector<double> beta_quantile_values(const BetaDist& dist,
                                         const QuadratureRule& rule);

// KL divergence from the m-observation flat-prior Gaussian posterior to the
// n-observation conjugate posterior, where d_mn is the squared gap of their
// means: (1/2) { m/(n+z) + (m/sigma^2) d_mn - 1 + log((n+z)/m) }.
DistanceValue kl_gaussian_conjugate(long n, long m, double z, double sigma,
                                    double d_mn);

// Squared W2 between two posteriors of the same family. Beta pairs integrate
// quantile functions with the supplied rule; both Gaussian families use
// their closed forms.
DistanceValue w2sq_between(const Posterior& a, const Posterior& b,
                           const QuadratureRule& rule);

}  // namespace opess
