#pragma once

#include <vector>

#include "opess/rng.hpp"

namespace opess {

// Quadrature rule on the open interval (0,1). Nodes are strictly increasing
// and interior; weights are positive and sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Symmetric positive-definite 2x2 matrix stored as its upper triangle.
struct Spd2x2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a12; }
};

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF on (0,1): Acklam's rational approximation
// polished with one Halley step against normal_cdf.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), modified Lentz continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Inverse of I_x(a, b) in x to absolute tolerance 1e-12, Newton iteration
// with a bisection safeguard.
double beta_quantile(double p, double a, double b);

// CDF of the noncentral chi-square with 1 degree of freedom, using the
// identity P(X <= x) = Phi(sqrt(x) - sqrt(lambda)) - Phi(-sqrt(x) - sqrt(lambda)).
double ncx2_cdf_df1(double x, double lambda);

// Survival companion of ncx2_cdf_df1; returns 1 for x <= 0.
double ncx2_sf_df1(double x, double lambda);

// The df=1 noncentral chi-square variate (sqrt(lambda) + z)^2 for a given
// standard normal value z.
double ncx2_value_df1(double lambda, double z);

// One draw of chi^2_1(lambda).
double ncx2_sample_df1(double lambda, RngStream& rng);

// k-point Gauss-Legendre rule mapped to (0,1); exact for polynomials of
// degree <= 2k-1.
QuadratureRule gauss_legendre(int k);

// Composite rule for quantile-function integrands: 4-point Gauss-Legendre
// panels over a symmetric dyadic partition of (0,1) whose panels shrink
// geometrically toward the endpoints, where quantile functions of unbounded
// distributions have integrable singularities. k is the total node count and
// must be a positive multiple of 8.
QuadratureRule quantile_integration_rule(int k = 256);

// Principal square root of an SPD 2x2 matrix through the closed identity
// S = (M + sqrt(det(M)) I) / sqrt(tr(M) + 2 sqrt(det(M))).
Spd2x2 spd_sqrt_2x2(const Spd2x2& m);

namespace detail {

// Building blocks shared by the quantile integrators: the incomplete-beta
// continued fraction and its Newton inversion, both taking the log beta
// function value so batched callers evaluate lgamma once per (a, b).
double ibeta_lentz(double x, double a, double b, double lbeta);
double beta_quantile_newton(double p, double a, double b, double lbeta,
                            double init, double lo, double hi);

}  // namespace detail

}  // namespace opess
