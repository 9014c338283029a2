#include "opess/distances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opess {

namespace {

Matrix2d to_mat(const Spd2x2& s) {
  Matrix2d m;
  m << s.a11, s.a12, s.a12, s.a22;
  return m;
}

}  // namespace

// Nodes ascend, so each solve warm-starts from the previous quantile and
// shares one lgamma evaluation across the whole sweep.
std::vector<double> beta_quantile_values(const BetaDist& dist,
                                         const QuadratureRule& rule) {
  const double a = dist.a;
  const double b = dist.b;
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_quantile_values: a and b must be > 0");
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  std::vector<double> q(rule.nodes.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    q[i] = detail::beta_quantile_newton(rule.nodes[i], a, b, lbeta, prev, prev,
                                        1.0);
    prev = q[i];
  }
  return q;
}

DistanceValue w2sq_gaussian1d(const Gaussian1D& a, const Gaussian1D& b) {
  if (!(a.var >= 0.0) || !(b.var >= 0.0))
    throw std::domain_error("w2sq_gaussian1d: variances must be >= 0");
  const double dm = a.mean - b.mean;
  const double ds = std::sqrt(a.var) - std::sqrt(b.var);
  return {dm * dm + ds * ds, DistanceKind::w2sq};
}

DistanceValue w2sq_gaussian_mv(const Gaussian2D& a, const Gaussian2D& b) {
  const Vector2d dm = a.mean - b.mean;
  const Matrix2d rb = to_mat(spd_sqrt_2x2(b.cov));
  const Matrix2d inner = rb * to_mat(a.cov) * rb;
  Spd2x2 inner_s{inner(0, 0), 0.5 * (inner(0, 1) + inner(1, 0)), inner(1, 1)};
  // Rounding in the triple product can push the off-diagonal past the
  // positive-semidefinite limit; clamp it back.
  const double lim = std::sqrt(inner_s.a11 * inner_s.a22);
  if (std::fabs(inner_s.a12) > lim)
    inner_s.a12 = std::copysign(lim, inner_s.a12);
  const double cross = spd_sqrt_2x2(inner_s).trace();
  const double val =
      dm.squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * cross;
  return {std::max(val, 0.0), DistanceKind::w2sq};
}

DistanceValue w2sq_quantile(const std::function<double(double)>& qf_a,
                            const std::function<double(double)>& qf_b,
                            const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double d = qf_a(rule.nodes[i]) - qf_b(rule.nodes[i]);
    acc += rule.weights[i] * d * d;
  }
  return {acc, DistanceKind::w2sq};
}

double w2sq_from_quantile_values(const std::vector<double>& qa,
                                 const std::vector<double>& qb,
                                 const QuadratureRule& rule) {
  if (qa.size() != rule.nodes.size() || qb.size() != rule.nodes.size())
    throw std::invalid_argument(
        "w2sq_from_quantile_values: value counts must match the rule size");
  double acc = 0.0;
  for (std::size_t i = 0; i < qa.size(); ++i) {
    const double d = qa[i] - qb[i];
    acc += rule.weights[i] * d * d;
  }
  return acc;
}

DistanceValue kl_gaussian_conjugate(long n, long m, double z, double sigma,
                                    double d_mn) {
  if (n < 1 || m < 1)
    throw std::domain_error("kl_gaussian_conjugate: n and m must be >= 1");
  if (!(sigma > 0.0))
    throw std::domain_error("kl_gaussian_conjugate: sigma must be > 0");
  if (!(z >= 0.0))
    throw std::domain_error("kl_gaussian_conjugate: z must be >= 0");
  if (!(d_mn >= 0.0))
    throw std::domain_error("kl_gaussian_conjugate: d_mn must be >= 0");
  const double s2 = sigma * sigma;
  const double val = 0.5 * (m / (n + z) + (m / s2) * d_mn - 1.0 +
                            std::log((n + z) / static_cast<double>(m)));
  return {val, DistanceKind::kl};
}

DistanceValue w2sq_between(const Posterior& a, const Posterior& b,
                           const QuadratureRule& rule) {
  if (a.index() != b.index())
    throw std::domain_error("w2sq_between: posterior families must match");
  if (std::holds_alternative<Gaussian1D>(a))
    return w2sq_gaussian1d(std::get<Gaussian1D>(a), std::get<Gaussian1D>(b));
  if (std::holds_alternative<Gaussian2D>(a))
    return w2sq_gaussian_mv(std::get<Gaussian2D>(a), std::get<Gaussian2D>(b));
  const auto& ba = std::get<BetaDist>(a);
  const auto& bb = std::get<BetaDist>(b);
  const std::vector<double> qa = beta_quantile_values(ba, rule);
  const std::vector<double> qb = beta_quantile_values(bb, rule);
  return {w2sq_from_quantile_values(qa, qb, rule), DistanceKind::w2sq};
}

}  // namespace opess
