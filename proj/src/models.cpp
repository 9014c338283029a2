#include "opess/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace opess {

double RegressionModelSpec::pseudo_obs() const {
  if (flat()) return 0.0;
  return std::max(sigma2 / *tau1_sq, sigma2 / *tau2_sq);
}

Family family_of(const ModelSpec& spec) {
  if (std::holds_alternative<GaussianModelSpec>(spec)) return Family::gaussian;
  if (std::holds_alternative<BetaBernoulliModelSpec>(spec))
    return Family::bernoulli;
  return Family::regression;
}

double nominal_pseudo_obs(const ModelSpec& spec) {
  return std::visit([](const auto& s) { return s.pseudo_obs(); }, spec);
}

ScalarData ScalarData::from_values(std::vector<double> v) {
  ScalarData d;
  d.values = std::move(v);
  for (double x : d.values) d.sum += x;
  return d;
}

RegressionData RegressionData::from_pairs(
    std::vector<std::pair<double, double>> p) {
  RegressionData d;
  d.xy = std::move(p);
  for (const auto& [x, y] : d.xy) {
    d.sx += x;
    d.sxx += x * x;
    d.sy += y;
    d.sxy += x * y;
  }
  return d;
}

long dataset_size(const Dataset& data) {
  return std::visit([](const auto& d) { return d.n(); }, data);
}

Posterior posterior_gaussian(const GaussianModelSpec& spec, long n,
                             double ybar) {
  if (n < 1) throw std::domain_error("posterior_gaussian: n must be >= 1");
  if (!(spec.sigma2 >= 0.0))
    throw std::domain_error("posterior_gaussian: sigma2 must be >= 0");
  if (spec.flat()) return Gaussian1D{ybar, spec.sigma2 / n};
  if (!(*spec.prior_var > 0.0))
    throw std::domain_error("posterior_gaussian: prior_var must be > 0");
  const double z = spec.pseudo_obs();
  const double w = n / (n + z);
  return Gaussian1D{w * ybar + (1.0 - w) * spec.mu0, spec.sigma2 / (n + z)};
}

Posterior posterior_beta(const BetaBernoulliModelSpec& spec, long successes,
                         long n, bool use_baseline) {
  if (n < 0 || successes < 0 || successes > n)
    throw std::domain_error("posterior_beta: successes must be in [0, n]");
  const double a0 = use_baseline ? 1.0 : spec.alpha;
  const double b0 = use_baseline ? 1.0 : spec.beta;
  if (!(a0 > 0.0) || !(b0 > 0.0))
    throw std::domain_error("posterior_beta: alpha and beta must be > 0");
  return BetaDist{a0 + successes, b0 + (n - successes)};
}

Posterior posterior_regression_sums(const RegressionModelSpec& spec, long n,
                                    double sx, double sxx, double sy,
                                    double sxy, bool use_baseline) {
  if (n < 1)
    throw std::domain_error("posterior_regression: n must be >= 1");
  if (!(spec.sigma2 > 0.0))
    throw std::domain_error("posterior_regression: sigma2 must be > 0");
  Matrix2d xtx;
  xtx << static_cast<double>(n), sx, sx, sxx;
  Vector2d xty(sy, sxy);
  if (use_baseline || spec.flat()) {
    if (!(xtx.determinant() > 0.0))
      throw std::domain_error(
          "posterior_regression: design matrix is singular");
    const Matrix2d xtx_inv = xtx.inverse();
    const Vector2d mean = xtx_inv * xty;
    const Matrix2d cov = spec.sigma2 * xtx_inv;
    return Gaussian2D{mean, Spd2x2{cov(0, 0), cov(0, 1), cov(1, 1)}};
  }
  if (!(*spec.tau1_sq > 0.0) || !(*spec.tau2_sq > 0.0))
    throw std::domain_error(
        "posterior_regression: tau1_sq and tau2_sq must be > 0");
  Matrix2d prec = xtx / spec.sigma2;
  prec(0, 0) += 1.0 / *spec.tau1_sq;
  prec(1, 1) += 1.0 / *spec.tau2_sq;
  Vector2d rhs = xty / spec.sigma2;
  rhs(0) += spec.eta0(0) / *spec.tau1_sq;
  rhs(1) += spec.eta0(1) / *spec.tau2_sq;
  const Matrix2d cov = prec.inverse();
  const Vector2d mean = cov * rhs;
  return Gaussian2D{mean, Spd2x2{cov(0, 0), cov(0, 1), cov(1, 1)}};
}

Posterior posterior_regression(const RegressionModelSpec& spec,
                               const RegressionData& data, bool use_baseline) {
  return posterior_regression_sums(spec, data.n(), data.sx, data.sxx, data.sy,
                                   data.sxy, use_baseline);
}

ParamValue sample_theta(const Posterior& post, RngStream& rng) {
  if (std::holds_alternative<Gaussian1D>(post)) {
    const auto& g = std::get<Gaussian1D>(post);
    return g.mean + std::sqrt(g.var) * rng.normal();
  }
  if (std::holds_alternative<BetaDist>(post)) {
    const auto& b = std::get<BetaDist>(post);
    return rng.beta(b.a, b.b);
  }
  const auto& g = std::get<Gaussian2D>(post);
  const double l11 = std::sqrt(g.cov.a11);
  const double l21 = g.cov.a12 / l11;
  const double l22 = std::sqrt(g.cov.a22 - l21 * l21);
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return Vector2d(g.mean(0) + l11 * z1, g.mean(1) + l21 * z1 + l22 * z2);
}

FutureChains generate_future_chains(const ModelSpec& spec,
                                    const ParamValue& theta_star, long n,
                                    long L, RngStream& rng) {
  if (L <= n)
    throw std::domain_error("generate_future_chains: L must be > n");
  FutureChains fc;
  fc.n = n;
  fc.L = L;
  fc.theta_star = theta_star;
  const long count = L - n;
  const Family fam = family_of(spec);
  if (fam == Family::regression) {
    fc.primary_xy.resize(count);
    fc.mirror_xy.resize(count);
  } else {
    fc.primary.resize(count);
    fc.mirror.resize(count);
  }
  fc.primary_stats.resize(count);
  fc.mirror_stats.resize(count);
  for (long c = 0; c < count; ++c) {
    const long len = c + 1;
    const std::uint64_t key = rng.next_u64();
    for (std::uint64_t tag = 1; tag <= 2; ++tag) {
      RngStream child{key, tag};
      ChainStats st;
      st.len = len;
      if (fam == Family::regression) {
        const auto& rspec = std::get<RegressionModelSpec>(spec);
        const Vector2d beta = std::get<Vector2d>(theta_star);
        const double sd = std::sqrt(rspec.sigma2);
        PairChain chain(len);
        for (long j = 0; j < len; ++j) {
          const double x = child.normal();
          const double y = beta(0) + beta(1) * x + sd * child.normal();
          chain[j] = {x, y};
          st.s1 += x;
          st.s2 += x * x;
          st.sy += y;
          st.sxy += x * y;
        }
        (tag == 1 ? fc.primary_xy : fc.mirror_xy)[c] = std::move(chain);
      } else {
        ScalarChain chain(len);
        const double theta = std::get<double>(theta_star);
        if (fam == Family::gaussian) {
          const double sd = std::sqrt(std::get<GaussianModelSpec>(spec).sigma2);
          for (long j = 0; j < len; ++j) {
            chain[j] = theta + sd * child.normal();
            st.s1 += chain[j];
          }
        } else {
          for (long j = 0; j < len; ++j) {
            chain[j] = child.bernoulli(theta);
            st.s1 += chain[j];
          }
        }
        (tag == 1 ? fc.primary : fc.mirror)[c] = std::move(chain);
      }
      (tag == 1 ? fc.primary_stats : fc.mirror_stats)[c] = st;
    }
  }
  return fc;
}

ChainStats stats_of_chain(const ScalarChain& chain) {
  ChainStats st;
  st.len = static_cast<long>(chain.size());
  for (double v : chain) st.s1 += v;
  return st;
}

ChainStats stats_of_chain(const PairChain& chain) {
  ChainStats st;
  st.len = static_cast<long>(chain.size());
  for (const auto& [x, y] : chain) {
    st.s1 += x;
    st.s2 += x * x;
    st.sy += y;
    st.sxy += x * y;
  }
  return st;
}

Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const ChainStats& chain, bool use_baseline) {
  const Family fam = family_of(spec);
  if (fam == Family::gaussian) {
    const auto& g = std::get<GaussianModelSpec>(spec);
    const auto& d = std::get<ScalarData>(data);
    const long m = d.n() + chain.len;
    const double mean = (d.sum + chain.s1) / m;
    return posterior_gaussian(use_baseline ? g.baseline() : g, m, mean);
  }
  if (fam == Family::bernoulli) {
    const auto& b = std::get<BetaBernoulliModelSpec>(spec);
    const auto& d = std::get<ScalarData>(data);
    const long m = d.n() + chain.len;
    const long succ = d.successes() + std::llround(chain.s1);
    return posterior_beta(b, succ, m, use_baseline);
  }
  const auto& r = std::get<RegressionModelSpec>(spec);
  const auto& d = std::get<RegressionData>(data);
  return posterior_regression_sums(r, d.n() + chain.len, d.sx + chain.s1,
                                   d.sxx + chain.s2, d.sy + chain.sy,
                                   d.sxy + chain.sxy, use_baseline);
}

Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const ScalarChain& chain, bool use_baseline) {
  return expanded_posterior(spec, data, stats_of_chain(chain), use_baseline);
}

Posterior expanded_posterior(const ModelSpec& spec, const Dataset& data,
                             const PairChain& chain, bool use_baseline) {
  return expanded_posterior(spec, data, stats_of_chain(chain), use_baseline);
}

}  // namespace opess
