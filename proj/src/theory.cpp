#include "opess/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "opess/engine.hpp"
#include "opess/numerics.hpp"

namespace opess {

namespace {

void check_common(long n, double z, double sigma, const char* who) {
  if (n < 1) throw std::domain_error(std::string(who) + ": n must be >= 1");
  if (!(z >= 0.0))
    throw std::domain_error(std::string(who) + ": z must be >= 0");
  if (!(sigma > 0.0))
    throw std::domain_error(std::string(who) + ": sigma must be > 0");
}

}  // namespace

CondDistParams cond_dist_params(long m, long n, double z, double sigma,
                                double ybar, double mu) {
  check_common(n, z, sigma, "cond_dist_params");
  if (m <= n) throw std::domain_error("cond_dist_params: m must be > n");
  const double s2 = sigma * sigma;
  const double nz = n + z;
  const double md = static_cast<double>(m);
  const double r = static_cast<double>(m - n);
  CondDistParams p;
  p.tau_m = (r / (md * md)) * s2;
  const double g = (n / md - n / nz) * (ybar - mu) + (z / nz) * mu;
  p.lambda_m = g * g;
  const double cm = sigma / std::sqrt(md) - sigma / std::sqrt(nz);
  p.c2_m = cm * cm;
  p.kappa_m = r * s2 / ((md + z) * (md + z));
  const double gt = ((r + z) / (md + z)) * (ybar - mu) + (z / (md + z)) * mu;
  p.delta_m = gt * gt;
  const double ct =
      sigma / std::sqrt(md + z) - sigma / std::sqrt(static_cast<double>(n));
  p.c2t_m = ct * ct;
  return p;
}

double cond_distance_sample(const CondDistParams& p, Branch branch,
                            RngStream& rng) {
  if (branch == Branch::primary)
    return p.c2_m + p.tau_m * ncx2_sample_df1(p.lambda_m / p.tau_m, rng);
  return p.c2t_m + p.kappa_m * ncx2_sample_df1(p.delta_m / p.kappa_m, rng);
}

MarginalDistParams marginal_dist_params(long m, long n, double z, double sigma,
                                        double ybar) {
  check_common(n, z, sigma, "marginal_dist_params");
  if (m <= n) throw std::domain_error("marginal_dist_params: m must be > n");
  const double s2 = sigma * sigma;
  const double nz = n + z;
  const double md = static_cast<double>(m);
  const double r = static_cast<double>(m - n);
  MarginalDistParams p;
  p.tau_m = (r * r) / (md * md) * (1.0 / nz + 1.0 / r) * s2;
  const double base = n * (z / nz) * ybar;
  p.lambda = base * base;
  const double wm = md / (md + z);
  p.kappa_m = wm * wm * p.tau_m;
  p.delta = p.lambda / (static_cast<double>(n) * n);
  return p;
}

TruncationBounds truncation_bounds(double t, long n, double z, double sigma) {
  check_common(n, z, sigma, "truncation_bounds");
  if (!(t >= 0.0))
    throw std::domain_error("truncation_bounds: t must be >= 0");
  TruncationBounds out;
  const double s2 = sigma * sigma;
  const double nz = n + z;
  if (t >= s2 / nz) return out;
  const double st = std::sqrt(t);
  {
    const double denom = sigma / std::sqrt(nz) - st;
    const double bound = s2 / (denom * denom);
    long cap = std::max({static_cast<long>(std::ceil(bound)),
                         static_cast<long>(std::ceil(nz)), n + 1});
    const auto c2 = [&](long m) {
      const double d =
          sigma / std::sqrt(static_cast<double>(m)) - sigma / std::sqrt(nz);
      return d * d;
    };
    while (c2(cap + 1) <= t) ++cap;
    out.M = cap;
  }
  {
    const double denom = sigma / std::sqrt(static_cast<double>(n)) - st;
    const double bound = s2 / (denom * denom) - z;
    long cap = std::max(static_cast<long>(std::ceil(bound)), n + 1);
    const auto c2t = [&](long m) {
      const double d =
          sigma / std::sqrt(m + z) - sigma / std::sqrt(static_cast<double>(n));
      return d * d;
    };
    while (c2t(cap + 1) <= t) ++cap;
    out.M_tilde = cap;
  }
  return out;
}

namespace {

// Conditional parameters for one latent mean, extended on demand as the
// survival products reach further chain lengths.
struct CondCache {
  long n = 0;
  double z = 0.0, sigma = 1.0, ybar = 0.0, mu = 0.0;
  std::vector<CondDistParams> params;  // index m - n - 1

  const CondDistParams& at(long m) {
    while (static_cast<long>(params.size()) < m - n) {
      const long next = n + static_cast<long>(params.size()) + 1;
      params.push_back(cond_dist_params(next, n, z, sigma, ybar, mu));
    }
    return params[m - n - 1];
  }
};

constexpr double kProductFloor = 1e-18;

// Product of primary-branch survival probabilities at level t over chain
// lengths in (n, M], skipping skip_m. Two cutoffs keep the loop short when
// M is large: the running product dropping below kProductFloor, and a tail
// rule that stops once the per-factor deficit is too small for the
// remaining factors to matter.
double primary_survival_product(CondCache& cache, double t, long M,
                                long skip_m, double nz) {
  double prod = 1.0;
  const long dip = static_cast<long>(std::ceil(nz));
  for (long m = cache.n + 1; m <= M; ++m) {
    if (m == skip_m) continue;
    const CondDistParams& p = cache.at(m);
    const double x = (t - p.c2_m) / p.tau_m;
    if (x <= 0.0) {
      if (m >= dip && p.c2_m > t) break;
      continue;
    }
    const double s = ncx2_sf_df1(x, p.lambda_m / p.tau_m);
    prod *= s;
    if (prod < kProductFloor) return prod;
    if (m > 4.0 * nz && (1.0 - s) * 16.0 * std::sqrt(nz * m) < 1e-9) break;
  }
  return prod;
}

// Mirror-branch companion. The mirror offset grows with m, so the first
// ineligible length ends the loop.
double mirror_survival_product(CondCache& cache, double t, long M,
                               long skip_m) {
  double prod = 1.0;
  for (long m = cache.n + 1; m <= M; ++m) {
    if (m == skip_m) continue;
    const CondDistParams& p = cache.at(m);
    const double x = (t - p.c2t_m) / p.kappa_m;
    if (x <= 0.0) break;
    prod *= ncx2_sf_df1(x, p.delta_m / p.kappa_m);
    if (prod < kProductFloor) return prod;
  }
  return prod;
}

}  // namespace

double opess_pmf(const PmfQuery& q) {
  check_common(q.n, q.z, q.sigma, "opess_pmf");
  if (q.mu_draws < 1 || q.t_draws < 1)
    throw std::domain_error("opess_pmf: mu_draws and t_draws must be >= 1");

  const double s2 = q.sigma * q.sigma;
  const double nz = q.n + q.z;
  const double mun = (q.n / nz) * q.ybar;
  const double eps = q.ybar - mun;
  const double c_n = q.sigma / std::sqrt(static_cast<double>(q.n)) -
                     q.sigma / std::sqrt(nz);
  const double t0 = eps * eps + c_n * c_n;
  const double lim = s2 / nz;

  RngStream mu_rng{q.seed, 0xC0, static_cast<std::uint64_t>(q.v)};
  RngStream t_rng{q.seed, 0xC1, static_cast<std::uint64_t>(q.v)};

  // A pinned latent mean collapses the outer loop to a single pass.
  const long outer = q.forced_mu ? 1 : q.mu_draws;
  double acc = 0.0;
  long total = 0;

  for (long i = 0; i < outer; ++i) {
    const double mu = q.forced_mu
                          ? *q.forced_mu
                          : mun + std::sqrt(s2 / nz) * mu_rng.normal();
    CondCache cache{q.n, q.z, q.sigma, q.ybar, mu, {}};
    if (q.v == 0) {
      total += 1;
      if (!(t0 < lim)) continue;
      const TruncationBounds tb = truncation_bounds(t0, q.n, q.z, q.sigma);
      const double gp = primary_survival_product(cache, t0, *tb.M, 0, nz);
      const double gm = mirror_survival_product(cache, t0, *tb.M_tilde, 0);
      acc += gp * gm;
      continue;
    }
    const long m0 = q.n + std::labs(q.v);
    const CondDistParams p0 =
        cond_dist_params(m0, q.n, q.z, q.sigma, q.ybar, mu);
    for (long j = 0; j < q.t_draws; ++j) {
      total += 1;
      double t;
      if (q.v > 0) {
        t = p0.c2_m + p0.tau_m * ncx2_sample_df1(p0.lambda_m / p0.tau_m, t_rng);
        if (!(t <= t0) || !(t < lim)) continue;
      } else {
        t = p0.c2t_m +
            p0.kappa_m * ncx2_sample_df1(p0.delta_m / p0.kappa_m, t_rng);
        if (!(t < t0) || !(t < lim)) continue;
      }
      const TruncationBounds tb = truncation_bounds(t, q.n, q.z, q.sigma);
      const long cap = std::min(*tb.M, q.n + 1000000L);
      const double gp =
          primary_survival_product(cache, t, cap, q.v > 0 ? m0 : 0, nz);
      const double gm =
          mirror_survival_product(cache, t, *tb.M_tilde, q.v < 0 ? m0 : 0);
      acc += gp * gm;
    }
  }
  return acc / static_cast<double>(total);
}

Prop1Result prop1_curves(Prop1Mode mode, long n, double z, double sigma,
                         double ybar, double mu0, long L) {
  check_common(n, z, sigma, "prop1_curves");
  if (L <= n) throw std::domain_error("prop1_curves: L must be > n");
  const double nz = n + z;
  const double wn = n / nz;
  const double mun = wn * ybar + (1.0 - wn) * mu0;
  double gamma = 0.0;
  switch (mode) {
    case Prop1Mode::posterior_predictive:
      gamma = mun;
      break;
    case Prop1Mode::bootstrap:
      gamma = ybar;
      break;
    case Prop1Mode::prior:
      gamma = mu0;
      break;
  }
  const long count = L - n;
  Prop1Result res;
  res.W.resize(count + 1);
  res.W_tilde.resize(count + 1);
  for (long k = 0; k <= count; ++k) {
    const double md = static_cast<double>(n + k);
    const double xbar = (n * ybar + k * gamma) / md;
    const double cm = sigma / std::sqrt(md) - sigma / std::sqrt(nz);
    res.W[k] = (xbar - mun) * (xbar - mun) + cm * cm;
    const double wm = md / (md + z);
    const double mum = wm * xbar + (1.0 - wm) * mu0;
    const double ct =
        sigma / std::sqrt(md + z) - sigma / std::sqrt(static_cast<double>(n));
    res.W_tilde[k] = (ybar - mum) * (ybar - mum) + ct * ct;
  }
  const SignMn s = sign_and_mn(res.W, res.W_tilde, n);
  res.m_n = s.m_n;
  res.sign = s.sign;
  return res;
}

SmallMopessProbs small_mopess_probs(long r, long n, double z, double sigma,
                                    double epsilon, long mc, RngStream& rng) {
  check_common(n, z, sigma, "small_mopess_probs");
  if (r < 1) throw std::domain_error("small_mopess_probs: r must be >= 1");
  if (mc < 1) throw std::domain_error("small_mopess_probs: mc must be >= 1");
  const long m = n + r;
  const double s2 = sigma * sigma;
  const double nz = n + z;
  const double md = static_cast<double>(m);
  const double rd = static_cast<double>(r);
  const double c_n =
      sigma / std::sqrt(static_cast<double>(n)) - sigma / std::sqrt(nz);
  const double c2_n = c_n * c_n;
  const double cm = sigma / std::sqrt(md) - sigma / std::sqrt(nz);
  const double ct =
      sigma / std::sqrt(md + z) - sigma / std::sqrt(static_cast<double>(n));
  const double tau = (rd * rd) / (md * md) * (1.0 / nz + 1.0 / rd) * s2;
  const double wm = md / (md + z);
  const double kappa = wm * wm * tau;

  SmallMopessProbs out;
  const double rhs_p = epsilon * epsilon + c2_n - cm * cm;
  if (rhs_p > 0.0) {
    const double mean_g = (n / md) * epsilon;
    const double ncp = mean_g * mean_g / tau;
    const double bound = rhs_p / tau;
    long hit = 0;
    for (long i = 0; i < mc; ++i)
      if (ncx2_sample_df1(ncp, rng) < bound) ++hit;
    out.p = static_cast<double>(hit) / mc;
  }
  const double rhs_m = epsilon * epsilon + c2_n - ct * ct;
  if (rhs_m > 0.0) {
    const double ncp = epsilon * epsilon / kappa;
    const double bound = rhs_m / kappa;
    long hit = 0;
    for (long i = 0; i < mc; ++i)
      if (ncx2_sample_df1(ncp, rng) < bound) ++hit;
    out.p_tilde = static_cast<double>(hit) / mc;
  }
  return out;
}

double p_tilde_threshold(long n, double z, double sigma) {
  check_common(n, z, sigma, "p_tilde_threshold");
  const double nz = n + z;
  const double c_n =
      sigma / std::sqrt(static_cast<double>(n)) - sigma / std::sqrt(nz);
  const double ct =
      sigma / std::sqrt(n + 1 + z) - sigma / std::sqrt(static_cast<double>(n));
  return ct * ct - c_n * c_n;
}

long kl_optimal_m(long n, double z, double sigma, double ybar, double mu0) {
  check_common(n, z, sigma, "kl_optimal_m");
  const double s2 = sigma * sigma;
  const double nz = n + z;
  const double dev = ybar - mu0;
  const double a = 1.0 / nz + (z * z * dev * dev) / (nz * nz * s2);
  long lo = static_cast<long>(std::floor(1.0 / a));
  if (lo < 1) lo = 1;
  const long hi = lo + 1;
  // The objective is strictly convex, so the integer argmin is whichever
  // neighbor of the continuous minimizer scores lower.
  const auto f = [&](long m) {
    return a * m - std::log(static_cast<double>(m));
  };
  return f(lo) <= f(hi) ? lo : hi;
}

double expected_kl_profile(long n, double z, double sigma, double ybar,
                           double mu0, long m) {
  check_common(n, z, sigma, "expected_kl_profile");
  if (m < 1) throw std::domain_error("expected_kl_profile: m must be >= 1");
  const double s2 = sigma * sigma;
  const double nz = n + z;
  const double dev = ybar - mu0;
  const double a = 1.0 / nz + (z * z * dev * dev) / (nz * nz * s2);
  return 0.5 * (a * m - std::log(static_cast<double>(m)) + std::log(nz));
}

}  // namespace opess
