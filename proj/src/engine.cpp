#include "opess/engine.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace opess {

namespace {

const QuadratureRule& engine_beta_rule() {
  static const QuadratureRule rule = quantile_integration_rule(64);
  return rule;
}

// Distances for the Beta family depend on a chain only through its length
// and success count, so each (length, successes) pair is computed once per
// run and shared across realizations and threads.
struct BetaMemo {
  std::mutex mu;
  std::map<std::pair<long, long>, double> primary;
  std::map<std::pair<long, long>, double> mirror;
};

struct CurveContext {
  const OpessProblem* problem = nullptr;
  Posterior informative_y;
  Posterior baseline_y;
  std::vector<double> informative_q;
  std::vector<double> baseline_q;
  double w_at_n = 0.0;
  BetaMemo* memo = nullptr;
};

double memo_lookup(BetaMemo* memo, bool primary_branch, long len, long succ,
                   const std::function<double()>& compute) {
  if (memo == nullptr) return compute();
  const std::pair<long, long> key{len, succ};
  auto& table = primary_branch ? memo->primary : memo->mirror;
  {
    std::lock_guard<std::mutex> lock(memo->mu);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
  }
  const double value = compute();
  std::lock_guard<std::mutex> lock(memo->mu);
  return table.emplace(key, value).first->second;
}

double primary_distance(const CurveContext& ctx, const ChainStats& st) {
  const OpessProblem& p = *ctx.problem;
  if (family_of(p.spec) == Family::bernoulli) {
    auto compute = [&] {
      const Posterior expanded = expanded_posterior(p.spec, p.data, st, true);
      const std::vector<double> q =
          beta_quantile_values(std::get<BetaDist>(expanded), engine_beta_rule());
      return w2sq_from_quantile_values(q, ctx.informative_q,
                                       engine_beta_rule());
    };
    return memo_lookup(ctx.memo, true, st.len, std::llround(st.s1), compute);
  }
  const Posterior expanded = expanded_posterior(p.spec, p.data, st, true);
  return w2sq_between(expanded, ctx.informative_y, engine_beta_rule()).value;
}

double mirror_distance(const CurveContext& ctx, const ChainStats& st) {
  const OpessProblem& p = *ctx.problem;
  if (family_of(p.spec) == Family::bernoulli) {
    auto compute = [&] {
      const Posterior expanded = expanded_posterior(p.spec, p.data, st, false);
      const std::vector<double> q =
          beta_quantile_values(std::get<BetaDist>(expanded), engine_beta_rule());
      return w2sq_from_quantile_values(ctx.baseline_q, q, engine_beta_rule());
    };
    return memo_lookup(ctx.memo, false, st.len, std::llround(st.s1), compute);
  }
  const Posterior expanded = expanded_posterior(p.spec, p.data, st, false);
  return w2sq_between(ctx.baseline_y, expanded, engine_beta_rule()).value;
}

CurveContext make_context(const OpessProblem& problem, BetaMemo* memo) {
  CurveContext ctx;
  ctx.problem = &problem;
  const ChainStats empty;
  ctx.informative_y =
      expanded_posterior(problem.spec, problem.data, empty, false);
  ctx.baseline_y = expanded_posterior(problem.spec, problem.data, empty, true);
  if (family_of(problem.spec) == Family::bernoulli) {
    ctx.informative_q = beta_quantile_values(
        std::get<BetaDist>(ctx.informative_y), engine_beta_rule());
    ctx.baseline_q = beta_quantile_values(std::get<BetaDist>(ctx.baseline_y),
                                          engine_beta_rule());
    ctx.w_at_n = w2sq_from_quantile_values(ctx.baseline_q, ctx.informative_q,
                                           engine_beta_rule());
  } else {
    ctx.w_at_n =
        w2sq_between(ctx.baseline_y, ctx.informative_y, engine_beta_rule())
            .value;
  }
  ctx.memo = memo;
  return ctx;
}

std::pair<std::vector<double>, std::vector<double>> curves_from_chains(
    const CurveContext& ctx, const FutureChains& chains) {
  const long count = chains.chain_count();
  std::vector<double> w(count + 1), wt(count + 1);
  w[0] = ctx.w_at_n;
  wt[0] = ctx.w_at_n;
  for (long c = 0; c < count; ++c) {
    w[c + 1] = primary_distance(ctx, chains.primary_stats[c]);
    wt[c + 1] = mirror_distance(ctx, chains.mirror_stats[c]);
  }
  return {std::move(w), std::move(wt)};
}

void validate_problem(const OpessProblem& p, long L) {
  if (p.n() < 1) throw std::domain_error("mopess: dataset must be nonempty");
  if (L <= p.n()) throw std::domain_error("mopess: L must be > n");
  if (p.S < 1) throw std::domain_error("mopess: S must be >= 1");
  if (p.forced_chain_value &&
      family_of(p.spec) != Family::gaussian)
    throw std::domain_error(
        "mopess: forced_chain_value requires the gaussian family");
  if (p.forced_theta) {
    const bool scalar = std::holds_alternative<double>(*p.forced_theta);
    const bool need_scalar = family_of(p.spec) != Family::regression;
    if (scalar != need_scalar)
      throw std::domain_error(
          "mopess: forced_theta shape does not match the model family");
  }
}

OpessRealization realize(const CurveContext& ctx, long index) {
  const OpessProblem& p = *ctx.problem;
  ParamValue theta;
  if (p.forced_theta) {
    theta = *p.forced_theta;
  } else {
    RngStream theta_rng{p.seed, static_cast<std::uint64_t>(index), 1};
    theta = sample_theta(ctx.informative_y, theta_rng);
  }
  RngStream chain_rng{p.seed, static_cast<std::uint64_t>(index), 2};
  FutureChains chains;
  if (p.forced_chain_value) {
    ModelSpec constant_spec = p.spec;
    std::get<GaussianModelSpec>(constant_spec).sigma2 = 0.0;
    chains = generate_future_chains(constant_spec, *p.forced_chain_value,
                                    p.n(), p.L, chain_rng);
  } else {
    chains = generate_future_chains(p.spec, theta, p.n(), p.L, chain_rng);
  }
  const auto [w, wt] = curves_from_chains(ctx, chains);
  const SignMn s = sign_and_mn(w, wt, p.n());
  return {s.m_n, s.sign, s.argmin_m,
          DistanceValue{s.min_distance, DistanceKind::w2sq}};
}

OpessProblem with_resolved_cap(const OpessProblem& problem) {
  OpessProblem p = problem;
  if (p.L == 0) p.L = default_chain_cap(p.spec, p.n());
  return p;
}

}  // namespace

long default_chain_cap(const ModelSpec& spec, long n) {
  const double z = nominal_pseudo_obs(spec);
  const long zceil = static_cast<long>(std::ceil(z));
  return n + std::max(10 * zceil, 50L);
}

std::pair<std::vector<double>, std::vector<double>> distance_curves(
    const OpessProblem& problem, const FutureChains& chains) {
  const OpessProblem p = with_resolved_cap(problem);
  const CurveContext ctx = make_context(p, nullptr);
  return curves_from_chains(ctx, chains);
}

SignMn sign_and_mn(const std::vector<double>& w,
                   const std::vector<double>& w_tilde, long n) {
  if (w.empty() || w.size() != w_tilde.size())
    throw std::invalid_argument(
        "sign_and_mn: curves must be nonempty and equal length");
  std::size_t ai = 0, bi = 0;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] < w[ai]) ai = i;
  for (std::size_t i = 1; i < w_tilde.size(); ++i)
    if (w_tilde[i] < w_tilde[bi]) bi = i;
  SignMn r;
  if (w[ai] <= w_tilde[bi]) {
    r.sign = 1;
    r.m_n = static_cast<long>(ai);
    r.argmin_m = n + static_cast<long>(ai);
    r.min_distance = w[ai];
  } else {
    r.sign = -1;
    r.m_n = -static_cast<long>(bi);
    r.argmin_m = n + static_cast<long>(bi);
    r.min_distance = w_tilde[bi];
  }
  return r;
}

OpessRealization opess_realization(const OpessProblem& problem, long index) {
  const OpessProblem p = with_resolved_cap(problem);
  validate_problem(p, p.L);
  BetaMemo memo;
  const CurveContext ctx = make_context(
      p, family_of(p.spec) == Family::bernoulli ? &memo : nullptr);
  return realize(ctx, index);
}

OpessResult mopess(const OpessProblem& problem, int workers) {
  const OpessProblem p = with_resolved_cap(problem);
  validate_problem(p, p.L);
  if (workers < 1) throw std::domain_error("mopess: workers must be >= 1");

  BetaMemo memo;
  const CurveContext ctx = make_context(
      p, family_of(p.spec) == Family::bernoulli ? &memo : nullptr);

  std::vector<OpessRealization> slots(p.S);
  std::atomic<long> next{0};
  auto drain = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= p.S) break;
      slots[i] = realize(ctx, i);
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }

  OpessResult res;
  res.seed = p.seed;
  res.S = p.S;
  res.L = p.L;
  res.n = p.n();

  const long span = p.L - p.n();
  long boundary = 0;
  double dist_sum = 0.0;
  for (const auto& r : slots) {
    res.counts[r.m_n] += 1;
    dist_sum += r.min_distance.value;
    if (std::labs(r.m_n) == span) ++boundary;
  }
  res.mean_min_distance = dist_sum / p.S;
  res.boundary_fraction = static_cast<double>(boundary) / p.S;
  res.boundary_warning = res.boundary_fraction > 0.01;

  double mean = 0.0;
  for (const auto& [v, c] : res.counts) {
    const double f = static_cast<double>(c) / p.S;
    res.pmf[v] = f;
    mean += v * f;
  }
  res.mopess = mean;

  // Order statistic at index ceil(q S) of the sorted realizations, read off
  // the count table. The tiny nudge keeps exactly-integer products from
  // landing one rank high through rounding.
  auto order_stat = [&](double q) {
    long target = static_cast<long>(std::ceil(q * p.S - 1e-9));
    if (target < 1) target = 1;
    long cum = 0;
    for (const auto& [v, c] : res.counts) {
      cum += c;
      if (cum >= target) return static_cast<double>(v);
    }
    return static_cast<double>(res.counts.rbegin()->first);
  };
  res.quantiles[0.05] = order_stat(0.05);
  res.quantiles[0.5] = order_stat(0.5);
  res.quantiles[0.95] = order_stat(0.95);
  return res;
}

}  // namespace opess
