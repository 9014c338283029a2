#include "opess/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "opess/theory.hpp"

namespace opess {

namespace {

// Stream tags so dataset generation and engine seeding never overlap.
constexpr std::uint64_t kDataTag = 0xA;
constexpr std::uint64_t kEngineTag = 0xB;

long pick(const std::optional<long>& override_value, long desk, long paper,
          Scale scale) {
  if (override_value) return *override_value;
  return scale == Scale::paper ? paper : desk;
}

ModelSpec study_model(const StudyConfig& cfg) {
  switch (cfg.study_id) {
    case StudyId::gaussian_location:
    case StudyId::gaussian_conditional: {
      GaussianModelSpec g;
      g.sigma2 = cfg.sigma2.value_or(1.0);
      g.mu0 = cfg.mu0.value_or(0.0);
      g.prior_var = cfg.prior_var.value_or(0.1);
      return g;
    }
    case StudyId::small_mopess: {
      GaussianModelSpec g;
      g.sigma2 = cfg.sigma2.value_or(1.0);
      g.mu0 = cfg.mu0.value_or(0.0);
      g.prior_var = cfg.prior_var.value_or(0.25);
      return g;
    }
    case StudyId::beta_resample: {
      BetaBernoulliModelSpec b;
      b.alpha = cfg.alpha.value_or(5.0);
      b.beta = cfg.beta.value_or(5.0);
      return b;
    }
    case StudyId::regression: {
      RegressionModelSpec r;
      r.sigma2 = cfg.sigma2.value_or(1.0);
      r.eta0 = Vector2d::Zero();
      r.tau1_sq = cfg.tau_sq.value_or(0.1);
      r.tau2_sq = cfg.tau_sq.value_or(0.1);
      return r;
    }
  }
  throw std::domain_error("unknown study id");
}

void fill_row(StudyRow& row, const OpessResult& res) {
  row.mopess = res.mopess;
  row.q05 = res.quantiles.at(0.05);
  row.q50 = res.quantiles.at(0.5);
  row.q95 = res.quantiles.at(0.95);
  row.mean_min_distance = res.mean_min_distance;
  row.boundary_fraction = res.boundary_fraction;
}

void sort_rows(std::vector<StudyRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const StudyRow& a, const StudyRow& b) {
              if (a.xstat != b.xstat) return a.xstat < b.xstat;
              return a.dataset_id < b.dataset_id;
            });
}

std::uint64_t engine_seed(std::uint64_t seed, long dataset) {
  RngStream s{seed, kEngineTag, static_cast<std::uint64_t>(dataset)};
  return s.next_u64();
}

double negative_share(const OpessResult& res) {
  long neg = 0;
  for (const auto& [v, c] : res.counts) {
    if (v < 0) neg += c;
  }
  return static_cast<double>(neg) / static_cast<double>(res.S);
}

}  // namespace

StudyId parse_study_id(const std::string& name) {
  if (name == "gaussian_location") return StudyId::gaussian_location;
  if (name == "gaussian_conditional") return StudyId::gaussian_conditional;
  if (name == "beta_resample") return StudyId::beta_resample;
  if (name == "regression") return StudyId::regression;
  if (name == "small_mopess") return StudyId::small_mopess;
  throw std::domain_error("unknown study id: " + name);
}

std::string study_id_name(StudyId id) {
  switch (id) {
    case StudyId::gaussian_location:
      return "gaussian_location";
    case StudyId::gaussian_conditional:
      return "gaussian_conditional";
    case StudyId::beta_resample:
      return "beta_resample";
    case StudyId::regression:
      return "regression";
    case StudyId::small_mopess:
      return "small_mopess";
  }
  throw std::domain_error("unknown study id");
}

StudyDims study_dims(const StudyConfig& cfg) {
  StudyDims d;
  d.n = cfg.n.value_or(20);
  switch (cfg.study_id) {
    case StudyId::gaussian_location:
      d.n_datasets = pick(cfg.n_datasets, 50, 300, cfg.scale);
      d.S = pick(cfg.S, 2000, 10000, cfg.scale);
      break;
    case StudyId::gaussian_conditional:
      d.n_datasets = 1;
      d.S = cfg.S.value_or(10000);
      break;
    case StudyId::beta_resample:
      d.n_datasets = pick(cfg.n_datasets, 100, 1000, cfg.scale);
      d.S = pick(cfg.S, 2000, 10000, cfg.scale);
      break;
    case StudyId::regression:
      d.n_datasets = pick(cfg.n_datasets, 100, 1000, cfg.scale);
      d.S = pick(cfg.S, 1000, 10000, cfg.scale);
      break;
    case StudyId::small_mopess:
      d.n_datasets = pick(cfg.n_datasets, 50, 300, cfg.scale);
      d.S = pick(cfg.S, 2000, 10000, cfg.scale);
      break;
  }
  d.L = cfg.L ? *cfg.L : default_chain_cap(study_model(cfg), d.n);
  return d;
}

std::vector<StudyRow> run_gaussian_study(const StudyConfig& cfg) {
  StudyConfig local = cfg;
  local.study_id = StudyId::gaussian_location;
  const StudyDims dims = study_dims(local);
  const ModelSpec spec = study_model(local);
  const auto& g = std::get<GaussianModelSpec>(spec);
  const double sd = std::sqrt(g.sigma2);

  std::vector<StudyRow> rows;
  rows.reserve(static_cast<std::size_t>(dims.n_datasets));
  for (long d = 0; d < dims.n_datasets; ++d) {
    RngStream data_rng{local.seed, kDataTag, static_cast<std::uint64_t>(d)};
    std::vector<double> values(static_cast<std::size_t>(dims.n));
    for (double& v : values) v = g.mu0 + sd * data_rng.normal();

    OpessProblem prob;
    prob.spec = spec;
    prob.data = ScalarData::from_values(std::move(values));
    prob.L = dims.L;
    prob.S = dims.S;
    prob.seed = engine_seed(local.seed, d);
    const OpessResult res = mopess(prob, local.workers);

    StudyRow row;
    row.dataset_id = d;
    row.xstat = std::get<ScalarData>(prob.data).ybar();
    fill_row(row, res);
    rows.push_back(row);
  }
  sort_rows(rows);
  return rows;
}

ConditionalStudyResult run_conditional_study(const StudyConfig& cfg,
                                             double ybar, double mu) {
  StudyConfig local = cfg;
  local.study_id = StudyId::gaussian_conditional;
  const StudyDims dims = study_dims(local);
  const ModelSpec spec = study_model(local);
  const auto& g = std::get<GaussianModelSpec>(spec);

  OpessProblem prob;
  prob.spec = spec;
  prob.data = ScalarData::from_values(
      std::vector<double>(static_cast<std::size_t>(dims.n), ybar));
  prob.L = dims.L;
  prob.S = dims.S;
  prob.seed = engine_seed(local.seed, 0);
  prob.forced_theta = mu;
  const OpessResult res = mopess(prob, local.workers);

  const long span = dims.L - dims.n;
  ConditionalStudyResult out;
  out.empirical_mean = res.mopess;
  double theory_mean = 0.0;
  double l1 = 0.0;
  for (long v = -span; v <= span; ++v) {
    PmfQuery q;
    q.v = v;
    q.ybar = ybar - g.mu0;
    q.n = dims.n;
    q.z = g.pseudo_obs();
    q.sigma = std::sqrt(g.sigma2);
    q.t_draws = dims.S;
    q.forced_mu = mu - g.mu0;
    q.seed = local.seed;
    const double theory = opess_pmf(q);

    HistRow hr;
    hr.m_n = v;
    const auto it = res.counts.find(v);
    hr.count = it == res.counts.end() ? 0 : it->second;
    hr.frequency = static_cast<double>(hr.count) / static_cast<double>(dims.S);
    hr.theory_pmf = theory;
    out.rows.push_back(hr);

    theory_mean += static_cast<double>(v) * theory;
    l1 += std::fabs(hr.frequency - theory);
  }
  out.theory_mean = theory_mean;
  out.tv = 0.5 * l1;
  return out;
}

std::vector<StudyRow> run_beta_study(const StudyConfig& cfg) {
  StudyConfig local = cfg;
  local.study_id = StudyId::beta_resample;
  const StudyDims dims = study_dims(local);
  const ModelSpec spec = study_model(local);

  // Binary population behind the resamples: 437 ones among 980 subjects.
  constexpr std::uint64_t kPopulation = 980;
  constexpr std::uint64_t kOnes = 437;

  std::vector<StudyRow> rows;
  rows.reserve(static_cast<std::size_t>(dims.n_datasets));
  for (long d = 0; d < dims.n_datasets; ++d) {
    RngStream data_rng{local.seed, kDataTag, static_cast<std::uint64_t>(d)};
    std::vector<double> values(static_cast<std::size_t>(dims.n));
    for (double& v : values) {
      v = data_rng.below(kPopulation) < kOnes ? 1.0 : 0.0;
    }

    OpessProblem prob;
    prob.spec = spec;
    prob.data = ScalarData::from_values(std::move(values));
    prob.L = dims.L;
    prob.S = dims.S;
    prob.seed = engine_seed(local.seed, d);
    const OpessResult res = mopess(prob, local.workers);

    StudyRow row;
    row.dataset_id = d;
    row.xstat = std::get<ScalarData>(prob.data).ybar();
    fill_row(row, res);
    rows.push_back(row);
  }
  sort_rows(rows);
  return rows;
}

std::vector<StudyRow> run_regression_study(const StudyConfig& cfg) {
  StudyConfig local = cfg;
  local.study_id = StudyId::regression;
  const StudyDims dims = study_dims(local);
  const ModelSpec spec = study_model(local);
  const auto& r = std::get<RegressionModelSpec>(spec);
  const double sd = std::sqrt(r.sigma2);

  std::vector<StudyRow> rows;
  rows.reserve(static_cast<std::size_t>(dims.n_datasets));
  for (long d = 0; d < dims.n_datasets; ++d) {
    RngStream data_rng{local.seed, kDataTag, static_cast<std::uint64_t>(d)};
    std::vector<std::pair<double, double>> xy(static_cast<std::size_t>(dims.n));
    for (auto& p : xy) {
      const double x = data_rng.normal();
      const double y = r.eta0(0) + r.eta0(1) * x + sd * data_rng.normal();
      p = {x, y};
    }
    RegressionData data = RegressionData::from_pairs(std::move(xy));
    const auto fit = std::get<Gaussian2D>(posterior_regression(r, data, true));
    const Vector2d dev = fit.mean - r.eta0;

    OpessProblem prob;
    prob.spec = spec;
    prob.data = std::move(data);
    prob.L = dims.L;
    prob.S = dims.S;
    prob.seed = engine_seed(local.seed, d);
    const OpessResult res = mopess(prob, local.workers);

    StudyRow row;
    row.dataset_id = d;
    row.xstat = dev.norm();
    fill_row(row, res);
    row.extra1 = dev(0);
    row.extra2 = dev(1);
    rows.push_back(row);
  }
  sort_rows(rows);
  return rows;
}

SmallMopessStudyResult run_small_mopess_study(const StudyConfig& cfg) {
  StudyConfig local = cfg;
  local.study_id = StudyId::small_mopess;
  const StudyDims dims = study_dims(local);
  const ModelSpec spec = study_model(local);
  const auto& g = std::get<GaussianModelSpec>(spec);
  const double sd = std::sqrt(g.sigma2);

  SmallMopessStudyResult out;
  out.rows.reserve(static_cast<std::size_t>(dims.n_datasets));
  double best_abs = 0.0;
  bool have_best = false;
  for (long d = 0; d < dims.n_datasets; ++d) {
    RngStream data_rng{local.seed, kDataTag, static_cast<std::uint64_t>(d)};
    std::vector<double> values(static_cast<std::size_t>(dims.n));
    for (double& v : values) v = g.mu0 + sd * data_rng.normal();

    OpessProblem prob;
    prob.spec = spec;
    prob.data = ScalarData::from_values(std::move(values));
    prob.L = dims.L;
    prob.S = dims.S;
    prob.seed = engine_seed(local.seed, d);
    const OpessResult res = mopess(prob, local.workers);

    StudyRow row;
    row.dataset_id = d;
    row.xstat = std::get<ScalarData>(prob.data).ybar();
    fill_row(row, res);
    row.extra1 = negative_share(res);
    out.rows.push_back(row);

    const double abs_dev = std::fabs(row.xstat - g.mu0);
    if (!have_best || abs_dev < best_abs) {
      have_best = true;
      best_abs = abs_dev;
      out.min_abs_ybar_id = d;
      out.histogram.clear();
      for (const auto& [v, c] : res.counts) {
        HistRow hr;
        hr.m_n = v;
        hr.count = c;
        hr.frequency = static_cast<double>(c) / static_cast<double>(dims.S);
        out.histogram.push_back(hr);
      }
    }
  }
  sort_rows(out.rows);
  return out;
}

std::vector<BinRow> binned_summary(const std::vector<StudyRow>& rows,
                                   int n_bins) {
  if (n_bins < 1) {
    throw std::domain_error("binned_summary: n_bins must be >= 1");
  }
  std::vector<BinRow> out;
  if (rows.empty()) return out;

  std::vector<const StudyRow*> sorted;
  sorted.reserve(rows.size());
  for (const StudyRow& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const StudyRow* a, const StudyRow* b) {
              if (a->xstat != b->xstat) return a->xstat < b->xstat;
              return a->dataset_id < b->dataset_id;
            });

  const long total = static_cast<long>(sorted.size());
  const long base = total / n_bins;
  const long rem = total % n_bins;
  long pos = 0;
  for (int b = 0; b < n_bins; ++b) {
    const long len = base + (b < rem ? 1 : 0);
    if (len == 0) continue;
    BinRow br;
    br.x_lo = sorted[static_cast<std::size_t>(pos)]->xstat;
    br.x_hi = sorted[static_cast<std::size_t>(pos + len - 1)]->xstat;
    br.count = len;
    for (long i = pos; i < pos + len; ++i) {
      const StudyRow& r = *sorted[static_cast<std::size_t>(i)];
      br.x_mean += r.xstat;
      br.mopess_mean += r.mopess;
      br.q05 += r.q05;
      br.q50 += r.q50;
      br.q95 += r.q95;
    }
    const double inv = 1.0 / static_cast<double>(len);
    br.x_mean *= inv;
    br.mopess_mean *= inv;
    br.q05 *= inv;
    br.q50 *= inv;
    br.q95 *= inv;
    out.push_back(br);
    pos += len;
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const long n = static_cast<long>(v.size());
  std::vector<long> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0L);
  std::sort(idx.begin(), idx.end(), [&](long a, long b) {
    return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)];
  });
  std::vector<double> ranks(static_cast<std::size_t>(n));
  long i = 0;
  while (i < n) {
    long j = i;
    while (j + 1 < n &&
           v[static_cast<std::size_t>(idx[static_cast<std::size_t>(j + 1)])] ==
               v[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]) {
      ++j;
    }
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (long k = i; k <= j; ++k) {
      ranks[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] =
          shared;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rho(const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("spearman_rho: input sizes differ");
  }
  const long n = static_cast<long>(a.size());
  if (n < 2) return 0.0;
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (long i = 0; i < n; ++i) {
    const double da = ra[static_cast<std::size_t>(i)] - mean;
    const double db = rb[static_cast<std::size_t>(i)] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace opess
