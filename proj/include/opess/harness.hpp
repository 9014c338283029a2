#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opess/engine.hpp"

namespace opess {

// The five packaged studies.
enum class StudyId {
  gaussian_location,
  gaussian_conditional,
  beta_resample,
  regression,
  small_mopess,
};

enum class Scale { desk, paper };

StudyId parse_study_id(const std::string& name);
std::string study_id_name(StudyId id);

// Run settings for one study. Optional fields override the study's
// defaults at the chosen scale.
struct StudyConfig {
  StudyId study_id = StudyId::gaussian_location;
  Scale scale = Scale::desk;
  std::uint64_t seed = 1;
  int workers = 1;
  std::optional<long> n_datasets;
  std::optional<long> S;
  std::optional<long> L;
  std::optional<long> n;
  double ybar = 0.0;  // gaussian_conditional only
  double mu = 0.0;    // gaussian_conditional only
  std::optional<double> sigma2;
  std::optional<double> mu0;
  std::optional<double> prior_var;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> tau_sq;
};

// Effective dataset count, realization count, chain cap, and data size
// after the study's scale defaults are applied.
struct StudyDims {
  long n_datasets = 0;
  long S = 0;
  long L = 0;
  long n = 0;
};

StudyDims study_dims(const StudyConfig& cfg);

// One dataset's summary line. xstat is the study's ordering statistic
// (data mean, success fraction, or prior-mean deviation norm). extra1 and
// extra2 carry study-specific columns: the per-coordinate deviations for
// regression, the share of negative realizations for the small study.
struct StudyRow {
  long dataset_id = 0;
  double xstat = 0.0;
  double mopess = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double mean_min_distance = 0.0;
  double boundary_fraction = 0.0;
  std::optional<double> extra1;
  std::optional<double> extra2;
};

struct HistRow {
  long m_n = 0;
  long count = 0;
  double frequency = 0.0;
  std::optional<double> theory_pmf;
};

struct BinRow {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double x_mean = 0.0;
  double mopess_mean = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  long count = 0;
};

// Gaussian location study: synthetic datasets of n draws, rows sorted by
// data mean.
std::vector<StudyRow> run_gaussian_study(const StudyConfig& cfg);

// Conditional study: one constant dataset with the given mean, theta*
// pinned to mu, with the closed-form pmf alongside the empirical one.
struct ConditionalStudyResult {
  std::vector<HistRow> rows;
  double empirical_mean = 0.0;
  double theory_mean = 0.0;
  double tv = 0.0;
};

ConditionalStudyResult run_conditional_study(const StudyConfig& cfg,
                                             double ybar, double mu);

// Beta-Bernoulli study: datasets resampled with replacement from a
// fixed binary population, rows sorted by success fraction.
std::vector<StudyRow> run_beta_study(const StudyConfig& cfg);

// Regression study: synthetic (x, y) datasets, xstat the Euclidean gap
// between the fitted and prior coefficient vectors, extras the per
// coefficient deviations.
std::vector<StudyRow> run_regression_study(const StudyConfig& cfg);

// Small-impact study: Gaussian location with few pseudo-observations,
// tracking negative realizations and the histogram of the dataset whose
// mean is closest to the prior mean.
struct SmallMopessStudyResult {
  std::vector<StudyRow> rows;
  std::vector<HistRow> histogram;
  long min_abs_ybar_id = 0;
};

SmallMopessStudyResult run_small_mopess_study(const StudyConfig& cfg);

// Equal-count bins over rows sorted by xstat, averaging each summary.
std::vector<BinRow> binned_summary(const std::vector<StudyRow>& rows,
                                   int n_bins);

// Spearman rank correlation with average ranks on ties.
double spearman_rho(const std::vector<double>& a,
                    const std::vector<double>& b);

}  // namespace opess
