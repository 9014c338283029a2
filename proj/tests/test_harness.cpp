#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "opess/harness.hpp"

using namespace opess;

namespace {

StudyConfig tiny_gaussian() {
  StudyConfig cfg;
  cfg.study_id = StudyId::gaussian_location;
  cfg.seed = 2;
  cfg.n_datasets = 4;
  cfg.S = 60;
  return cfg;
}

bool rows_equal(const std::vector<StudyRow>& a, const std::vector<StudyRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].dataset_id != b[i].dataset_id) return false;
    if (a[i].xstat != b[i].xstat) return false;
    if (a[i].mopess != b[i].mopess) return false;
    if (a[i].q05 != b[i].q05 || a[i].q50 != b[i].q50 || a[i].q95 != b[i].q95)
      return false;
    if (a[i].mean_min_distance != b[i].mean_min_distance) return false;
    if (a[i].boundary_fraction != b[i].boundary_fraction) return false;
    if (a[i].extra1 != b[i].extra1 || a[i].extra2 != b[i].extra2) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("study names round trip") {
  for (const StudyId id :
       {StudyId::gaussian_location, StudyId::gaussian_conditional,
        StudyId::beta_resample, StudyId::regression, StudyId::small_mopess})
    CHECK(parse_study_id(study_id_name(id)) == id);
  CHECK_THROWS_AS((void)parse_study_id("no_such_study"), std::exception);
}

TEST_CASE("scale defaults resolve per study") {
  StudyConfig cfg;
  cfg.study_id = StudyId::gaussian_location;
  StudyDims d = study_dims(cfg);
  CHECK(d.n_datasets == 50);
  CHECK(d.S == 2000);
  CHECK(d.L == 120);
  CHECK(d.n == 20);

  cfg.scale = Scale::paper;
  d = study_dims(cfg);
  CHECK(d.n_datasets == 300);
  CHECK(d.S == 10000);

  cfg = StudyConfig{};
  cfg.study_id = StudyId::beta_resample;
  d = study_dims(cfg);
  CHECK(d.n_datasets == 100);
  CHECK(d.S == 2000);
  CHECK(d.L == 100);

  cfg.study_id = StudyId::regression;
  d = study_dims(cfg);
  CHECK(d.n_datasets == 100);
  CHECK(d.S == 1000);
  CHECK(d.L == 120);

  cfg.study_id = StudyId::small_mopess;
  d = study_dims(cfg);
  CHECK(d.n_datasets == 50);
  CHECK(d.S == 2000);
  CHECK(d.L == 70);

  SUBCASE("explicit overrides win") {
    cfg.n_datasets = 7;
    cfg.S = 123;
    cfg.L = 44;
    cfg.n = 11;
    d = study_dims(cfg);
    CHECK(d.n_datasets == 7);
    CHECK(d.S == 123);
    CHECK(d.L == 44);
    CHECK(d.n == 11);
  }
}

TEST_CASE("equal count binning splits remainders up front") {
  std::vector<StudyRow> rows;
  for (int i = 0; i < 10; ++i) {
    StudyRow r;
    r.dataset_id = i;
    r.xstat = 0.1 * i;
    r.mopess = 2.0 * i;
    r.q05 = i - 1.0;
    r.q50 = i;
    r.q95 = i + 1.0;
    rows.push_back(r);
  }
  const std::vector<BinRow> bins = binned_summary(rows, 3);
  REQUIRE(bins.size() == 3);
  CHECK(bins[0].count == 4);
  CHECK(bins[1].count == 3);
  CHECK(bins[2].count == 3);
  CHECK(bins[0].x_lo == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bins[0].x_hi == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(bins[0].x_mean == doctest::Approx(0.15).epsilon(1e-13));
  CHECK(bins[0].mopess_mean == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(bins[2].x_lo == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(bins[2].mopess_mean == doctest::Approx(16.0).epsilon(1e-13));
  SUBCASE("one bin swallows everything") {
    const std::vector<BinRow> one = binned_summary(rows, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].count == 10);
    CHECK(one[0].mopess_mean == doctest::Approx(9.0).epsilon(1e-13));
  }
  SUBCASE("more bins than rows leaves empty bins out") {
    const std::vector<BinRow> many = binned_summary(rows, 25);
    long total = 0;
    for (const BinRow& b : many) {
      CHECK(b.count > 0);
      total += b.count;
    }
    CHECK(total == 10);
  }
  CHECK_THROWS_AS((void)binned_summary(rows, 0), std::domain_error);
}

TEST_CASE("rank correlation handles monotone, reversed, and tied input") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up = {2.0, 4.0, 9.0, 16.0, 30.0};
  const std::vector<double> down = {5.0, 4.0, 3.0, 2.0, 1.0};
  CHECK(spearman_rho(x, up) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spearman_rho(x, down) == doctest::Approx(-1.0).epsilon(1e-14));
  SUBCASE("ties get average ranks") {
    const std::vector<double> a = {1.0, 2.0, 2.0, 3.0};
    const std::vector<double> b = {10.0, 20.0, 30.0, 40.0};
    CHECK(spearman_rho(a, b) ==
          doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
  }
  SUBCASE("degenerate input gives zero") {
    CHECK(spearman_rho({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(spearman_rho({1.0}, {2.0}) == 0.0);
  }
  CHECK_THROWS_AS((void)spearman_rho({1.0, 2.0}, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("location study rows are sorted, labeled, and reproducible") {
  const StudyConfig cfg = tiny_gaussian();
  const std::vector<StudyRow> rows = run_gaussian_study(cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].xstat >= rows[i - 1].xstat);
  std::vector<long> ids;
  for (const StudyRow& r : rows) {
    ids.push_back(r.dataset_id);
    CHECK_FALSE(r.extra1.has_value());
    CHECK_FALSE(r.extra2.has_value());
    CHECK(r.q05 <= r.q50);
    CHECK(r.q50 <= r.q95);
    CHECK(r.mean_min_distance >= 0.0);
  }
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<long>{0, 1, 2, 3});

  SUBCASE("a second run is identical") {
    CHECK(rows_equal(rows, run_gaussian_study(cfg)));
  }
  SUBCASE("worker counts do not matter") {
    StudyConfig par = cfg;
    par.workers = 3;
    CHECK(rows_equal(rows, run_gaussian_study(par)));
  }
  SUBCASE("the seed matters") {
    StudyConfig other = cfg;
    other.seed = 3;
    CHECK_FALSE(rows_equal(rows, run_gaussian_study(other)));
  }
}

TEST_CASE("conditional study compares empirical and closed form masses") {
  StudyConfig cfg;
  cfg.study_id = StudyId::gaussian_conditional;
  cfg.seed = 4;
  cfg.S = 400;
  const ConditionalStudyResult res = run_conditional_study(cfg, 0.0, 0.0);
  REQUIRE_FALSE(res.rows.empty());
  double freq = 0.0;
  bool any_theory = false;
  for (const HistRow& r : res.rows) {
    CHECK(r.count >= 0);
    freq += r.frequency;
    if (r.theory_pmf.has_value()) {
      any_theory = true;
      CHECK(*r.theory_pmf >= 0.0);
      CHECK(*r.theory_pmf <= 1.0);
    }
  }
  CHECK(freq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(any_theory);
  CHECK(res.tv >= 0.0);
  CHECK(res.tv <= 1.0);
  CHECK(std::isfinite(res.empirical_mean));
  CHECK(std::isfinite(res.theory_mean));
  SUBCASE("repeat runs agree") {
    const ConditionalStudyResult again = run_conditional_study(cfg, 0.0, 0.0);
    CHECK(again.tv == res.tv);
    CHECK(again.empirical_mean == res.empirical_mean);
    CHECK(again.theory_mean == res.theory_mean);
  }
}

TEST_CASE("resampling study keeps success fractions in the unit interval") {
  StudyConfig cfg;
  cfg.study_id = StudyId::beta_resample;
  cfg.seed = 5;
  cfg.n_datasets = 3;
  cfg.S = 40;
  cfg.L = 40;
  const std::vector<StudyRow> rows = run_beta_study(cfg);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].xstat >= 0.0);
    CHECK(rows[i].xstat <= 1.0);
    if (i > 0) CHECK(rows[i].xstat >= rows[i - 1].xstat);
  }
  CHECK(rows_equal(rows, run_beta_study(cfg)));
}

TEST_CASE("regression study reports coordinate deviations") {
  StudyConfig cfg;
  cfg.study_id = StudyId::regression;
  cfg.seed = 6;
  cfg.n_datasets = 3;
  cfg.S = 30;
  const std::vector<StudyRow> rows = run_regression_study(cfg);
  REQUIRE(rows.size() == 3);
  for (const StudyRow& r : rows) {
    REQUIRE(r.extra1.has_value());
    REQUIRE(r.extra2.has_value());
    const double norm =
        std::sqrt(*r.extra1 * *r.extra1 + *r.extra2 * *r.extra2);
    CHECK(r.xstat == doctest::Approx(norm).epsilon(1e-12));
  }
  CHECK(rows_equal(rows, run_regression_study(cfg)));
}

TEST_CASE("small impact study tracks negatives and the central dataset") {
  StudyConfig cfg;
  cfg.study_id = StudyId::small_mopess;
  cfg.seed = 7;
  cfg.n_datasets = 5;
  cfg.S = 80;
  const SmallMopessStudyResult res = run_small_mopess_study(cfg);
  REQUIRE(res.rows.size() == 5);
  for (const StudyRow& r : res.rows) {
    REQUIRE(r.extra1.has_value());
    CHECK(*r.extra1 >= 0.0);
    CHECK(*r.extra1 <= 1.0);
  }
  SUBCASE("the highlighted dataset has the smallest absolute mean") {
    double best = 1e300;
    long best_id = -1;
    for (const StudyRow& r : res.rows) {
      if (std::abs(r.xstat) < best) {
        best = std::abs(r.xstat);
        best_id = r.dataset_id;
      }
    }
    CHECK(res.min_abs_ybar_id == best_id);
  }
  SUBCASE("the histogram is a distribution") {
    double freq = 0.0;
    for (const HistRow& h : res.histogram) freq += h.frequency;
    CHECK(freq == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("repeat runs agree") {
    const SmallMopessStudyResult again = run_small_mopess_study(cfg);
    CHECK(rows_equal(res.rows, again.rows));
    CHECK(again.min_abs_ybar_id == res.min_abs_ybar_id);
  }
}
