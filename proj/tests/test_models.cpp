#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "opess/models.hpp"
#include "opess/rng.hpp"

using namespace opess;

namespace {

const Gaussian1D& g1(const Posterior& p) { return std::get<Gaussian1D>(p); }
const BetaDist& bd(const Posterior& p) { return std::get<BetaDist>(p); }
const Gaussian2D& g2(const Posterior& p) { return std::get<Gaussian2D>(p); }

}  // namespace

TEST_CASE("model specs expose their nominal pseudo observation counts") {
  const GaussianModelSpec conj{1.0, 0.0, 0.1};
  CHECK(conj.pseudo_obs() == doctest::Approx(10.0).epsilon(1e-14));
  CHECK_FALSE(conj.flat());
  CHECK(conj.baseline().flat());
  CHECK(conj.baseline().pseudo_obs() == 0.0);

  const BetaBernoulliModelSpec bb{5.0, 5.0};
  CHECK(bb.pseudo_obs() == doctest::Approx(8.0).epsilon(1e-14));

  RegressionModelSpec reg;
  reg.sigma2 = 1.0;
  reg.tau1_sq = 0.1;
  reg.tau2_sq = 0.25;
  CHECK(reg.pseudo_obs() == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(reg.baseline().flat());
  CHECK(reg.baseline().pseudo_obs() == 0.0);

  CHECK(nominal_pseudo_obs(ModelSpec{conj}) ==
        doctest::Approx(10.0).epsilon(1e-14));
  CHECK(family_of(ModelSpec{conj}) == Family::gaussian);
  CHECK(family_of(ModelSpec{bb}) == Family::bernoulli);
  CHECK(family_of(ModelSpec{reg}) == Family::regression);
}

TEST_CASE("scalar data caches the running sum") {
  const ScalarData d = ScalarData::from_values({0.5, -1.0, 2.0, 0.1});
  CHECK(d.n() == 4);
  CHECK(d.sum == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(d.ybar() == doctest::Approx(0.4).epsilon(1e-14));
  const ScalarData bern = ScalarData::from_values({1, 0, 1, 1, 0});
  CHECK(bern.successes() == 3);
  CHECK(ScalarData{}.ybar() == 0.0);
}

TEST_CASE("regression data caches every cross sum") {
  const RegressionData d =
      RegressionData::from_pairs({{1.0, 2.0}, {2.0, 3.0}, {4.0, 7.0}});
  CHECK(d.n() == 3);
  CHECK(d.sx == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(d.sxx == doctest::Approx(21.0).epsilon(1e-14));
  CHECK(d.sy == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(d.sxy == doctest::Approx(36.0).epsilon(1e-14));
}

TEST_CASE("gaussian location posterior in conjugate and flat form") {
  const GaussianModelSpec spec{1.0, 0.0, 0.1};
  const Posterior conj = posterior_gaussian(spec, 20, 0.3);
  CHECK(g1(conj).mean == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(g1(conj).var == doctest::Approx(1.0 / 30.0).epsilon(1e-13));

  const Posterior flat = posterior_gaussian(spec.baseline(), 20, 0.3);
  CHECK(g1(flat).mean == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(g1(flat).var == doctest::Approx(0.05).epsilon(1e-14));

  SUBCASE("prior mean pulls the posterior mean") {
    const GaussianModelSpec off{4.0, 1.0, 0.5};
    const double z = 8.0;
    const Posterior p = posterior_gaussian(off, 10, 2.0);
    CHECK(g1(p).mean ==
          doctest::Approx((10.0 * 2.0 + z * 1.0) / 18.0).epsilon(1e-13));
    CHECK(g1(p).var == doctest::Approx(4.0 / 18.0).epsilon(1e-13));
  }
}

TEST_CASE("beta posterior adds counts to the chosen prior") {
  const BetaBernoulliModelSpec spec{5.0, 5.0};
  const Posterior inf = posterior_beta(spec, 7, 20, false);
  CHECK(bd(inf).a == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(bd(inf).b == doctest::Approx(18.0).epsilon(1e-14));
  const Posterior base = posterior_beta(spec, 7, 20, true);
  CHECK(bd(base).a == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(bd(base).b == doctest::Approx(14.0).epsilon(1e-14));
}

TEST_CASE("flat regression posterior matches least squares") {
  const RegressionData data = RegressionData::from_pairs(
      {{0.0, 1.1}, {1.0, 2.9}, {2.0, 5.2}, {3.0, 6.8}, {4.0, 9.1}});
  RegressionModelSpec spec;
  spec.sigma2 = 2.0;
  const Posterior p = posterior_regression(spec, data, false);

  Eigen::Matrix2d xtx;
  xtx << 5.0, data.sx, data.sx, data.sxx;
  Eigen::Vector2d xty(data.sy, data.sxy);
  const Eigen::Vector2d ols = xtx.ldlt().solve(xty);
  CHECK(g2(p).mean(0) == doctest::Approx(ols(0)).epsilon(1e-12));
  CHECK(g2(p).mean(1) == doctest::Approx(ols(1)).epsilon(1e-12));
  const Eigen::Matrix2d cov = spec.sigma2 * xtx.inverse();
  CHECK(g2(p).cov.a11 == doctest::Approx(cov(0, 0)).epsilon(1e-12));
  CHECK(g2(p).cov.a12 == doctest::Approx(cov(0, 1)).epsilon(1e-12));
  CHECK(g2(p).cov.a22 == doctest::Approx(cov(1, 1)).epsilon(1e-12));
}

TEST_CASE("wide priors let the regression posterior approach least squares") {
  const RegressionData data = RegressionData::from_pairs(
      {{-1.0, -0.8}, {0.0, 0.4}, {1.0, 1.9}, {2.0, 3.1}, {3.0, 4.2}});
  RegressionModelSpec flat;
  flat.sigma2 = 1.0;
  RegressionModelSpec wide = flat;
  wide.tau1_sq = 1e8;
  wide.tau2_sq = 1e8;
  const Posterior pf = posterior_regression(flat, data, false);
  const Posterior pw = posterior_regression(wide, data, false);
  CHECK(g2(pw).mean(0) == doctest::Approx(g2(pf).mean(0)).epsilon(1e-6));
  CHECK(g2(pw).mean(1) == doctest::Approx(g2(pf).mean(1)).epsilon(1e-6));
  CHECK(g2(pw).cov.a11 == doctest::Approx(g2(pf).cov.a11).epsilon(1e-6));
  CHECK(g2(pw).cov.a22 == doctest::Approx(g2(pf).cov.a22).epsilon(1e-6));
}

TEST_CASE("informative regression posterior blends prior and data") {
  const RegressionData data =
      RegressionData::from_pairs({{0.0, 0.5}, {1.0, 1.4}, {2.0, 2.6}});
  RegressionModelSpec spec;
  spec.sigma2 = 1.0;
  spec.eta0 = Eigen::Vector2d(0.2, 0.8);
  spec.tau1_sq = 0.5;
  spec.tau2_sq = 0.25;
  const Posterior p = posterior_regression(spec, data, false);

  Eigen::Matrix2d prec;
  prec << 3.0 + 1.0 / 0.5, data.sx, data.sx, data.sxx + 1.0 / 0.25;
  Eigen::Vector2d rhs(data.sy + 0.2 / 0.5, data.sxy + 0.8 / 0.25);
  const Eigen::Vector2d mean = prec.ldlt().solve(rhs);
  CHECK(g2(p).mean(0) == doctest::Approx(mean(0)).epsilon(1e-12));
  CHECK(g2(p).mean(1) == doctest::Approx(mean(1)).epsilon(1e-12));
  const Eigen::Matrix2d cov = prec.inverse();
  CHECK(g2(p).cov.a11 == doctest::Approx(cov(0, 0)).epsilon(1e-12));
  CHECK(g2(p).cov.a12 == doctest::Approx(cov(0, 1)).epsilon(1e-12));
  CHECK(g2(p).cov.a22 == doctest::Approx(cov(1, 1)).epsilon(1e-12));
}

TEST_CASE("regression posterior from sums equals the pair based form") {
  const RegressionData data = RegressionData::from_pairs(
      {{0.3, 1.0}, {1.2, 2.4}, {2.2, 3.9}, {3.1, 5.5}});
  RegressionModelSpec spec;
  spec.sigma2 = 1.3;
  spec.eta0 = Eigen::Vector2d(0.1, 1.0);
  spec.tau1_sq = 0.7;
  spec.tau2_sq = 0.4;
  for (bool baseline : {false, true}) {
    const Posterior a = posterior_regression(spec, data, baseline);
    const Posterior b = posterior_regression_sums(
        spec, data.n(), data.sx, data.sxx, data.sy, data.sxy, baseline);
    CHECK(g2(a).mean(0) == doctest::Approx(g2(b).mean(0)).epsilon(1e-14));
    CHECK(g2(a).mean(1) == doctest::Approx(g2(b).mean(1)).epsilon(1e-14));
    CHECK(g2(a).cov.a11 == doctest::Approx(g2(b).cov.a11).epsilon(1e-14));
    CHECK(g2(a).cov.a12 == doctest::Approx(g2(b).cov.a12).epsilon(1e-14));
    CHECK(g2(a).cov.a22 == doctest::Approx(g2(b).cov.a22).epsilon(1e-14));
  }
}

TEST_CASE("posterior draws follow the posterior") {
  SUBCASE("gaussian") {
    RngStream rng{201};
    const Posterior p = Gaussian1D{2.0, 0.25};
    const int n = 50000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = std::get<double>(sample_theta(p, rng));
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.005));
    CHECK(s2 / n - mean * mean == doctest::Approx(0.25).epsilon(0.05));
  }
  SUBCASE("beta") {
    RngStream rng{202};
    const Posterior p = BetaDist{12.0, 18.0};
    const int n = 50000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = std::get<double>(sample_theta(p, rng));
      CHECK(x > 0.0);
      CHECK(x < 1.0);
      s += x;
    }
    CHECK(s / n == doctest::Approx(0.4).epsilon(0.01));
  }
  SUBCASE("bivariate gaussian") {
    RngStream rng{203};
    Gaussian2D law;
    law.mean = Eigen::Vector2d(1.0, -2.0);
    law.cov = Spd2x2{1.0, 0.6, 2.0};
    const Posterior p = law;
    const int n = 50000;
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d x = std::get<Eigen::Vector2d>(sample_theta(p, rng));
      s += x;
      s11 += x(0) * x(0);
      s12 += x(0) * x(1);
      s22 += x(1) * x(1);
    }
    const Eigen::Vector2d mean = s / n;
    CHECK(mean(0) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(mean(1) == doctest::Approx(-2.0).epsilon(0.02));
    CHECK(s11 / n - mean(0) * mean(0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(s12 / n - mean(0) * mean(1) == doctest::Approx(0.6).epsilon(0.08));
    CHECK(s22 / n - mean(1) * mean(1) == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("equal streams give equal draws") {
    RngStream a{204};
    RngStream b{204};
    const Posterior p = Gaussian1D{0.0, 1.0};
    for (int i = 0; i < 20; ++i)
      CHECK(std::get<double>(sample_theta(p, a)) ==
            std::get<double>(sample_theta(p, b)));
  }
}

TEST_CASE("future chains cover every expanded size with fresh draws") {
  const GaussianModelSpec spec{1.0, 0.0, 0.1};
  const long n = 5, L = 12;
  RngStream rng{301, 1};
  const FutureChains fc =
      generate_future_chains(ModelSpec{spec}, ParamValue{0.7}, n, L, rng);
  CHECK(fc.n == n);
  CHECK(fc.L == L);
  REQUIRE(fc.chain_count() == L - n);
  REQUIRE(fc.primary.size() == static_cast<std::size_t>(L - n));
  REQUIRE(fc.mirror.size() == static_cast<std::size_t>(L - n));
  for (long c = 0; c < L - n; ++c) {
    CHECK(static_cast<long>(fc.primary[c].size()) == c + 1);
    CHECK(static_cast<long>(fc.mirror[c].size()) == c + 1);
    const ChainStats ps = stats_of_chain(fc.primary[c]);
    CHECK(ps.len == fc.primary_stats[c].len);
    CHECK(ps.s1 == doctest::Approx(fc.primary_stats[c].s1).epsilon(1e-14));
    const ChainStats ms = stats_of_chain(fc.mirror[c]);
    CHECK(ms.len == fc.mirror_stats[c].len);
    CHECK(ms.s1 == doctest::Approx(fc.mirror_stats[c].s1).epsilon(1e-14));
  }
  SUBCASE("primary and mirror branches differ") {
    CHECK(fc.primary[3] != fc.mirror[3]);
  }
  SUBCASE("the same parent stream reproduces the family") {
    RngStream rng2{301, 1};
    const FutureChains fc2 =
        generate_future_chains(ModelSpec{spec}, ParamValue{0.7}, n, L, rng2);
    CHECK(fc.primary == fc2.primary);
    CHECK(fc.mirror == fc2.mirror);
  }
}

TEST_CASE("bernoulli chains contain only zeros and ones") {
  const BetaBernoulliModelSpec spec{5.0, 5.0};
  RngStream rng{302, 1};
  const FutureChains fc =
      generate_future_chains(ModelSpec{spec}, ParamValue{0.35}, 4, 20, rng);
  double total = 0.0, count = 0.0;
  for (const auto& chain : fc.primary)
    for (const double v : chain) {
      CHECK((v == 0.0 || v == 1.0));
      total += v;
      count += 1.0;
    }
  CHECK(total / count == doctest::Approx(0.35).epsilon(0.5));
}

TEST_CASE("regression chains carry coordinate pairs") {
  RegressionModelSpec spec;
  spec.sigma2 = 1.0;
  spec.tau1_sq = 0.1;
  spec.tau2_sq = 0.1;
  RngStream rng{303, 1};
  const Eigen::Vector2d beta(0.5, 1.5);
  const FutureChains fc =
      generate_future_chains(ModelSpec{spec}, ParamValue{beta}, 6, 16, rng);
  REQUIRE(fc.primary_xy.size() == 10);
  CHECK(fc.primary.empty());
  for (long c = 0; c < 10; ++c) {
    CHECK(static_cast<long>(fc.primary_xy[c].size()) == c + 1);
    const ChainStats st = stats_of_chain(fc.primary_xy[c]);
    CHECK(st.len == c + 1);
    CHECK(st.s1 == doctest::Approx(fc.primary_stats[c].s1).epsilon(1e-14));
    CHECK(st.sxy == doctest::Approx(fc.primary_stats[c].sxy).epsilon(1e-14));
  }
}

TEST_CASE("expanded posteriors equal posteriors of concatenated data") {
  SUBCASE("gaussian") {
    const GaussianModelSpec spec{1.0, 0.5, 0.2};
    const ScalarData data = ScalarData::from_values({0.1, 0.9, 0.4});
    const ScalarChain chain = {1.2, -0.3};
    const Posterior lhs =
        expanded_posterior(ModelSpec{spec}, Dataset{data}, chain, false);
    std::vector<double> all = data.values;
    all.insert(all.end(), chain.begin(), chain.end());
    const double ybar =
        std::accumulate(all.begin(), all.end(), 0.0) / all.size();
    const Posterior rhs =
        posterior_gaussian(spec, static_cast<long>(all.size()), ybar);
    CHECK(g1(lhs).mean == doctest::Approx(g1(rhs).mean).epsilon(1e-13));
    CHECK(g1(lhs).var == doctest::Approx(g1(rhs).var).epsilon(1e-13));
  }
  SUBCASE("bernoulli") {
    const BetaBernoulliModelSpec spec{2.0, 3.0};
    const ScalarData data = ScalarData::from_values({1, 0, 1, 1});
    const ScalarChain chain = {0, 1, 0};
    const Posterior lhs =
        expanded_posterior(ModelSpec{spec}, Dataset{data}, chain, true);
    const Posterior rhs = posterior_beta(spec, 4, 7, true);
    CHECK(bd(lhs).a == doctest::Approx(bd(rhs).a).epsilon(1e-14));
    CHECK(bd(lhs).b == doctest::Approx(bd(rhs).b).epsilon(1e-14));
  }
  SUBCASE("regression") {
    RegressionModelSpec spec;
    spec.sigma2 = 1.0;
    spec.eta0 = Eigen::Vector2d(0.0, 1.0);
    spec.tau1_sq = 0.3;
    spec.tau2_sq = 0.3;
    const RegressionData data =
        RegressionData::from_pairs({{0.0, 0.1}, {1.0, 1.2}, {2.0, 2.2}});
    const PairChain chain = {{0.5, 0.8}, {1.5, 2.4}};
    const Posterior lhs =
        expanded_posterior(ModelSpec{spec}, Dataset{data}, chain, false);
    auto all = data.xy;
    all.insert(all.end(), chain.begin(), chain.end());
    const Posterior rhs =
        posterior_regression(spec, RegressionData::from_pairs(all), false);
    CHECK(g2(lhs).mean(0) == doctest::Approx(g2(rhs).mean(0)).epsilon(1e-13));
    CHECK(g2(lhs).mean(1) == doctest::Approx(g2(rhs).mean(1)).epsilon(1e-13));
    CHECK(g2(lhs).cov.a11 == doctest::Approx(g2(rhs).cov.a11).epsilon(1e-13));
    CHECK(g2(lhs).cov.a12 == doctest::Approx(g2(rhs).cov.a12).epsilon(1e-13));
    CHECK(g2(lhs).cov.a22 == doctest::Approx(g2(rhs).cov.a22).epsilon(1e-13));
  }
  SUBCASE("an empty chain reproduces the plain posterior") {
    const GaussianModelSpec spec{1.0, 0.0, 0.1};
    const ScalarData data = ScalarData::from_values({0.2, 0.6});
    const Posterior lhs = expanded_posterior(ModelSpec{spec}, Dataset{data},
                                             ChainStats{}, false);
    const Posterior rhs = posterior_gaussian(spec, 2, 0.4);
    CHECK(g1(lhs).mean == doctest::Approx(g1(rhs).mean).epsilon(1e-14));
    CHECK(g1(lhs).var == doctest::Approx(g1(rhs).var).epsilon(1e-14));
  }
}

TEST_CASE("dataset size covers both data layouts") {
  CHECK(dataset_size(Dataset{ScalarData::from_values({1.0, 2.0})}) == 2);
  CHECK(dataset_size(Dataset{RegressionData::from_pairs({{1.0, 2.0}})}) == 1);
}
