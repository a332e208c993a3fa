#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "heavytail/estimation.hpp"
#include "heavytail/parallel.hpp"

using namespace heavytail;
using estimation::SubsampleKey;

TEST_SUITE("estimation") {
  TEST_CASE("empirical quantiles, type 7") {
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const auto qa = estimation::empirical_quantiles(a);
    CHECK(qa.q50 == doctest::Approx(3.0));
    CHECK(qa.q25 == doctest::Approx(2.0));

    const std::vector<double> b = {0, 0, 0, 0, 100};
    const auto qb = estimation::empirical_quantiles(b);
    CHECK(qb.q50 == doctest::Approx(0.0));
    CHECK(qb.q95 == doctest::Approx(80.0));

    CHECK_THROWS_AS(estimation::empirical_quantiles(std::vector<double>{}),
                    estimation::TooFewObservations);

    // permutation invariance
    std::vector<double> c = {9, 1, 4, 7, 2, 5, 3, 8, 6, 0};
    auto qc1 = estimation::empirical_quantiles(c);
    std::reverse(c.begin(), c.end());
    auto qc2 = estimation::empirical_quantiles(c);
    CHECK(qc1.q05 == qc2.q05);
    CHECK(qc1.q95 == qc2.q95);
  }

  TEST_CASE("table anchors match closed forms") {
    namespace tbl = estimation::tables;
    // alpha = 2 row: IQR of Normal(0, 2) is 2 sqrt(2) InvPhi(0.75)
    CHECK(tbl::scale_table[15][0] == doctest::Approx(1.907766).epsilon(2e-4));
    // Cauchy: IQR = 2 gamma exactly, median offset zero
    CHECK(tbl::scale_table[5][0] == doctest::Approx(2.0).epsilon(2e-4));
    CHECK(tbl::location_table[5][0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    // Levy corner (alpha = 1/2, beta = 1): median of Levy(-1, 1) is 2.198109
    CHECK(tbl::location_table[0][4] == doctest::Approx(-1.198109).epsilon(2e-4));
    CHECK(tbl::scale_table[0][4] == doctest::Approx(9.09352).epsilon(2e-3));
    // Gaussian boundary row of the inverse map
    for (double v : tbl::alpha_table[0]) CHECK(v == doctest::Approx(2.0).epsilon(1e-3));
    // Cauchy index statistic nu_alpha = 2 tan(0.45 pi) / 2 = 6.3138 inverts to alpha = 1
    const double a = estimation::detail::bilinear(tbl::nu_alpha_axis, tbl::nu_beta_axis,
                                                  tbl::alpha_table, 6.313752, 0.0);
    CHECK(a == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("quantile fit recovers heavy-tail parameters") {
    const stable::StableParams truth(1.0, 0.95, 0.11, 0.11);
    auto xs = stable::sample(truth, 100000, 881, 3);
    const auto fit = estimation::mcculloch_fit_detailed(xs);
    CHECK(std::abs(fit.params.alpha - truth.alpha) < 0.05);
    CHECK(std::abs(fit.params.beta - truth.beta) < 0.10);
    CHECK(std::abs(fit.params.gamma - truth.gamma) / truth.gamma < 0.05);
    CHECK(std::abs(fit.params.delta - truth.delta) < 0.02);
  }

  TEST_CASE("quantile fit at the Gaussian boundary") {
    const stable::StableParams truth(2.0, 0.0, 1.0, 0.0);
    auto xs = stable::sample(truth, 100000, 882, 4);
    const auto fit = estimation::mcculloch_fit_detailed(xs);
    CHECK(fit.params.alpha >= 1.95);
    CHECK(std::abs(fit.params.beta) <= 0.2);
    CHECK(fit.params.gamma == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(fit.params.delta) < 0.02);
  }

  TEST_CASE("gates and degenerate spreads") {
    std::vector<double> tiny(999, 0.0);
    for (std::size_t i = 0; i < tiny.size(); ++i) tiny[i] = static_cast<double>(i);
    CHECK_THROWS_AS(estimation::mcculloch_fit(tiny), estimation::TooFewObservations);

    std::vector<double> flat(2000, 1.5);
    CHECK_THROWS_AS(estimation::mcculloch_fit(flat), estimation::DegenerateSpread);
  }

  TEST_CASE("permutation invariance of the fit") {
    const stable::StableParams truth(1.4, 0.3, 1.0, 0.0);
    auto xs = stable::sample(truth, 5000, 11, 0);
    auto fit1 = estimation::mcculloch_fit(xs);
    std::mt19937 g(7);
    std::shuffle(xs.begin(), xs.end(), g);
    auto fit2 = estimation::mcculloch_fit(xs);
    CHECK(fit1.alpha == fit2.alpha);
    CHECK(fit1.beta == fit2.beta);
    CHECK(fit1.gamma == fit2.gamma);
    CHECK(fit1.delta == fit2.delta);
  }

  TEST_CASE("affine equivariance of the fit") {
    const stable::StableParams truth(1.3, 0.5, 0.8, 0.4);
    auto xs = stable::sample(truth, 200000, 5005, 1);
    const auto base = estimation::mcculloch_fit(xs);
    const double a = -2.0, b = 3.0;
    for (auto& v : xs) v = a * v + b;
    const auto mapped = estimation::mcculloch_fit(xs);
    CHECK(mapped.alpha == doctest::Approx(base.alpha).epsilon(0.02));
    CHECK(mapped.beta == doctest::Approx(-base.beta).epsilon(0.05));
    CHECK(mapped.gamma == doctest::Approx(2.0 * base.gamma).epsilon(0.01));
    CHECK(mapped.delta == doctest::Approx(a * base.delta + b).epsilon(0.01).scale(1.0));
  }

  TEST_CASE("fit_subsample scores a correctly specified model highly") {
    const stable::StableParams truth(1.0, 0.95, 0.11, 0.11);
    auto xs = stable::sample(truth, 100000, 883, 5);
    const SubsampleKey key{"LP", 1998, "all"};
    const auto levy = estimation::fit_subsample(xs, key, estimation::ModelKind::levy);
    REQUIRE(levy.status == estimation::FitStatus::ok);
    CHECK(levy.result->sids > 95.0);
    CHECK(levy.result->n == xs.size());

    const auto aep_fit = estimation::fit_subsample(xs, key, estimation::ModelKind::aep);
    REQUIRE(aep_fit.status == estimation::FitStatus::ok);
    // stable data: the stable model wins the AIC comparison
    CHECK(levy.result->aic < aep_fit.result->aic);
    const auto cmp = estimation::compare_models(*levy.result, *aep_fit.result);
    CHECK(cmp.delta_aic < 0.0);
    CHECK(cmp.preferred == "levy");
  }

  TEST_CASE("fit_subsample gate classes") {
    const stable::StableParams truth(1.5, 0.0, 1.0, 0.0);
    auto xs = stable::sample(truth, 6000, 884, 6);
    // 6000 observations: enough for region x year, not for a national-year fit
    auto national = estimation::fit_subsample(xs, {"LP", 2001, "all"}, estimation::ModelKind::levy);
    CHECK(national.status == estimation::FitStatus::skipped);
    auto regional = estimation::fit_subsample(xs, {"LP", 2001, "R1"}, estimation::ModelKind::levy);
    CHECK(regional.status == estimation::FitStatus::ok);
    auto pooled = estimation::fit_subsample(std::span<const double>(xs.data(), 1200),
                                            {"LP", -1, "R1"}, estimation::ModelKind::levy);
    CHECK(pooled.status == estimation::FitStatus::ok);
  }
}

TEST_SUITE("estimation_props") {
  TEST_CASE("estimation error shrinks with sample size") {
    const double alphas[] = {0.8, 1.0, 1.3, 1.7};
    const double betas[] = {0.0, 0.5, 0.95};
    const std::size_t sizes[] = {1000, 10000, 100000};
    const int seeds = 50;
    struct Combo {
      double alpha, beta;
    };
    std::vector<Combo> combos;
    for (double a : alphas)
      for (double b : betas) combos.push_back({a, b});

    std::vector<std::array<double, 3>> med_err(combos.size());
    par::parallel_for(combos.size(), [&](std::size_t ci) {
      const stable::StableParams truth(combos[ci].alpha, combos[ci].beta, 1.0, 0.0);
      for (int si = 0; si < 3; ++si) {
        std::vector<double> errs(seeds);
        for (int s = 0; s < seeds; ++s) {
          auto xs = stable::sample(truth, sizes[si], 909, rng::derive_stream(ci * 100 + s, si));
          errs[s] = std::abs(estimation::mcculloch_fit(xs).alpha - truth.alpha);
        }
        std::nth_element(errs.begin(), errs.begin() + seeds / 2, errs.end());
        med_err[ci][si] = errs[seeds / 2];
      }
    });
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
      INFO("alpha=", combos[ci].alpha, " beta=", combos[ci].beta, " errs=", med_err[ci][0], ",",
           med_err[ci][1], ",", med_err[ci][2]);
      CHECK(med_err[ci][0] > med_err[ci][1]);
      CHECK(med_err[ci][1] > med_err[ci][2]);
    }
  }

  TEST_CASE("rescaled means of iid sums fit back to the same tail index") {
    // means of blocks, rescaled by n^(1 - 1/alpha), are again stable with the
    // same alpha; the fit should land within +-0.05
    for (double alpha : {0.8, 1.5}) {
      const stable::StableParams comp(alpha, 0.0, 1.0, 0.0);
      const std::size_t n_terms = 100, n_sums = 20000;
      std::vector<double> sums(n_sums);
      rng::RandomStream rs(606, static_cast<std::uint64_t>(alpha * 1000));
      const double rescale = std::pow(static_cast<double>(n_terms), 1.0 - 1.0 / alpha);
      for (auto& v : sums) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_terms; ++j) acc += stable::sample_one(comp, rs);
        v = (acc / static_cast<double>(n_terms)) * rescale;
      }
      const auto fit = estimation::mcculloch_fit(sums);
      INFO("alpha=", alpha);
      CHECK(std::abs(fit.alpha - alpha) < 0.05);
    }
  }
}
