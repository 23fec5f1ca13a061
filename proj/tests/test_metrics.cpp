#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracle_helpers.hpp"
#include "ppm/metrics.hpp"
#include "ppm/numeric.hpp"
#include "ppm/rng.hpp"

using namespace ppm;

namespace {

PredictionSet random_set(std::size_t n, Rng& rng) {
  PredictionSet ps;
  ps.y.resize(n);
  ps.p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ps.y[k] = rng.uniform01() < 0.5 ? 1 : 0;
    ps.p[k] = rng.uniform01();
  }
  return ps;
}

// Bernoulli outcomes drawn from their own predictions: calibrated by
// construction.
PredictionSet calibrated_set(std::size_t n, Rng& rng, double lo = 0.05,
                             double hi = 0.85) {
  PredictionSet ps;
  ps.y.resize(n);
  ps.p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ps.p[k] = lo + (hi - lo) * rng.uniform01();
    ps.y[k] = rng.uniform01() < ps.p[k] ? 1 : 0;
  }
  return ps;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("brier score known values") {
  PredictionSet perfect;
  perfect.y = {1, 0, 1};
  perfect.p = {1.0, 0.0, 1.0};
  CHECK(brier_score(perfect) == 0.0);

  PredictionSet flat;
  flat.y = {1, 0, 1, 0};
  flat.p = {0.5, 0.5, 0.5, 0.5};
  CHECK(brier_score(flat) == 0.25);

  PredictionSet hand;
  hand.y = {1, 0, 1};
  hand.p = {0.9, 0.2, 0.6};
  CHECK(brier_score(hand) == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("decomposition terms and their identity") {
  PredictionSet perfect;
  perfect.y = {1, 0};
  perfect.p = {1.0, 0.0};
  auto d = brier_decomposition(perfect);
  CHECK(d.calibration_term == 0.0);
  CHECK(d.refinement_term == 0.0);

  PredictionSet flat;
  flat.y = {1, 0, 0, 1};
  flat.p = {0.5, 0.5, 0.5, 0.5};
  d = brier_decomposition(flat);
  CHECK(d.calibration_term == 0.0);
  CHECK(d.refinement_term == 0.25);

  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto ps = random_set(2 + rng.below(40), rng);
    const auto terms = brier_decomposition(ps);
    CHECK(std::abs(terms.calibration_term + terms.refinement_term - brier_score(ps)) <=
          1e-12);
    CHECK(terms.refinement_term >= 0.0);
    CHECK(terms.refinement_term <= 0.25);
  }
}

TEST_CASE("mixture loss endpoints and the alpha = 0.5 proportionality") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ps = random_set(3 + rng.below(60), rng);
    const auto terms = brier_decomposition(ps);
    CHECK(mixture_loss(ps, {1.0}) == terms.calibration_term);
    CHECK(mixture_loss(ps, {0.0}) == terms.refinement_term);
    CHECK(std::abs(mixture_loss(ps, {0.5}) - 0.5 * brier_score(ps)) <= 1e-15);
  }
  PredictionSet ps;
  ps.y = {1, 0};
  ps.p = {0.4, 0.2};
  CHECK_THROWS(mixture_loss(ps, {1.5}));
}

TEST_CASE("mean calibration is the event-rate difference") {
  PredictionSet ps;
  ps.y = {1, 0, 1, 0};
  ps.p = {0.7, 0.3, 0.6, 0.4};  // mean p = 0.5 = mean y
  CHECK(mean_calibration(ps) == doctest::Approx(0.0).epsilon(1e-15));

  PredictionSet off;
  off.y = {1, 0};
  off.p = {0.9, 0.5};  // mean p 0.7 vs event rate 0.5
  CHECK(mean_calibration(off) == doctest::Approx(0.2).epsilon(1e-12));

  // unlike the absolute-error form, sharpness does not matter
  PredictionSet sharp, flat;
  sharp.y = flat.y = {1, 0, 1, 0};
  sharp.p = {0.75, 0.25, 0.75, 0.25};
  flat.p = {0.5, 0.5, 0.5, 0.5};
  CHECK(mean_calibration(sharp) == mean_calibration(flat));
  CHECK(citl(sharp) < citl(flat));
}

TEST_CASE("citl known values and its relation to the brier score") {
  PredictionSet perfect;
  perfect.y = {1, 0};
  perfect.p = {1.0, 0.0};
  CHECK(citl(perfect) == 0.0);

  PredictionSet hand;
  hand.y = {1, 0};
  hand.p = {0.6, 0.3};
  CHECK(citl(hand) == doctest::Approx(0.35).epsilon(1e-15));

  PredictionSet wrong;
  wrong.y = {1, 0, 1};
  wrong.p = {0.0, 1.0, 0.0};
  CHECK(citl(wrong) == 1.0);

  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ps = random_set(2 + rng.below(50), rng);
    const double c = citl(ps);
    CHECK(c >= brier_score(ps));
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("auroc known values") {
  PredictionSet sep;
  sep.y = {0, 0, 1, 1};
  sep.p = {0.1, 0.2, 0.8, 0.9};
  CHECK(*auroc(sep) == 1.0);

  PredictionSet tied;
  tied.y = {0, 1, 0, 1};
  tied.p = {0.4, 0.4, 0.4, 0.4};
  CHECK(*auroc(tied) == 0.5);

  PredictionSet hand;
  hand.y = {1, 1, 0, 0};
  hand.p = {0.9, 0.4, 0.6, 0.2};
  CHECK(*auroc(hand) == 0.75);

  PredictionSet single;
  single.y = {1, 1};
  single.p = {0.2, 0.6};
  CHECK(!auroc(single).has_value());
}

TEST_CASE("auroc equals exhaustive pair counting on small random sets") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    PredictionSet ps;
    const std::size_t n = 2 + rng.below(11);
    ps.y.resize(n);
    ps.p.resize(n);
    bool pos = false, neg = false;
    for (std::size_t k = 0; k < n; ++k) {
      ps.y[k] = rng.uniform01() < 0.5 ? 1 : 0;
      // coarse grid of probabilities encourages ties
      ps.p[k] = static_cast<double>(rng.below(5)) / 4.0;
      (ps.y[k] == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) {
      CHECK(!auroc(ps).has_value());
      continue;
    }
    CHECK(*auroc(ps) == oracle::brute_force_auroc(ps));
  }
}

TEST_CASE("auroc is invariant under strictly increasing transforms") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto ps = random_set(20, rng);
    bool pos = false, neg = false;
    for (int v : ps.y) (v == 1 ? pos : neg) = true;
    if (!pos || !neg) continue;
    const double base = *auroc(ps);
    auto squashed = ps;
    for (auto& p : squashed.p) p = p * p;  // increasing on [0,1]
    CHECK(*auroc(squashed) == base);
  }
}

TEST_CASE("auprc known values") {
  PredictionSet sep;
  sep.y = {0, 0, 1, 1};
  sep.p = {0.1, 0.2, 0.8, 0.9};
  CHECK(*auprc(sep) == 1.0);

  PredictionSet last;
  last.y = {1, 0};
  last.p = {0.2, 0.9};
  CHECK(*auprc(last) == 0.5);

  PredictionSet tied;
  tied.y = {1, 0, 0, 1, 0};
  tied.p = {0.3, 0.3, 0.3, 0.3, 0.3};
  CHECK(*auprc(tied) == doctest::Approx(0.4).epsilon(1e-15));  // prevalence

  PredictionSet nopos;
  nopos.y = {0, 0};
  nopos.p = {0.1, 0.9};
  CHECK(!auprc(nopos).has_value());
}

TEST_CASE("calibration slope recovers the recalibration truth") {
  // logits L ~ N(0, 1.5^2), y ~ Bernoulli(invlogit(L)): slope ~= 1
  const std::size_t n = 100000;
  Rng rng(10);
  PredictionSet ps, doubled;
  ps.y.resize(n);
  ps.p.resize(n);
  doubled.y.resize(n);
  doubled.p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double logit_k = 1.5 * rng.normal();
    const double pk = inv_logit(logit_k);
    const int yk = rng.uniform01() < pk ? 1 : 0;
    ps.y[k] = yk;
    ps.p[k] = pk;
    doubled.y[k] = yk;
    doubled.p[k] = inv_logit(2.0 * logit_k);
  }
  const double slope = *calibration_slope(ps);
  CHECK(slope > 0.95);
  CHECK(slope < 1.05);
  const double half = *calibration_slope(doubled);
  CHECK(half > 0.45);
  CHECK(half < 0.55);
}

TEST_CASE("calibration slope degeneracies") {
  PredictionSet constant;
  constant.y = {1, 0, 1};
  constant.p = {0.3, 0.3, 0.3};
  CHECK(!calibration_slope(constant).has_value());

  PredictionSet single;
  single.y = {1, 1};
  single.p = {0.2, 0.8};
  CHECK(!calibration_slope(single).has_value());
}

TEST_CASE("linear slope variant is plain least squares") {
  PredictionSet ps;
  ps.y = {0, 0, 1, 1};
  ps.p = {0.1, 0.3, 0.6, 0.8};
  // OLS slope of y on p: cov/var
  const double slope = *calibration_slope(ps, SlopeMethod::linear);
  CHECK(slope == doctest::Approx(1.7241379310344827).epsilon(1e-12));
}

TEST_CASE("calibration curve is exact on linear data with full span") {
  PredictionSet ps;
  ps.y.resize(10);
  ps.p.resize(10);
  std::vector<double> yv(10);
  for (std::size_t i = 0; i < 10; ++i) {
    ps.p[i] = 0.05 + 0.1 * static_cast<double>(i);
    yv[i] = 0.1 + 0.08 * static_cast<double>(i);  // linear trend inside [0,1]
  }
  // the smoother itself accepts non-binary responses
  const auto curve = loess_local_linear(ps.p, yv, 1.0);
  for (std::size_t i = 1; i + 1 < 10; ++i)
    CHECK(curve(ps.p[i]) == doctest::Approx(yv[i]).epsilon(1e-6));
}

TEST_CASE("calibration curve on constant outcomes") {
  PredictionSet ones;
  ones.y.assign(12, 1);
  ones.p = {0.1, 0.2, 0.3, 0.35, 0.4, 0.5, 0.55, 0.6, 0.7, 0.8, 0.85, 0.9};
  const auto curve = calibration_curve(ones, 0.75);
  for (double pk : ones.p) CHECK(curve(pk) == doctest::Approx(1.0).epsilon(1e-9));

  PredictionSet tiny;
  tiny.y = {1, 0};
  tiny.p = {0.2, 0.8};
  CHECK_THROWS(calibration_curve(tiny, 0.75));
  CHECK_THROWS(calibration_curve(ones, 1.5));
}

TEST_CASE("calibration curve tracks the truth on large calibrated data") {
  Rng rng(11);
  const auto ps = calibrated_set(100000, rng);
  const auto curve = calibration_curve(ps, 0.75);
  double worst = 0.0;
  for (double pk : ps.p) worst = std::max(worst, std::abs(curve(pk) - pk));
  CHECK(worst < 0.03);
}

TEST_CASE("ici on calibrated and shifted predictions") {
  Rng rng(12);
  const auto ps = calibrated_set(100000, rng);
  CHECK(*ici(ps) < 0.02);

  auto shifted = ps;
  for (auto& p : shifted.p) p = std::min(1.0, p + 0.1);
  const double drift = *ici(shifted);
  CHECK(std::abs(drift - 0.1) < 0.03);

  PredictionSet small;
  small.y = {1, 0};
  small.p = {0.2, 0.8};
  CHECK(!ici(small).has_value());

  Rng rng2(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rs = random_set(30, rng2);
    const double v = *ici(rs);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("full report composes the measures and marks undefined ones") {
  PredictionSet perfect;
  perfect.y = {1, 0, 1, 0};
  perfect.p = {1.0, 0.0, 1.0, 0.0};
  const auto rep = full_report(perfect);
  CHECK(*rep.brier == 0.0);
  CHECK(*rep.citl == 0.0);
  CHECK(*rep.auroc == 1.0);
  CHECK(!rep.ici.has_value());  // fewer than 10 points

  PredictionSet single;
  single.y = {1, 1, 1};
  single.p = {0.2, 0.5, 0.9};
  const auto rep2 = full_report(single);
  CHECK(!rep2.auroc.has_value());
  CHECK(rep2.brier.has_value());
  CHECK(!rep2.calibration_slope.has_value());

  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ps = random_set(12, rng);
    const auto r = full_report(ps);
    const auto terms = brier_decomposition(ps);
    CHECK(std::abs(*r.brier - (terms.calibration_term + terms.refinement_term)) <= 1e-12);
  }
}

TEST_CASE("prediction set validation") {
  PredictionSet bad;
  bad.y = {1, 2};
  bad.p = {0.5, 0.5};
  CHECK_THROWS(bad.validate());
  bad.y = {1, 0};
  bad.p = {0.5, 1.5};
  CHECK_THROWS(bad.validate());
  PredictionSet empty;
  CHECK_THROWS(empty.validate());
}

}  // TEST_SUITE
