#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <set>
#include <vector>

#include "ppm/numeric.hpp"
#include "ppm/rng.hpp"
#include "ppm/simgen.hpp"
#include "ppm/validator.hpp"

using namespace ppm;

namespace {

Dataset small_sim(long long n, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  return generate_dataset(cfg);
}

bool same_interval(const ConfidenceInterval& a, const ConfidenceInterval& b) {
  return a.point == b.point && a.se == b.se && a.lower == b.lower && a.upper == b.upper &&
         a.method == b.method;
}

}  // namespace

TEST_SUITE("validator") {

TEST_CASE("bca interval with symmetric replicates reduces to percentile") {
  const std::vector<double> reps{1, 2, 3, 4, 5};
  const std::vector<double> jack{1, 2, 3, 4, 5};  // symmetric: acceleration 0
  const auto ci = bca_interval(reps, jack, 3.0, 0.95);
  CHECK(ci.method == IntervalMethod::bca);
  CHECK(ci.lower == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(ci.upper == doctest::Approx(4.9).epsilon(1e-15));
  CHECK(ci.se == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(ci.point == 3.0);

  // identical to the plain percentile endpoints, exactly
  std::vector<double> sorted = reps;
  CHECK(ci.lower == quantile_type7(sorted, 0.025));
  CHECK(ci.upper == quantile_type7(sorted, 0.975));
}

TEST_CASE("bca interval degenerate and fallback paths") {
  const std::vector<double> same(12, 7.0);
  const auto ci = bca_interval(same, {}, 7.0, 0.95);
  CHECK(ci.lower == 7.0);
  CHECK(ci.upper == 7.0);
  CHECK(ci.method == IntervalMethod::percentile_fallback);

  // point outside the replicate range: bias correction is infinite
  const std::vector<double> reps{1, 2, 3, 4, 5};
  const auto out = bca_interval(reps, {}, 9.0, 0.95);
  CHECK(out.method == IntervalMethod::percentile_fallback);
  CHECK(out.lower == doctest::Approx(1.1));
  CHECK(out.upper == doctest::Approx(4.9));

  CHECK_THROWS(bca_interval(std::vector<double>{1.0}, {}, 1.0, 0.95));
  CHECK_THROWS(bca_interval(reps, {}, 3.0, 1.5));
}

TEST_CASE("bca interval is ordered and shifts with skewed jackknife values") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> reps(30), jack(20);
    for (auto& v : reps) v = rng.normal();
    for (auto& v : jack) v = rng.normal() * rng.uniform01();
    const double point = reps[trial % reps.size()];
    const auto ci = bca_interval(reps, jack, point, 0.9);
    CHECK(ci.lower <= ci.upper);
    CHECK(ci.se >= 0.0);
  }
}

TEST_CASE("bootstrap replicates are deterministic in their seed") {
  const Dataset holdout = small_sim(150, 51);
  ValidationConfig cfg;
  cfg.p_optimal = 1.0;
  cfg.b_replicates = 2;
  const auto a = run_bootstrap_replicate(holdout, cfg, 9001);
  const auto b = run_bootstrap_replicate(holdout, cfg, 9001);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(*a->brier == *b->brier);
  CHECK(*a->auroc == *b->auroc);
  CHECK(a->n == b->n);

  const auto c = run_bootstrap_replicate(holdout, cfg, 9002);
  REQUIRE(c.has_value());
  CHECK(*a->brier != *c->brier);
}

TEST_CASE("external validation smoke run with B = 2") {
  const Dataset holdout = small_sim(120, 52);
  ValidationConfig cfg;
  cfg.p_optimal = 0.5;
  cfg.b_replicates = 2;
  cfg.seed = 77;
  const auto report = external_validate(holdout, cfg);
  CHECK(report.b_replicates == 2);
  CHECK(report.measures.size() == report_measure_names().size());
  for (const auto& mv : report.measures) {
    if (!mv.interval) continue;
    CHECK(mv.interval->lower <= mv.interval->upper);
    CHECK(mv.interval->se >= 0.0);
  }
}

TEST_CASE("citl interval sits near its point on calibrated data") {
  const Dataset holdout = small_sim(400, 53);
  ValidationConfig cfg;
  cfg.p_optimal = 1.0;
  cfg.b_replicates = 60;
  cfg.seed = 99;
  const auto report = external_validate(holdout, cfg, 2);
  for (const auto& mv : report.measures) {
    if (mv.measure != "citl") continue;
    REQUIRE(mv.interval.has_value());
    CHECK(mv.interval->lower <= mv.interval->point + 2.0 * mv.interval->se);
  }
}

TEST_CASE("validation reports are reproducible across worker counts") {
  const Dataset holdout = small_sim(150, 54);
  ValidationConfig cfg;
  cfg.p_optimal = 0.8;
  cfg.b_replicates = 12;
  cfg.seed = 4;
  const auto serial = external_validate(holdout, cfg, 1);
  const auto threaded = external_validate(holdout, cfg, 2);
  REQUIRE(serial.measures.size() == threaded.measures.size());
  CHECK(serial.n_failed_replicates == threaded.n_failed_replicates);
  for (std::size_t mi = 0; mi < serial.measures.size(); ++mi) {
    const auto& a = serial.measures[mi];
    const auto& b = threaded.measures[mi];
    CHECK(a.n_values == b.n_values);
    CHECK(a.interval.has_value() == b.interval.has_value());
    if (a.interval) CHECK(same_interval(*a.interval, *b.interval));
  }
}

TEST_CASE("unstable validation raises") {
  // single-class holdout: every bootstrap replicate fails its class checks
  Dataset holdout = small_sim(60, 55);
  for (auto& y : holdout.outcomes) y = 1;
  ValidationConfig cfg;
  cfg.p_optimal = 1.0;
  cfg.b_replicates = 10;
  CHECK_THROWS_WITH_AS(external_validate(holdout, cfg),
                       doctest::Contains("validation unstable"), std::runtime_error);
}

TEST_CASE("bca coverage smoke check for the mean of normal draws") {
  // small version of the classic coverage study
  Rng rng(314);
  const int replications = 100;
  const int b = 199;
  int covered = 0;
  for (int rep = 0; rep < replications; ++rep) {
    std::vector<double> sample(50);
    for (auto& v : sample) v = rng.normal();
    double mean = 0;
    for (double v : sample) mean += v;
    mean /= 50.0;

    std::vector<double> boots(b);
    for (int i = 0; i < b; ++i) {
      double s = 0;
      for (int k = 0; k < 50; ++k) s += sample[rng.below(50)];
      boots[i] = s / 50.0;
    }
    std::vector<double> jack(50);
    for (int k = 0; k < 50; ++k) jack[k] = (50.0 * mean - sample[k]) / 49.0;
    const auto ci = bca_interval(boots, jack, mean, 0.95);
    if (ci.lower <= 0.0 && 0.0 <= ci.upper) ++covered;
  }
  CHECK(covered >= 85);
  CHECK(covered <= 100);
}

TEST_CASE("validation config validation") {
  ValidationConfig cfg;
  cfg.b_replicates = 1;
  CHECK_THROWS(cfg.validate());
  cfg = ValidationConfig{};
  cfg.p_optimal = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = ValidationConfig{};
  cfg.inner_split = 1.0;
  CHECK_THROWS(cfg.validate());
}

}  // TEST_SUITE
