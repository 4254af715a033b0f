#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "stratvar/normal.hpp"
#include "stratvar/simlab.hpp"

using namespace stratvar;

TEST_CASE("model mean functions at reference points") {
  DgpSpec model1{DgpModel::model1};
  CHECK(model1.mean(1, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(model1.mean(0, 0.5) == doctest::Approx(0.0).epsilon(1e-14));

  DgpSpec model2{DgpModel::model2};
  CHECK(model2.mean(0, 0.0) == doctest::Approx(-160.0 / 3.0).epsilon(1e-14));
  CHECK(model2.mean(1, 0.0) == doctest::Approx(0.25 - 40.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("generated populations are deterministic in the seed") {
  const DgpSpec dgp{DgpModel::model1};
  const FinitePopulation a = generate_population(dgp, 200, 77);
  const FinitePopulation b = generate_population(dgp, 200, 77);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.unit(i).y1 == b.unit(i).y1);
    CHECK(a.unit(i).y0 == b.unit(i).y0);
    CHECK(a.unit(i).x == b.unit(i).x);
  }
  const FinitePopulation c = generate_population(dgp, 200, 78);
  bool differs = false;
  for (int i = 0; i < 200 && !differs; ++i) differs = a.unit(i).y1 != c.unit(i).y1;
  CHECK(differs);
}

TEST_CASE("the generated effect mean matches the model") {
  const DgpSpec dgp{DgpModel::model1};
  const int n = 1000000;
  const FinitePopulation pop = generate_population(dgp, n, 123);
  double mean = 0.0;
  for (const Unit& u : pop.units()) mean += u.y1 - u.y0;
  mean /= n;
  // Var(effect) = 100 Var(X) + 2
  const double se = std::sqrt((100.0 / 12.0 + 2.0) / n);
  CHECK(std::abs(mean - 0.25) <= 4.0 * se);
}

TEST_CASE("covariates land in the unit interval") {
  const FinitePopulation pop = generate_population(DgpSpec{DgpModel::model2}, 5000, 9);
  for (const Unit& u : pop.units()) {
    CHECK(u.x[0] >= 0.0);
    CHECK(u.x[0] < 1.0);
  }
}

TEST_CASE("subsampling the full population is the identity up to order") {
  const FinitePopulation pop = generate_population(DgpSpec{DgpModel::model1}, 50, 5);
  const FinitePopulation sub = subsample(pop, 50, 11);
  REQUIRE(sub.size() == 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(sub.unit(i).y1 == pop.unit(i).y1);  // order preserved by construction
  }
}

TEST_CASE("subsamples are fixed by the seed and drawn from the support") {
  const FinitePopulation pop = generate_population(DgpSpec{DgpModel::model1}, 4, 5);
  const FinitePopulation a = subsample(pop, 2, 21);
  const FinitePopulation b = subsample(pop, 2, 21);
  REQUIRE(a.size() == 2);
  CHECK(a.unit(0).y1 == b.unit(0).y1);
  CHECK(a.unit(1).y1 == b.unit(1).y1);
  // the two selected units are distinct members of the population
  std::set<double> originals;
  for (const Unit& u : pop.units()) originals.insert(u.y1);
  CHECK(originals.count(a.unit(0).y1) == 1);
  CHECK(originals.count(a.unit(1).y1) == 1);
  CHECK(a.unit(0).y1 != a.unit(1).y1);
}

TEST_CASE("oversized subsamples are rejected") {
  const FinitePopulation pop = generate_population(DgpSpec{DgpModel::model1}, 10, 5);
  CHECK_THROWS_WITH_AS(subsample(pop, 11, 1), doctest::Contains("TooLarge"), DomainError);
}

TEST_CASE("analytic limits for both models") {
  const LimitSummary m1 = analytic_limits(DgpSpec{DgpModel::model1});
  CHECK(m1.v_obs == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(m1.v == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m1.v_im == doctest::Approx(62.0 / 3.0).epsilon(1e-14));
  CHECK(m1.v_f == doctest::Approx(4.0).epsilon(1e-14));

  const LimitSummary m2 = analytic_limits(DgpSpec{DgpModel::model2});
  CHECK(m2.v_obs == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(m2.v == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m2.v_im == doctest::Approx(164.0).epsilon(1e-14));
  CHECK(m2.v_f == doctest::Approx(14.0).epsilon(1e-14));

  for (const LimitSummary& lim : {m1, m2}) {
    CHECK(lim.v <= lim.v_obs);
    CHECK(lim.v_obs <= lim.v_f);
    CHECK(lim.v_f <= lim.v_im);
  }
}

TEST_CASE("analytic limits track eta and k") {
  const LimitSummary lim = analytic_limits(DgpSpec{DgpModel::model1}, 0.25, 4);
  CHECK(lim.v_obs == doctest::Approx(4.0 + 4.0 / 3.0).epsilon(1e-13));
  CHECK(lim.v == doctest::Approx(lim.v_obs - 2.0).epsilon(1e-13));
  CHECK(lim.v_im == doctest::Approx(lim.v_obs + 4.0 * 100.0 / 12.0).epsilon(1e-13));
  CHECK(lim.v_f == doctest::Approx(lim.v_obs).epsilon(1e-13));
}

TEST_CASE("a population with no outcome variation gives degenerate intervals") {
  std::vector<Unit> units;
  for (int i = 0; i < 20; ++i) {
    units.push_back({1.0, 1.0, {static_cast<double>(i) / 20.0}});
  }
  SimConfig cfg;
  cfg.replications = 50;
  cfg.master_seed = 3;
  const SimReport report = run_monte_carlo(cfg, FinitePopulation(units));
  CHECK(report.delta_n == doctest::Approx(0.0).epsilon(1e-14));
  for (const auto& [kind, summary] : report.estimators) {
    (void)kind;
    CHECK(summary.coverage == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(summary.avg_length == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("reports are reproducible and independent of the thread count") {
  SimConfig cfg;
  cfg.dgp.model = DgpModel::model1;
  cfg.population_size = 100;
  cfg.master_seed = 99;
  cfg.replications = 80;
  const SimReport a = run_monte_carlo(cfg);
  const SimReport b = run_monte_carlo(cfg);
  cfg.threads = 2;
  const SimReport c = run_monte_carlo(cfg);
  REQUIRE(a.estimators.size() == b.estimators.size());
  REQUIRE(a.estimators.size() == c.estimators.size());
  for (std::size_t e = 0; e < a.estimators.size(); ++e) {
    CHECK(a.estimators[e].second.coverage == b.estimators[e].second.coverage);
    CHECK(a.estimators[e].second.avg_length == b.estimators[e].second.avg_length);
    CHECK(a.estimators[e].second.coverage == c.estimators[e].second.coverage);
    CHECK(a.estimators[e].second.avg_length == c.estimators[e].second.avg_length);
  }
}

TEST_CASE("changing the replication count never changes the population") {
  SimConfig cfg;
  cfg.population_size = 100;
  cfg.master_seed = 31;
  cfg.replications = 10;
  const SimReport a = run_monte_carlo(cfg);
  cfg.replications = 30;
  const SimReport b = run_monte_carlo(cfg);
  CHECK(a.delta_n == b.delta_n);
}

TEST_CASE("average interval length is consistent with the mean variance") {
  SimConfig cfg;
  cfg.dgp.model = DgpModel::model1;
  cfg.population_size = 1000;
  cfg.master_seed = 7;
  cfg.replications = 300;
  cfg.estimators = {EstimatorKind::paired};
  const SimReport report = run_monte_carlo(cfg);
  const EstimatorSummary& s = report.estimators[0].second;
  const double predicted = 2.0 * normal_quantile(0.975) * std::sqrt(s.mean_variance);
  CHECK(std::abs(s.avg_length - predicted) < 0.01 * predicted);
}

TEST_CASE("subsampled simulations share the fixed size-1000 population draw") {
  SimConfig cfg;
  cfg.population_size = 500;
  cfg.master_seed = 13;
  cfg.replications = 5;
  const SimReport sub = run_monte_carlo(cfg);

  // rebuild the population flow by hand
  Rng stream = Rng::substream(13, 0);
  const FinitePopulation base = generate_population(cfg.dgp, 1000, stream);
  const FinitePopulation drawn = subsample(base, 500, stream);
  double ate = 0.0;
  for (const Unit& u : drawn.units()) ate += u.y1 - u.y0;
  ate /= drawn.size();
  CHECK(sub.delta_n == doctest::Approx(ate).epsilon(1e-14));
}
