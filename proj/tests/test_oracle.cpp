#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "stratvar/oracle.hpp"

using namespace stratvar;

TEST_CASE("closed-form variance on P1 and P0") {
  CHECK(exact_variance(helpers::p1_population(), helpers::two_pairs()) ==
        doctest::Approx(1.125).epsilon(1e-13));
  CHECK(exact_variance(helpers::p0_population(), helpers::two_pairs()) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("perfect negative dependence cancels the variance") {
  const FinitePopulation pop({{1, 0, {}}, {0, 1, {}}});
  const Stratification strat({{0, 1}}, 1);
  CHECK(exact_variance(pop, strat) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("enumeration reproduces the closed-form moments on P1") {
  const FinitePopulation pop = helpers::p1_population();
  const Stratification strat = helpers::two_pairs();
  const PairingPlan plan = PairingPlan::identity(2);

  const ExactMoments delta = exact_moments(pop, strat, plan, OracleStatistic::delta_hat);
  CHECK(delta.support_size == 4);
  CHECK(delta.mean == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(delta.variance == doctest::Approx(1.125).epsilon(1e-13));

  const ExactMoments paired = exact_moments(pop, strat, plan, OracleStatistic::paired);
  CHECK(paired.mean == doctest::Approx(2.125).epsilon(1e-13));

  const ExactMoments imai = exact_moments(pop, strat, plan, OracleStatistic::imai);
  CHECK(imai.mean == doctest::Approx(2.125).epsilon(1e-13));
}

TEST_CASE("paired bias on P1 and invariances") {
  const FinitePopulation pop = helpers::p1_population();
  const Stratification strat = helpers::two_pairs();
  CHECK(bias_paired(pop, strat, PairingPlan::identity(2)) ==
        doctest::Approx(1.0).epsilon(1e-13));
  // swapping within a pair leaves the squared difference unchanged
  CHECK(bias_paired(pop, strat, PairingPlan({1, 0})) == doctest::Approx(1.0).epsilon(1e-13));
  // equal stratum ATEs -> no bias
  CHECK(bias_paired(helpers::p0_population(), strat, PairingPlan::identity(2)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("imai bias on P1 and for equal stratum effects") {
  CHECK(bias_imai(helpers::p1_population(), helpers::two_pairs()) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(bias_imai(helpers::p0_population(), helpers::two_pairs()) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("with two strata the paired and imai biases coincide") {
  Rng rng(661);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const int ell = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k) - 1));
    const auto inst = helpers::random_instance(rng, 2, k, ell);
    const double paired = bias_paired(inst.pop, inst.strat, PairingPlan::identity(2));
    const double imai = bias_imai(inst.pop, inst.strat);
    CHECK(paired == doctest::Approx(imai).epsilon(1e-12));
  }
}

TEST_CASE("fogarty bias with a ones design equals the imai bias") {
  Rng rng(662);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const auto inst = helpers::random_instance(rng, m, 2, 1);
    const double f = bias_fogarty(inst.pop, inst.strat, Matrix::column_of_ones(m));
    const double im = bias_imai(inst.pop, inst.strat);
    CHECK(std::abs(f - im) < 1e-12);
  }
}

TEST_CASE("linear stratum effects leave only the leverage-rescaling fogarty bias") {
  // Stratum ATEs exactly linear in the stratum means are annihilated up to
  // the diag(I-H)^{-1/2} rescaling: a small positive bias at m=4 that decays
  // with m, always well below the imai bias.
  const auto linear_population = [](int m) {
    std::vector<Unit> units;
    for (int j = 0; j < m; ++j) {
      units.push_back({static_cast<double>(j), 0.0, {static_cast<double>(j)}});
      units.push_back({static_cast<double>(j), 0.0, {static_cast<double>(j)}});
    }
    std::vector<std::vector<int>> strata(m);
    for (int j = 0; j < m; ++j) strata[j] = {2 * j, 2 * j + 1};
    return std::pair(FinitePopulation(units), Stratification(strata, 1));
  };

  const auto [pop4, strat4] = linear_population(4);
  const double bias4 =
      bias_fogarty(pop4, strat4, fogarty_design(strat4, helpers::covariate_matrix(pop4)));
  CHECK(bias4 > 0.0);
  CHECK(bias4 < 0.2 * bias_imai(pop4, strat4));

  const auto [pop100, strat100] = linear_population(100);
  const double bias100 = bias_fogarty(pop100, strat100,
                                      fogarty_design(strat100, helpers::covariate_matrix(pop100)));
  CHECK(bias100 < 0.01 * bias_imai(pop100, strat100));
}

TEST_CASE("two strata with the default design sit at leverage one") {
  const FinitePopulation pop = helpers::p1_population();
  const Stratification strat = helpers::two_pairs();
  const Matrix design = fogarty_design(strat, helpers::covariate_matrix(pop));
  CHECK_THROWS_WITH_AS(bias_fogarty(pop, strat, design), doctest::Contains("LeverageOne"),
                       DomainError);
}

TEST_CASE("corollary condition on P1 is at the boundary and holds") {
  const CorollaryCheck check =
      corollary_condition(helpers::p1_population(), helpers::two_pairs(),
                          PairingPlan::identity(2));
  CHECK(check.lhs == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(check.rhs == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(check.holds);
}

TEST_CASE("corollary condition for equal stratum effects holds trivially") {
  const CorollaryCheck check =
      corollary_condition(helpers::p0_population(), helpers::two_pairs(),
                          PairingPlan::identity(2));
  CHECK(check.lhs == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(check.rhs == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(check.holds);
}

TEST_CASE("corollary condition flips with the pairing of dissimilar strata") {
  // stratum ATEs 0,0,10,10
  std::vector<Unit> units;
  const double ates[4] = {0, 0, 10, 10};
  for (int j = 0; j < 4; ++j) {
    units.push_back({ates[j], 0.0, {0.1 * j}});
    units.push_back({ates[j] + 1.0, 1.0, {0.1 * j}});
  }
  const FinitePopulation pop(units);
  const Stratification strat({{0, 1}, {2, 3}, {4, 5}, {6, 7}}, 1);

  const PairingPlan similar({0, 1, 2, 3});
  const CorollaryCheck good = corollary_condition(pop, strat, similar);
  CHECK(good.holds);
  CHECK(good.lhs > good.rhs);
  CHECK(bias_paired(pop, strat, similar) < bias_imai(pop, strat));

  const PairingPlan crossed({0, 2, 1, 3});
  const CorollaryCheck bad = corollary_condition(pop, strat, crossed);
  CHECK_FALSE(bad.holds);
  CHECK(bad.lhs < bad.rhs);
  CHECK(bias_paired(pop, strat, crossed) > bias_imai(pop, strat));

  // both verdicts agree with the enumerated bias gap
  const double variance = exact_variance(pop, strat);
  const double paired_gap =
      exact_moments(pop, strat, crossed, OracleStatistic::paired).mean - variance;
  const double imai_gap =
      exact_moments(pop, strat, crossed, OracleStatistic::imai).mean - variance;
  CHECK(paired_gap > imai_gap);
}

TEST_CASE("enumerated bias identities hold on random tiny instances") {
  Rng rng(663);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const int k = 2 + static_cast<int>(rng.below(3));
    const int ell = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k) - 1));
    const auto inst = helpers::random_instance(rng, m, k, ell);
    const PairingPlan plan = helpers::random_plan(rng, m);

    const ExactMoments delta =
        exact_moments(inst.pop, inst.strat, plan, OracleStatistic::delta_hat);
    const double truth = estimands(inst.pop, inst.strat).ate;
    const double variance = exact_variance(inst.pop, inst.strat);
    CHECK(std::abs(delta.mean - truth) < 1e-12);
    CHECK(std::abs(delta.variance - variance) < 1e-12);

    const ExactMoments paired =
        exact_moments(inst.pop, inst.strat, plan, OracleStatistic::paired);
    CHECK(std::abs(paired.mean - variance - bias_paired(inst.pop, inst.strat, plan)) < 1e-12);

    const ExactMoments imai = exact_moments(inst.pop, inst.strat, plan, OracleStatistic::imai);
    CHECK(std::abs(imai.mean - variance - bias_imai(inst.pop, inst.strat)) < 1e-12);

    if (std::min(ell, k - ell) >= 2) {
      const ExactMoments coarse =
          exact_moments(inst.pop, inst.strat, plan, OracleStatistic::coarse);
      CHECK(std::abs(coarse.mean - variance - bias_coarse(inst.pop, inst.strat)) < 1e-12);
    }
  }
}

TEST_CASE("alternative estimator bias takes both signs") {
  Rng rng(664);
  bool seen_positive = false;
  bool seen_negative = false;
  for (int trial = 0; trial < 60 && !(seen_positive && seen_negative); ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const auto inst = helpers::random_instance(rng, m, 2, 1);
    const PairingPlan plan = helpers::random_plan(rng, m);
    const double gap = exact_moments(inst.pop, inst.strat, plan, OracleStatistic::alt).mean -
                       exact_variance(inst.pop, inst.strat);
    if (gap > 1e-9) seen_positive = true;
    if (gap < -1e-9) seen_negative = true;
  }
  CHECK(seen_positive);
  CHECK(seen_negative);
}

TEST_CASE("enumeration respects the support cap") {
  const auto inst = [] {
    Rng rng(665);
    return helpers::random_instance(rng, 3, 2, 1);
  }();
  CHECK_THROWS_WITH_AS(
      exact_moments(inst.pop, inst.strat, PairingPlan::identity(3), OracleStatistic::imai,
                    nullptr, 7),
      doctest::Contains("SupportTooLarge"), DomainError);
}

TEST_CASE("stratum spreads are nonnegative") {
  Rng rng(666);
  const auto inst = helpers::random_instance(rng, 4, 3, 1);
  const StratumSpreads spreads = stratum_spreads(inst.pop, inst.strat);
  for (int j = 0; j < 4; ++j) {
    CHECK(spreads.s2_1[j] >= 0.0);
    CHECK(spreads.s2_0[j] >= 0.0);
    CHECK(spreads.s2_delta[j] >= 0.0);
  }
}
