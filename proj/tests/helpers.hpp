#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "stratvar/assignment.hpp"
#include "stratvar/pairing.hpp"
#include "stratvar/population.hpp"
#include "stratvar/rng.hpp"

namespace helpers {

// Constant-effect population: pairs {(2,0),(2,0)} and {(4,2),(4,2)}.
inline stratvar::FinitePopulation p0_population() {
  return stratvar::FinitePopulation({{2, 0, {0.0}},
                                     {2, 0, {0.25}},
                                     {4, 2, {0.75}},
                                     {4, 2, {1.0}}});
}

// Two matched pairs: A = {(3,1),(1,0)}, B = {(2,2),(0,1)}; stratum covariate
// means 0 and 1.
inline stratvar::FinitePopulation p1_population() {
  return stratvar::FinitePopulation({{3, 1, {0.0}},
                                     {1, 0, {0.0}},
                                     {2, 2, {1.0}},
                                     {0, 1, {1.0}}});
}

inline stratvar::Stratification two_pairs() {
  return stratvar::Stratification({{0, 1}, {2, 3}}, 1);
}

struct TinyInstance {
  stratvar::FinitePopulation pop;
  stratvar::Stratification strat;
};

// Random instance: outcomes uniform in [-5,5], scalar covariate in [0,1],
// strata a random partition into m blocks of size k.
inline TinyInstance random_instance(stratvar::Rng& rng, int m, int k, int ell) {
  const int n = m * k;
  std::vector<stratvar::Unit> units(n);
  for (auto& u : units) {
    u.y1 = 10.0 * rng.uniform01() - 5.0;
    u.y0 = 10.0 * rng.uniform01() - 5.0;
    u.x = {rng.uniform01()};
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::vector<int>> strata(m);
  for (int j = 0; j < m; ++j) {
    strata[j].assign(idx.begin() + j * k, idx.begin() + (j + 1) * k);
  }
  return TinyInstance{stratvar::FinitePopulation(std::move(units)),
                      stratvar::Stratification(std::move(strata), ell)};
}

inline stratvar::PairingPlan random_plan(stratvar::Rng& rng, int m) {
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (int i = m - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  return stratvar::PairingPlan(std::move(order));
}

inline stratvar::Matrix covariate_matrix(const stratvar::FinitePopulation& pop) {
  stratvar::Matrix x(pop.size(), pop.covariate_dim());
  for (int i = 0; i < pop.size(); ++i) {
    for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = pop.unit(i).x[c];
  }
  return x;
}

// Observed experiment with prescribed stratum effect estimates: stratum j is
// {2j, 2j+1} with the first unit treated, so delta_hat[j] = y[2j] - y[2j+1].
inline stratvar::ObservedExperiment observed_with_effects(const std::vector<double>& effects) {
  const int m = static_cast<int>(effects.size());
  std::vector<double> y(2 * m);
  stratvar::Assignment a;
  a.d.assign(2 * m, 0);
  std::vector<std::vector<int>> strata(m);
  for (int j = 0; j < m; ++j) {
    y[2 * j] = effects[j];
    y[2 * j + 1] = 0.0;
    a.d[2 * j] = 1;
    strata[j] = {2 * j, 2 * j + 1};
  }
  return stratvar::ObservedExperiment(std::move(y), std::move(a),
                                      stratvar::Matrix(2 * m, 0),
                                      stratvar::Stratification(std::move(strata), 1));
}

}  // namespace helpers
