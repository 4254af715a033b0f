#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "stratvar/assignment.hpp"
#include "stratvar/estimators.hpp"
#include "stratvar/pairing.hpp"
#include "stratvar/population.hpp"

namespace stratvar {

/// Exact mean and variance of a statistic under the uniform assignment law.
struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
  std::uint64_t support_size = 0;
};

/// Within-stratum population spreads (denominator k-1).
struct StratumSpreads {
  std::vector<double> s2_1;      ///< S_j^2(1)
  std::vector<double> s2_0;      ///< S_j^2(0)
  std::vector<double> s2_delta;  ///< S_{j,Delta}^2
};

enum class OracleStatistic { delta_hat, paired, imai, fogarty, coarse, alt };

const char* oracle_statistic_name(OracleStatistic s);
OracleStatistic oracle_statistic_from_name(const std::string& name);

StratumSpreads stratum_spreads(const FinitePopulation& pop, const Stratification& strat);

/// Closed-form design variance of the difference-in-means estimator.
double exact_variance(const FinitePopulation& pop, const Stratification& strat);

/// Exact moments of an arbitrary statistic of the observed data, by full
/// enumeration of the assignment support. Statistics reuse the estimators
/// module verbatim; the estimand evaluation is the production code path.
ExactMoments exact_moments_of(const FinitePopulation& pop, const Stratification& strat,
                              const std::function<double(const ObservedExperiment&)>& statistic,
                              std::uint64_t cap = kDefaultEnumerationCap);

/// design is used by the fogarty statistic only; pass nullptr for the default
/// design built from the population covariates.
ExactMoments exact_moments(const FinitePopulation& pop, const Stratification& strat,
                           const PairingPlan& plan, OracleStatistic statistic,
                           const Matrix* design = nullptr,
                           std::uint64_t cap = kDefaultEnumerationCap);

/// Closed-form bias of the paired-strata estimator: mean squared gap of the
/// true stratum ATEs across the plan's pairs, plus (odd m) the unpaired
/// stratum's squared ATE, all over m^2. Reduces to the floor(m/2)-pair sum
/// for even m.
double bias_paired(const FinitePopulation& pop, const Stratification& strat,
                   const PairingPlan& plan);

double bias_imai(const FinitePopulation& pop, const Stratification& strat);

double bias_fogarty(const FinitePopulation& pop, const Stratification& strat,
                    const Matrix& design);

/// (1/(nm)) sum_j S_{j,Delta}^2 — bias of the coarse arm-variance estimator.
double bias_coarse(const FinitePopulation& pop, const Stratification& strat);

struct CorollaryCheck {
  bool holds = false;  ///< paired bias <= imai bias (ties count as holding)
  double lhs = 0.0;    ///< (1/m) sum_pairs (Delta_a - Delta_n)(Delta_b - Delta_n)
  double rhs = 0.0;    ///< -(1/(2m(m-1))) sum_j (Delta_j - Delta_n)^2
};

/// Relative-bias condition for the paired vs imai estimators. holds is
/// computed from the closed-form bias comparison, which coincides with
/// lhs >= rhs for even m.
CorollaryCheck corollary_condition(const FinitePopulation& pop, const Stratification& strat,
                                   const PairingPlan& plan);

}  // namespace stratvar
