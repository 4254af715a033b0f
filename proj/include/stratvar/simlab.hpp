#pragma once

#include <cstdint>
#include <vector>

#include "stratvar/estimators.hpp"
#include "stratvar/pairing.hpp"
#include "stratvar/population.hpp"
#include "stratvar/rng.hpp"

namespace stratvar {

enum class DgpModel { model1 = 1, model2 = 2 };

/// Potential-outcome law: Y(d) = mu_d + mu_d(x) + eps_d with x ~ U[0,1] and
/// standard normal noise. Model 1 has linear mean shifts, model 2 quadratic.
struct DgpSpec {
  DgpModel model = DgpModel::model1;

  static constexpr double mu1 = 0.25;
  static constexpr double mu0 = 0.0;

  /// Noise-free conditional mean mu_d + mu_d(x).
  double mean(int d, double x) const;
};

struct SimConfig {
  DgpSpec dgp;
  int population_size = 1000;
  std::uint64_t master_seed = 0;
  int replications = 5000;
  double alpha = 0.05;
  MatchMethod match_method = MatchMethod::good;
  std::vector<EstimatorKind> estimators = {EstimatorKind::paired, EstimatorKind::imai,
                                           EstimatorKind::fogarty, EstimatorKind::alt};
  int threads = 1;
};

struct EstimatorSummary {
  double coverage = 0.0;
  double avg_length = 0.0;
  double mean_variance = 0.0;    ///< Monte Carlo mean of the variance estimates
  double mc_se_coverage = 0.0;   ///< sqrt(c(1-c)/replications)
};

struct SimReport {
  std::vector<std::pair<EstimatorKind, EstimatorSummary>> estimators;
  double delta_n = 0.0;          ///< fixed ATE of the realized population
  double mc_se_coverage = 0.0;   ///< worst-case bound sqrt(0.25/replications)
  int replications = 0;
};

FinitePopulation generate_population(const DgpSpec& dgp, int n, Rng& rng);
FinitePopulation generate_population(const DgpSpec& dgp, int n, std::uint64_t seed);

/// Uniformly random n_sub-subset, drawn once; original unit order preserved.
FinitePopulation subsample(const FinitePopulation& pop, int n_sub, Rng& rng);
FinitePopulation subsample(const FinitePopulation& pop, int n_sub, std::uint64_t seed);

/// Coverage/length experiment: the population is drawn once from substream
/// (master_seed, 0) — sizes below 1000 subsample the fixed size-1000
/// population, mirroring the way the repeated-sampling populations are held
/// fixed — then each replication r redraws the assignment from substream
/// (master_seed, r). Replications are embarrassingly parallel; the reduction
/// is sequential so reports do not depend on the thread count.
SimReport run_monte_carlo(const SimConfig& cfg);

/// Same experiment on an externally supplied population (the DGP fields of
/// cfg are ignored).
SimReport run_monte_carlo(const SimConfig& cfg, const FinitePopulation& pop);

/// Limits of n * E[estimator] under the model DGP, scaled per the limiting
/// thought experiment: v is the limit of n Var[Delta_hat], v_obs the paired
/// estimator's limit, v_im and v_f the respective competitor limits.
struct LimitSummary {
  double v = 0.0;
  double v_obs = 0.0;
  double v_im = 0.0;
  double v_f = 0.0;
};

LimitSummary analytic_limits(const DgpSpec& dgp, double eta = 0.5, int k = 2);

}  // namespace stratvar
