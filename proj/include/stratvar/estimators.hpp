#pragma once

#include <string>
#include <vector>

#include "stratvar/assignment.hpp"
#include "stratvar/matrix.hpp"
#include "stratvar/normal.hpp"
#include "stratvar/pairing.hpp"

namespace stratvar {

enum class EstimatorKind { paired, imai, fogarty, coarse, alt };

const char* estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

/// Stratum-level difference-in-means estimates and their average.
struct StratumEffects {
  std::vector<double> delta_hat;  ///< per-stratum estimates
  double overall = 0.0;           ///< overall ATE estimate (mean of delta_hat)
};

struct VarianceEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::paired;
  double max_leverage = 0.0;  ///< fogarty only; 0 otherwise
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.0;
  bool clamped = false;  ///< a negative variance was clamped to zero
};

StratumEffects diff_in_means(const ObservedExperiment& obs);

/// Paired-strata estimator (tau^2 - kappa)/m: tau^2 averages the squared
/// stratum effects over all m strata, kappa cross-multiplies effects within
/// the plan's floor(m/2) pairs. Nonnegative by construction.
VarianceEstimate var_paired(const ObservedExperiment& obs, const PairingPlan& plan);

/// Sample variance of the stratum-level effect estimates, divided by m.
VarianceEstimate var_imai(const ObservedExperiment& obs);

/// Leverage-rescaled projection residual form of the stratum effects against
/// an m x L design of full column rank.
VarianceEstimate var_fogarty(const ObservedExperiment& obs, const Matrix& design);

/// Default design [1 | Xbar_j - mu_X]; requires covariates.
Matrix fogarty_default_design(const ObservedExperiment& obs);
Matrix fogarty_design(const Stratification& strat, const Matrix& x);

/// Within-stratum arm-wise sample variances; needs at least two units per arm.
VarianceEstimate var_coarse(const ObservedExperiment& obs);

/// Cross-stratum product estimator of the observed-variance bound; may be
/// negative.
VarianceEstimate var_alt(const ObservedExperiment& obs, const PairingPlan& plan);

/// Normal interval centered at the overall effect estimate. A negative
/// variance is clamped to zero here (and only here) with the clamped flag set.
ConfidenceInterval confidence_interval(const StratumEffects& effects,
                                       const VarianceEstimate& v, double alpha);

/// v' D^{-1/2} (I - H) D^{-1/2} v for H the projection onto the design's
/// column space and D = diag(I - H). Shared by the estimator and its
/// closed-form bias. Reports the largest leverage via max_leverage_out.
double projection_residual_form(const Matrix& design, const std::vector<double>& v,
                                double* max_leverage_out);

}  // namespace stratvar
