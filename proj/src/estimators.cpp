#include "stratvar/estimators.hpp"

#include <cmath>
#include <string>

#include "stratvar/errors.hpp"

namespace stratvar {

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::paired: return "paired";
    case EstimatorKind::imai: return "imai";
    case EstimatorKind::fogarty: return "fogarty";
    case EstimatorKind::coarse: return "coarse";
    case EstimatorKind::alt: return "alt";
  }
  return "unknown";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "paired") return EstimatorKind::paired;
  if (name == "imai") return EstimatorKind::imai;
  if (name == "fogarty") return EstimatorKind::fogarty;
  if (name == "coarse") return EstimatorKind::coarse;
  if (name == "alt") return EstimatorKind::alt;
  throw DomainError(ErrorCode::ParseError, "unknown estimator '" + name + "'");
}

StratumEffects diff_in_means(const ObservedExperiment& obs) {
  const Stratification& strat = obs.strat();
  StratumEffects eff;
  eff.delta_hat.resize(strat.m());
  double total = 0.0;
  for (int j = 0; j < strat.m(); ++j) {
    double treated = 0.0;
    double control = 0.0;
    for (int idx : strat.stratum(j)) {
      if (obs.assignment().d[idx]) {
        treated += obs.y()[idx];
      } else {
        control += obs.y()[idx];
      }
    }
    eff.delta_hat[j] = treated / strat.ell() - control / (strat.k() - strat.ell());
    total += eff.delta_hat[j];
  }
  // With common stratum size and treated count, the overall difference in
  // means equals the average of the stratum-level estimates.
  eff.overall = total / strat.m();
  return eff;
}

namespace {

void require_pairable(const ObservedExperiment& obs, const PairingPlan& plan) {
  const int m = obs.strat().m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "pairing needs at least two strata");
  }
  if (plan.m() != m) {
    throw DomainError(ErrorCode::SizeMismatch, "plan covers " + std::to_string(plan.m()) +
                                                   " strata, data has " + std::to_string(m));
  }
}

}  // namespace

VarianceEstimate var_paired(const ObservedExperiment& obs, const PairingPlan& plan) {
  require_pairable(obs, plan);
  const StratumEffects eff = diff_in_means(obs);
  const int m = obs.strat().m();

  double tau_sq = 0.0;
  for (double d : eff.delta_hat) tau_sq += d * d;
  tau_sq /= m;

  double kappa = 0.0;
  for (int j = 0; j < plan.pair_count(); ++j) {
    const auto [a, b] = plan.pair(j);
    kappa += eff.delta_hat[a] * eff.delta_hat[b];
  }
  kappa *= 2.0 / m;

  VarianceEstimate out;
  out.kind = EstimatorKind::paired;
  out.value = (tau_sq - kappa) / m;
  // Nonnegative by algebra; shave off rounding residue.
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

VarianceEstimate var_imai(const ObservedExperiment& obs) {
  const int m = obs.strat().m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "imai estimator needs at least two strata");
  }
  const StratumEffects eff = diff_in_means(obs);
  double ss = 0.0;
  for (double d : eff.delta_hat) {
    const double c = d - eff.overall;
    ss += c * c;
  }
  VarianceEstimate out;
  out.kind = EstimatorKind::imai;
  out.value = ss / (static_cast<double>(m) * (m - 1));
  return out;
}

double projection_residual_form(const Matrix& design, const std::vector<double>& v,
                                double* max_leverage_out) {
  const int m = design.rows;
  const int cols = design.cols;
  if (static_cast<int>(v.size()) != m) {
    throw DomainError(ErrorCode::SizeMismatch, "design rows do not match vector length");
  }

  Matrix gram(cols, cols);
  for (int a = 0; a < cols; ++a) {
    for (int b = a; b < cols; ++b) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += design(i, a) * design(i, b);
      gram(a, b) = acc;
      gram(b, a) = acc;
    }
  }
  const LuFactors lu(gram, 1e-10);

  // Leverages h_jj = r_j' (R'R)^{-1} r_j, row by row; no m x m materialization.
  std::vector<double> row(cols);
  std::vector<double> scaled(m);
  double max_leverage = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < cols; ++c) row[c] = design(i, c);
    const std::vector<double> solved = lu.solve(row);
    double leverage = 0.0;
    for (int c = 0; c < cols; ++c) leverage += row[c] * solved[c];
    max_leverage = std::max(max_leverage, leverage);
    if (leverage > 1.0 - 1e-10) {
      throw DomainError(ErrorCode::LeverageOne,
                        "leverage " + std::to_string(leverage) + " at row " + std::to_string(i + 1));
    }
    scaled[i] = v[i] / std::sqrt(1.0 - leverage);
  }
  if (max_leverage_out != nullptr) *max_leverage_out = max_leverage;

  std::vector<double> rtu(cols, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < cols; ++c) rtu[c] += design(i, c) * scaled[i];
  }
  const std::vector<double> beta = lu.solve(rtu);

  // (I-H) is idempotent, so the quadratic form is the squared residual norm.
  double form = 0.0;
  for (int i = 0; i < m; ++i) {
    double fitted = 0.0;
    for (int c = 0; c < cols; ++c) fitted += design(i, c) * beta[c];
    const double resid = scaled[i] - fitted;
    form += resid * resid;
  }
  return form;
}

Matrix fogarty_design(const Stratification& strat, const Matrix& x) {
  if (x.cols == 0) {
    throw DomainError(ErrorCode::NoCovariates, "fogarty default design needs covariates");
  }
  const int m = strat.m();
  const int p = x.cols;
  std::vector<double> mu(p, 0.0);
  for (int i = 0; i < x.rows; ++i) {
    for (int c = 0; c < p; ++c) mu[c] += x(i, c);
  }
  for (int c = 0; c < p; ++c) mu[c] /= x.rows;

  Matrix design(m, 1 + p);
  for (int j = 0; j < m; ++j) {
    design(j, 0) = 1.0;
    for (int c = 0; c < p; ++c) {
      double mean = 0.0;
      for (int idx : strat.stratum(j)) mean += x(idx, c);
      design(j, 1 + c) = mean / strat.k() - mu[c];
    }
  }
  return design;
}

Matrix fogarty_default_design(const ObservedExperiment& obs) {
  return fogarty_design(obs.strat(), obs.x());
}

VarianceEstimate var_fogarty(const ObservedExperiment& obs, const Matrix& design) {
  const int m = obs.strat().m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "fogarty estimator needs at least two strata");
  }
  const StratumEffects eff = diff_in_means(obs);
  VarianceEstimate out;
  out.kind = EstimatorKind::fogarty;
  out.value = projection_residual_form(design, eff.delta_hat, &out.max_leverage) /
              (static_cast<double>(m) * m);
  return out;
}

VarianceEstimate var_coarse(const ObservedExperiment& obs) {
  const Stratification& strat = obs.strat();
  const int ell = strat.ell();
  const int rest = strat.k() - ell;
  if (ell < 2 || rest < 2) {
    throw DomainError(ErrorCode::SingletonArm,
                      "arm-wise sample variances need at least two units per arm");
  }
  double total = 0.0;
  for (int j = 0; j < strat.m(); ++j) {
    double sum1 = 0.0;
    double sum0 = 0.0;
    for (int idx : strat.stratum(j)) {
      (obs.assignment().d[idx] ? sum1 : sum0) += obs.y()[idx];
    }
    const double mean1 = sum1 / ell;
    const double mean0 = sum0 / rest;
    double ss1 = 0.0;
    double ss0 = 0.0;
    for (int idx : strat.stratum(j)) {
      const double y = obs.y()[idx];
      if (obs.assignment().d[idx]) {
        ss1 += (y - mean1) * (y - mean1);
      } else {
        ss0 += (y - mean0) * (y - mean0);
      }
    }
    total += ss1 / (ell - 1) / strat.eta() + ss0 / (rest - 1) / (1.0 - strat.eta());
  }
  VarianceEstimate out;
  out.kind = EstimatorKind::coarse;
  out.value = total / (static_cast<double>(strat.n()) * strat.m());
  return out;
}

VarianceEstimate var_alt(const ObservedExperiment& obs, const PairingPlan& plan) {
  require_pairable(obs, plan);
  const Stratification& strat = obs.strat();
  const int m = strat.m();
  const double n1 = static_cast<double>(m) * strat.ell();
  const double n0 = static_cast<double>(m) * (strat.k() - strat.ell());

  double sum1 = 0.0;
  double sum0 = 0.0;
  double sq1 = 0.0;
  double sq0 = 0.0;
  for (int i = 0; i < strat.n(); ++i) {
    const double y = obs.y()[i];
    if (obs.assignment().d[i]) {
      sum1 += y;
      sq1 += y * y;
    } else {
      sum0 += y;
      sq0 += y * y;
    }
  }
  const double mu1 = sum1 / n1;
  const double mu0 = sum0 / n0;
  const double sigma1 = sq1 / n1 - mu1 * mu1;
  const double sigma0 = sq0 / n0 - mu0 * mu0;

  // Cross-stratum products within plan pairs reduce to products of arm sums.
  double cross1 = 0.0;
  double cross0 = 0.0;
  std::vector<double> treated_sum(m, 0.0);
  std::vector<double> control_sum(m, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int idx : strat.stratum(j)) {
      (obs.assignment().d[idx] ? treated_sum[j] : control_sum[j]) += obs.y()[idx];
    }
  }
  for (int j = 0; j < plan.pair_count(); ++j) {
    const auto [a, b] = plan.pair(j);
    cross1 += treated_sum[a] * treated_sum[b];
    cross0 += control_sum[a] * control_sum[b];
  }
  const double varsigma1 = 2.0 * cross1 / m;
  const double varsigma0 = 2.0 * cross0 / m;

  VarianceEstimate out;
  out.kind = EstimatorKind::alt;
  out.value = ((sigma1 + mu1 * mu1 - varsigma1) / strat.eta() +
               (sigma0 + mu0 * mu0 - varsigma0) / (1.0 - strat.eta())) /
              strat.n();
  return out;
}

ConfidenceInterval confidence_interval(const StratumEffects& effects, const VarianceEstimate& v,
                                       double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(ErrorCode::BadAlpha, "alpha must lie in (0,1)");
  }
  ConfidenceInterval ci;
  ci.alpha = alpha;
  double variance = v.value;
  if (variance < 0.0) {
    variance = 0.0;
    ci.clamped = true;
  }
  const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(variance);
  ci.lower = effects.overall - half;
  ci.upper = effects.overall + half;
  return ci;
}

}  // namespace stratvar
