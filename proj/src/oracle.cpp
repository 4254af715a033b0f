#include "stratvar/oracle.hpp"

#include <cmath>

#include "stratvar/summation.hpp"

namespace stratvar {

const char* oracle_statistic_name(OracleStatistic s) {
  switch (s) {
    case OracleStatistic::delta_hat: return "delta_hat";
    case OracleStatistic::paired: return "paired";
    case OracleStatistic::imai: return "imai";
    case OracleStatistic::fogarty: return "fogarty";
    case OracleStatistic::coarse: return "coarse";
    case OracleStatistic::alt: return "alt";
  }
  return "unknown";
}

OracleStatistic oracle_statistic_from_name(const std::string& name) {
  if (name == "delta_hat") return OracleStatistic::delta_hat;
  if (name == "paired") return OracleStatistic::paired;
  if (name == "imai") return OracleStatistic::imai;
  if (name == "fogarty") return OracleStatistic::fogarty;
  if (name == "coarse") return OracleStatistic::coarse;
  if (name == "alt") return OracleStatistic::alt;
  throw DomainError(ErrorCode::ParseError, "unknown statistic '" + name + "'");
}

StratumSpreads stratum_spreads(const FinitePopulation& pop, const Stratification& strat) {
  validate(pop, strat);
  const int m = strat.m();
  const int k = strat.k();
  StratumSpreads out;
  out.s2_1.resize(m);
  out.s2_0.resize(m);
  out.s2_delta.resize(m);
  for (int j = 0; j < m; ++j) {
    double m1 = 0.0;
    double m0 = 0.0;
    for (int idx : strat.stratum(j)) {
      m1 += pop.unit(idx).y1;
      m0 += pop.unit(idx).y0;
    }
    m1 /= k;
    m0 /= k;
    double s1 = 0.0;
    double s0 = 0.0;
    double sd = 0.0;
    for (int idx : strat.stratum(j)) {
      const Unit& u = pop.unit(idx);
      s1 += (u.y1 - m1) * (u.y1 - m1);
      s0 += (u.y0 - m0) * (u.y0 - m0);
      const double gap = u.y1 - u.y0 - (m1 - m0);
      sd += gap * gap;
    }
    out.s2_1[j] = s1 / (k - 1);
    out.s2_0[j] = s0 / (k - 1);
    out.s2_delta[j] = sd / (k - 1);
  }
  return out;
}

double exact_variance(const FinitePopulation& pop, const Stratification& strat) {
  const StratumSpreads spreads = stratum_spreads(pop, strat);
  const double eta = strat.eta();
  double total = 0.0;
  for (int j = 0; j < strat.m(); ++j) {
    total += spreads.s2_1[j] / eta + spreads.s2_0[j] / (1.0 - eta) - spreads.s2_delta[j];
  }
  return total / (static_cast<double>(strat.n()) * strat.m());
}

ExactMoments exact_moments_of(const FinitePopulation& pop, const Stratification& strat,
                              const std::function<double(const ObservedExperiment&)>& statistic,
                              std::uint64_t cap) {
  validate(pop, strat);
  AssignmentEnumerator enumerator(strat, cap);

  Assignment a;
  enumerator.next(a);
  ObservedExperiment obs = observe(pop, a, strat);

  // Uniform support: sum the statistic and divide once. Values are pivoted at
  // the first draw so the variance difference of squares stays well scaled.
  const double pivot = statistic(obs);
  CompensatedSum sum;
  CompensatedSum sum_sq;
  sum.add(0.0);
  std::uint64_t count = 1;
  while (enumerator.next(a)) {
    obs.refresh(pop, a);
    const double centered = statistic(obs) - pivot;
    sum.add(centered);
    sum_sq.add(centered * centered);
    ++count;
  }

  ExactMoments out;
  out.support_size = enumerator.support_size();
  const double inv = 1.0 / static_cast<double>(count);
  const double mean_centered = sum.value() * inv;
  out.mean = pivot + mean_centered;
  out.variance = sum_sq.value() * inv - mean_centered * mean_centered;
  if (out.variance < 0.0) out.variance = 0.0;
  return out;
}

ExactMoments exact_moments(const FinitePopulation& pop, const Stratification& strat,
                           const PairingPlan& plan, OracleStatistic statistic,
                           const Matrix* design, std::uint64_t cap) {
  Matrix default_design;
  if (statistic == OracleStatistic::fogarty && design == nullptr) {
    Matrix x(pop.size(), pop.covariate_dim());
    for (int i = 0; i < pop.size(); ++i) {
      for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = pop.unit(i).x[c];
    }
    default_design = fogarty_design(strat, x);
    design = &default_design;
  }

  std::function<double(const ObservedExperiment&)> fn;
  switch (statistic) {
    case OracleStatistic::delta_hat:
      fn = [](const ObservedExperiment& obs) { return diff_in_means(obs).overall; };
      break;
    case OracleStatistic::paired:
      fn = [&plan](const ObservedExperiment& obs) { return var_paired(obs, plan).value; };
      break;
    case OracleStatistic::imai:
      fn = [](const ObservedExperiment& obs) { return var_imai(obs).value; };
      break;
    case OracleStatistic::fogarty:
      fn = [design](const ObservedExperiment& obs) { return var_fogarty(obs, *design).value; };
      break;
    case OracleStatistic::coarse:
      fn = [](const ObservedExperiment& obs) { return var_coarse(obs).value; };
      break;
    case OracleStatistic::alt:
      fn = [&plan](const ObservedExperiment& obs) { return var_alt(obs, plan).value; };
      break;
  }
  return exact_moments_of(pop, strat, fn, cap);
}

double bias_paired(const FinitePopulation& pop, const Stratification& strat,
                   const PairingPlan& plan) {
  const Estimands truth = estimands(pop, strat);
  const int m = strat.m();
  double total = 0.0;
  for (int j = 0; j < plan.pair_count(); ++j) {
    const auto [a, b] = plan.pair(j);
    const double gap = truth.stratum_ates[a] - truth.stratum_ates[b];
    total += gap * gap;
  }
  if (const auto leftover = plan.leftover()) {
    // Unpaired stratum enters tau^2 but no cross term; exact for odd m.
    const double d = truth.stratum_ates[*leftover];
    total += d * d;
  }
  return total / (static_cast<double>(m) * m);
}

double bias_imai(const FinitePopulation& pop, const Stratification& strat) {
  const int m = strat.m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "imai bias needs at least two strata");
  }
  const Estimands truth = estimands(pop, strat);
  double ss = 0.0;
  for (double d : truth.stratum_ates) {
    const double c = d - truth.ate;
    ss += c * c;
  }
  return ss / (static_cast<double>(m) * (m - 1));
}

double bias_fogarty(const FinitePopulation& pop, const Stratification& strat,
                    const Matrix& design) {
  const Estimands truth = estimands(pop, strat);
  return projection_residual_form(design, truth.stratum_ates, nullptr) /
         (static_cast<double>(strat.m()) * strat.m());
}

double bias_coarse(const FinitePopulation& pop, const Stratification& strat) {
  const StratumSpreads spreads = stratum_spreads(pop, strat);
  double total = 0.0;
  for (double v : spreads.s2_delta) total += v;
  return total / (static_cast<double>(strat.n()) * strat.m());
}

CorollaryCheck corollary_condition(const FinitePopulation& pop, const Stratification& strat,
                                   const PairingPlan& plan) {
  const int m = strat.m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "corollary condition needs at least two strata");
  }
  const Estimands truth = estimands(pop, strat);

  CorollaryCheck out;
  double lhs = 0.0;
  for (int j = 0; j < plan.pair_count(); ++j) {
    const auto [a, b] = plan.pair(j);
    lhs += (truth.stratum_ates[a] - truth.ate) * (truth.stratum_ates[b] - truth.ate);
  }
  out.lhs = lhs / m;

  double ss = 0.0;
  for (double d : truth.stratum_ates) {
    const double c = d - truth.ate;
    ss += c * c;
  }
  out.rhs = -ss / (2.0 * m * (m - 1));

  // Decided from the bias comparison itself, which is exact for every m;
  // equivalent to lhs >= rhs when m is even. Ties count as holding.
  const double paired = bias_paired(pop, strat, plan);
  const double imai = bias_imai(pop, strat);
  out.holds = paired <= imai + 1e-12 * std::max(1.0, std::abs(imai));
  return out;
}

}  // namespace stratvar
