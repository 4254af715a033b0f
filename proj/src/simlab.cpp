#include "stratvar/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "stratvar/assignment.hpp"

namespace stratvar {

double DgpSpec::mean(int d, double x) const {
  const double base = d == 1 ? mu1 : mu0;
  double shift = 0.0;
  switch (model) {
    case DgpModel::model1:
      shift = (d == 1 ? 10.0 : 20.0) * (x - 0.5);
      break;
    case DgpModel::model2:
      shift = (d == 1 ? 10.0 : 40.0) * (x * x - 4.0 / 3.0);
      break;
  }
  return base + shift;
}

FinitePopulation generate_population(const DgpSpec& dgp, int n, Rng& rng) {
  if (n < 2) {
    throw DomainError(ErrorCode::SizeMismatch, "population size must be at least 2");
  }
  std::vector<Unit> units(n);
  for (int i = 0; i < n; ++i) {
    // Draw order per unit is pinned: x, eps0, eps1.
    const double x = rng.uniform01();
    const double eps0 = rng.normal();
    const double eps1 = rng.normal();
    units[i].x = {x};
    units[i].y0 = dgp.mean(0, x) + eps0;
    units[i].y1 = dgp.mean(1, x) + eps1;
  }
  return FinitePopulation(std::move(units));
}

FinitePopulation generate_population(const DgpSpec& dgp, int n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_population(dgp, n, rng);
}

FinitePopulation subsample(const FinitePopulation& pop, int n_sub, Rng& rng) {
  const int n = pop.size();
  if (n_sub > n) {
    throw DomainError(ErrorCode::TooLarge, "subsample of " + std::to_string(n_sub) +
                                               " from " + std::to_string(n) + " units");
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int t = 0; t < n_sub; ++t) {
    const int pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
    std::swap(idx[t], idx[pick]);
  }
  idx.resize(n_sub);
  std::sort(idx.begin(), idx.end());
  std::vector<Unit> units;
  units.reserve(n_sub);
  for (int i : idx) units.push_back(pop.unit(i));
  return FinitePopulation(std::move(units));
}

FinitePopulation subsample(const FinitePopulation& pop, int n_sub, std::uint64_t seed) {
  Rng rng(seed);
  return subsample(pop, n_sub, rng);
}

namespace {

struct ReplicationSlot {
  std::uint8_t covered = 0;
  double length = 0.0;
  double variance = 0.0;
};

}  // namespace

SimReport run_monte_carlo(const SimConfig& cfg) {
  if (cfg.population_size % 2 != 0) {
    throw DomainError(ErrorCode::OddCount, "population size must be even");
  }

  // The population is drawn once on substream 0 and never re-drawn; smaller
  // sizes subsample the fixed size-1000 draw on the same stream.
  Rng population_stream = Rng::substream(cfg.master_seed, 0);
  const FinitePopulation pop = [&] {
    if (cfg.population_size < 1000) {
      const FinitePopulation base = generate_population(cfg.dgp, 1000, population_stream);
      return subsample(base, cfg.population_size, population_stream);
    }
    return generate_population(cfg.dgp, cfg.population_size, population_stream);
  }();
  return run_monte_carlo(cfg, pop);
}

SimReport run_monte_carlo(const SimConfig& cfg, const FinitePopulation& pop) {
  if (pop.size() % 2 != 0) {
    throw DomainError(ErrorCode::OddCount, "population size must be even");
  }
  if (cfg.replications < 1) {
    throw DomainError(ErrorCode::OutOfRange, "replications must be positive");
  }

  Matrix x(pop.size(), pop.covariate_dim());
  for (int i = 0; i < pop.size(); ++i) {
    for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = pop.unit(i).x[c];
  }

  const Stratification strat = match_units(x, cfg.match_method);
  const PairingPlan plan = pair_strata(strat, x, StrataPairingMethod::adjacent_by_mean);
  const double delta_n = estimands(pop, strat).ate;
  const Matrix design = [&]() -> Matrix {
    const bool needs_design =
        std::find(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::fogarty) !=
        cfg.estimators.end();
    return needs_design ? fogarty_design(strat, x) : Matrix();
  }();

  const int reps = cfg.replications;
  const int n_estimators = static_cast<int>(cfg.estimators.size());
  std::vector<std::vector<ReplicationSlot>> slots(
      n_estimators, std::vector<ReplicationSlot>(reps));

  std::optional<std::pair<ErrorCode, std::string>> failure;
  std::mutex failure_mutex;

  const auto worker = [&](int first, int last) {
    Assignment a;
    for (int r = first; r < last; ++r) {
      try {
        Rng rng = Rng::substream(cfg.master_seed, static_cast<std::uint64_t>(r) + 1);
        a = draw_assignment(strat, rng);
        const ObservedExperiment obs = observe(pop, a, strat);
        const StratumEffects effects = diff_in_means(obs);
        for (int e = 0; e < n_estimators; ++e) {
          VarianceEstimate v;
          switch (cfg.estimators[e]) {
            case EstimatorKind::paired: v = var_paired(obs, plan); break;
            case EstimatorKind::imai: v = var_imai(obs); break;
            case EstimatorKind::fogarty: v = var_fogarty(obs, design); break;
            case EstimatorKind::coarse: v = var_coarse(obs); break;
            case EstimatorKind::alt: v = var_alt(obs, plan); break;
          }
          const ConfidenceInterval ci = confidence_interval(effects, v, cfg.alpha);
          ReplicationSlot& slot = slots[e][r];
          slot.covered = (ci.lower <= delta_n && delta_n <= ci.upper) ? 1 : 0;
          slot.length = ci.upper - ci.lower;
          slot.variance = v.value;
        }
      } catch (const DomainError& err) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = {err.code(),
                     "replication " + std::to_string(r + 1) + ": " + err.what()};
        }
        return;
      }
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker(0, reps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (reps + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int first = t * chunk;
      const int last = std::min(reps, first + chunk);
      if (first < last) pool.emplace_back(worker, first, last);
    }
    for (auto& th : pool) th.join();
  }
  if (failure) {
    throw DomainError(failure->first, failure->second);
  }

  SimReport report;
  report.delta_n = delta_n;
  report.replications = reps;
  report.mc_se_coverage = std::sqrt(0.25 / reps);
  for (int e = 0; e < n_estimators; ++e) {
    // Sequential reduction in replication order: reports are identical for
    // every thread count.
    long covered = 0;
    double length_sum = 0.0;
    double variance_sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      covered += slots[e][r].covered;
      length_sum += slots[e][r].length;
      variance_sum += slots[e][r].variance;
    }
    EstimatorSummary summary;
    summary.coverage = static_cast<double>(covered) / reps;
    summary.avg_length = length_sum / reps;
    summary.mean_variance = variance_sum / reps;
    summary.mc_se_coverage = std::sqrt(summary.coverage * (1.0 - summary.coverage) / reps);
    report.estimators.emplace_back(cfg.estimators[e], summary);
  }
  return report;
}

namespace {

// Slope of mu_d(x) on its basis function and the U[0,1] moments of that basis.
struct BasisMoments {
  double cate_slope;      // mu_1 slope minus mu_0 slope
  double var_g;           // Var g(X)
  double cov_gx;          // Cov(g(X), X)
};

BasisMoments basis_moments(const DgpSpec& dgp) {
  // U[0,1]: E X = 1/2, E X^2 = 1/3, E X^3 = 1/4, E X^4 = 1/5.
  BasisMoments out{};
  switch (dgp.model) {
    case DgpModel::model1:
      // g(x) = x - 1/2
      out.cate_slope = 10.0 - 20.0;
      out.var_g = 1.0 / 12.0;
      out.cov_gx = 1.0 / 12.0;
      break;
    case DgpModel::model2:
      // g(x) = x^2 - 4/3; Var g = E X^4 - (E X^2)^2, Cov(g,X) = E X^3 - E X^2 E X
      out.cate_slope = 10.0 - 40.0;
      out.var_g = 1.0 / 5.0 - 1.0 / 9.0;
      out.cov_gx = 1.0 / 4.0 - 1.0 / 6.0;
      break;
  }
  return out;
}

}  // namespace

LimitSummary analytic_limits(const DgpSpec& dgp, double eta, int k) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw DomainError(ErrorCode::OutOfRange, "eta must lie in (0,1)");
  }
  const BasisMoments moments = basis_moments(dgp);

  // Unit-variance noise in each arm, independent across arms and of X.
  const double obs = 1.0 / eta + 1.0 / (1.0 - eta);
  const double cate_var = moments.cate_slope * moments.cate_slope * moments.var_g;
  const double blp_resid_var =
      moments.cate_slope * moments.cate_slope *
      (moments.var_g - moments.cov_gx * moments.cov_gx * 12.0);  // Var X = 1/12

  LimitSummary out;
  out.v_obs = obs;
  out.v = obs - 2.0;
  out.v_im = obs + k * cate_var;
  out.v_f = obs + k * blp_resid_var;
  return out;
}

}  // namespace stratvar
