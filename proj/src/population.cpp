#include "stratvar/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stratvar {

FinitePopulation::FinitePopulation(std::vector<Unit> units) : units_(std::move(units)) {
  if (units_.empty()) {
    throw DomainError(ErrorCode::SizeMismatch, "population must contain at least one unit");
  }
  covariate_dim_ = static_cast<int>(units_.front().x.size());
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const Unit& u = units_[i];
    if (!std::isfinite(u.y1) || !std::isfinite(u.y0)) {
      throw DomainError(ErrorCode::NonFinite,
                        "potential outcome of unit " + std::to_string(i + 1));
    }
    if (static_cast<int>(u.x.size()) != covariate_dim_) {
      throw DomainError(ErrorCode::SizeMismatch,
                        "covariate dimension differs at unit " + std::to_string(i + 1));
    }
    for (double v : u.x) {
      if (!std::isfinite(v)) {
        throw DomainError(ErrorCode::NonFinite,
                          "covariate of unit " + std::to_string(i + 1));
      }
    }
  }
}

Stratification::Stratification(std::vector<std::vector<int>> strata, int ell)
    : strata_(std::move(strata)), ell_(ell) {
  if (strata_.empty()) {
    throw DomainError(ErrorCode::NonPartition, "no strata given");
  }
  k_ = static_cast<int>(strata_.front().size());
  for (const auto& s : strata_) {
    if (static_cast<int>(s.size()) != k_) {
      throw DomainError(ErrorCode::SizeMismatch, "strata must share a common size");
    }
  }
  if (ell_ < 1 || ell_ > k_ - 1) {
    throw DomainError(ErrorCode::BadTreatedCount,
                      "treated count " + std::to_string(ell_) + " outside [1, k-1]");
  }
  const int total = n();
  std::vector<char> seen(total, 0);
  for (const auto& s : strata_) {
    for (int idx : s) {
      if (idx < 0 || idx >= total || seen[idx]) {
        throw DomainError(ErrorCode::NonPartition,
                          "strata must partition the unit indices exactly");
      }
      seen[idx] = 1;
    }
  }
}

ClusterPopulation::ClusterPopulation(std::vector<Cluster> clusters)
    : clusters_(std::move(clusters)) {
  if (clusters_.empty()) {
    throw DomainError(ErrorCode::EmptyCluster, "no clusters given");
  }
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    if (clusters_[i].members.empty()) {
      throw DomainError(ErrorCode::EmptyCluster, "cluster " + std::to_string(i + 1));
    }
    for (const auto& member : clusters_[i].members) {
      if (!std::isfinite(member.y1) || !std::isfinite(member.y0)) {
        throw DomainError(ErrorCode::NonFinite, "cluster " + std::to_string(i + 1));
      }
    }
  }
}

void validate(const FinitePopulation& pop, const Stratification& strat) {
  if (pop.size() != strat.n()) {
    throw DomainError(ErrorCode::SizeMismatch,
                      "population has " + std::to_string(pop.size()) + " units, strata cover " +
                          std::to_string(strat.n()));
  }
}

FinitePopulation collapse_clusters(const ClusterPopulation& cpop) {
  const int n = cpop.size();
  double total_units = 0.0;
  for (const auto& c : cpop.clusters()) total_units += static_cast<double>(c.members.size());
  const double mean_size = total_units / n;

  std::vector<Unit> units(n);
  for (int i = 0; i < n; ++i) {
    const Cluster& c = cpop.cluster(i);
    double t1 = 0.0;
    double t0 = 0.0;
    for (const auto& member : c.members) {
      t1 += member.y1;
      t0 += member.y0;
    }
    units[i].y1 = t1 / mean_size;
    units[i].y0 = t0 / mean_size;
    units[i].x = c.x;
  }
  return FinitePopulation(std::move(units));
}

Estimands estimands(const FinitePopulation& pop, const Stratification& strat) {
  validate(pop, strat);
  Estimands out;
  out.stratum_ates.resize(strat.m());
  out.stratum_means.resize(strat.m());
  double sum1 = 0.0;
  double sum0 = 0.0;
  for (int j = 0; j < strat.m(); ++j) {
    double m1 = 0.0;
    double m0 = 0.0;
    for (int idx : strat.stratum(j)) {
      m1 += pop.unit(idx).y1;
      m0 += pop.unit(idx).y0;
    }
    sum1 += m1;
    sum0 += m0;
    m1 /= strat.k();
    m0 /= strat.k();
    out.stratum_means[j] = {m1, m0};
    out.stratum_ates[j] = m1 - m0;
  }
  out.ate = (sum1 - sum0) / strat.n();
  return out;
}

}  // namespace stratvar
