#pragma once

#include <utility>
#include <vector>

#include "stratvar/errors.hpp"

namespace stratvar {

struct Unit {
  double y1 = 0.0;        ///< potential outcome under treatment
  double y0 = 0.0;        ///< potential outcome under control
  std::vector<double> x;  ///< baseline covariates, may be empty
};

/// Fixed units with both potential outcomes and covariates. Immutable after
/// construction; all operations on it are pure.
class FinitePopulation {
 public:
  explicit FinitePopulation(std::vector<Unit> units);

  int size() const { return static_cast<int>(units_.size()); }
  int covariate_dim() const { return covariate_dim_; }
  const Unit& unit(int i) const { return units_[i]; }
  const std::vector<Unit>& units() const { return units_; }

 private:
  std::vector<Unit> units_;
  int covariate_dim_ = 0;
};

/// Partition of {0..n-1} into m strata of common size k, with ell units
/// treated per stratum. Unit indices are 0-based throughout the API.
class Stratification {
 public:
  Stratification(std::vector<std::vector<int>> strata, int ell);

  int m() const { return static_cast<int>(strata_.size()); }
  int k() const { return k_; }
  int n() const { return k_ * m(); }
  int ell() const { return ell_; }
  double eta() const { return static_cast<double>(ell_) / k_; }

  const std::vector<int>& stratum(int j) const { return strata_[j]; }
  const std::vector<std::vector<int>>& strata() const { return strata_; }

 private:
  std::vector<std::vector<int>> strata_;
  int k_ = 0;
  int ell_ = 0;
};

struct ClusterMember {
  double y1 = 0.0;
  double y0 = 0.0;
};

struct Cluster {
  std::vector<ClusterMember> members;
  std::vector<double> x;
};

/// Cluster-level experiment: treatment applies to every unit of a cluster.
class ClusterPopulation {
 public:
  explicit ClusterPopulation(std::vector<Cluster> clusters);

  int size() const { return static_cast<int>(clusters_.size()); }
  const Cluster& cluster(int i) const { return clusters_[i]; }
  const std::vector<Cluster>& clusters() const { return clusters_; }

 private:
  std::vector<Cluster> clusters_;
};

/// True (infeasible) estimands of a finite population under a stratification.
struct Estimands {
  double ate = 0.0;                        ///< population ATE
  std::vector<double> stratum_ates;        ///< per-stratum ATEs
  std::vector<std::pair<double, double>> stratum_means;  ///< (mean y1, mean y0) per stratum
};

/// Cross-checks a population against a stratification. Per-type invariants
/// are enforced by the constructors; this adds the n == m*k consistency check.
void validate(const FinitePopulation& pop, const Stratification& strat);

/// Cluster collapse: unit i gets outcome (cluster-i total under d) divided by
/// the mean cluster size, so the collapsed population ATE equals the average
/// treatment effect across all within-cluster units. Covariates pass through.
FinitePopulation collapse_clusters(const ClusterPopulation& cpop);

Estimands estimands(const FinitePopulation& pop, const Stratification& strat);

}  // namespace stratvar
