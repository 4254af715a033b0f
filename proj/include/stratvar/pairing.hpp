#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stratvar/matrix.hpp"
#include "stratvar/population.hpp"

namespace stratvar {

enum class MatchMethod { good, bad };

enum class StrataPairingMethod { adjacent_by_mean, antipodal_by_mean, greedy_nonbipartite };

/// Ordered pairing of strata: pairs are (order[2j], order[2j+1]); for odd m
/// the last stratum in the order is left unpaired.
class PairingPlan {
 public:
  explicit PairingPlan(std::vector<int> order);

  static PairingPlan identity(int m);

  int m() const { return static_cast<int>(order_.size()); }
  int pair_count() const { return m() / 2; }
  std::pair<int, int> pair(int j) const { return {order_[2 * j], order_[2 * j + 1]}; }
  std::optional<int> leftover() const {
    if (m() % 2 == 0) return std::nullopt;
    return order_.back();
  }
  const std::vector<int>& order() const { return order_; }

 private:
  std::vector<int> order_;
};

/// Builds a matched-pairs stratification (k=2, ell=1) from scalar covariates.
/// good: sort ascending, pair adjacent. bad: sort ascending, pair smallest
/// with largest, second smallest with second largest, and so on. Ties broken
/// by original unit index.
Stratification match_units(const Matrix& x, MatchMethod method);

/// Pairs strata by their covariate averages. Sort-based methods require a
/// scalar covariate; greedy_nonbipartite repeatedly pairs the two closest
/// unpaired strata by Euclidean distance, ties broken by lowest index.
PairingPlan pair_strata(const Stratification& strat, const Matrix& x,
                        StrataPairingMethod method);

/// Stratum covariate means, one row per stratum.
Matrix stratum_means(const Stratification& strat, const Matrix& x);

}  // namespace stratvar
