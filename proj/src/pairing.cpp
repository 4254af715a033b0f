#include "stratvar/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stratvar/errors.hpp"

namespace stratvar {

PairingPlan::PairingPlan(std::vector<int> order) : order_(std::move(order)) {
  std::vector<char> seen(order_.size(), 0);
  for (int idx : order_) {
    if (idx < 0 || idx >= static_cast<int>(order_.size()) || seen[idx]) {
      throw DomainError(ErrorCode::NonPartition, "plan order must be a permutation of the strata");
    }
    seen[idx] = 1;
  }
}

PairingPlan PairingPlan::identity(int m) {
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  return PairingPlan(std::move(order));
}

namespace {

std::vector<int> sorted_by_scalar(const std::vector<double>& value) {
  std::vector<int> idx(value.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return value[a] < value[b]; });
  return idx;
}

}  // namespace

Stratification match_units(const Matrix& x, MatchMethod method) {
  const int n = x.rows;
  if (x.cols == 0) {
    throw DomainError(ErrorCode::NoCovariates, "matching needs covariates");
  }
  if (x.cols != 1) {
    throw DomainError(ErrorCode::MultivariateUnsupported,
                      "sort-based matching requires a scalar covariate");
  }
  if (n % 2 != 0) {
    throw DomainError(ErrorCode::OddCount, "matched pairs need an even unit count");
  }
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = x(i, 0);
  const std::vector<int> order = sorted_by_scalar(values);

  std::vector<std::vector<int>> strata;
  strata.reserve(n / 2);
  if (method == MatchMethod::good) {
    for (int i = 0; i < n; i += 2) strata.push_back({order[i], order[i + 1]});
  } else {
    for (int i = 0; i < n / 2; ++i) strata.push_back({order[i], order[n - 1 - i]});
  }
  return Stratification(std::move(strata), 1);
}

Matrix stratum_means(const Stratification& strat, const Matrix& x) {
  Matrix means(strat.m(), x.cols);
  for (int j = 0; j < strat.m(); ++j) {
    for (int c = 0; c < x.cols; ++c) {
      double acc = 0.0;
      for (int idx : strat.stratum(j)) acc += x(idx, c);
      means(j, c) = acc / strat.k();
    }
  }
  return means;
}

PairingPlan pair_strata(const Stratification& strat, const Matrix& x,
                        StrataPairingMethod method) {
  const int m = strat.m();
  if (m < 2) {
    throw DomainError(ErrorCode::TooFewStrata, "strata pairing needs at least two strata");
  }
  if (x.cols == 0) {
    throw DomainError(ErrorCode::NoCovariates, "strata pairing needs covariates");
  }
  if (x.rows != strat.n()) {
    throw DomainError(ErrorCode::LengthMismatch, "covariate rows do not match the stratification");
  }
  const Matrix means = stratum_means(strat, x);

  if (method == StrataPairingMethod::greedy_nonbipartite) {
    // Repeatedly bind the two closest unpaired strata; ties go to the lowest
    // index pair.
    std::vector<char> used(m, 0);
    std::vector<int> order;
    order.reserve(m);
    for (int step = 0; step < m / 2; ++step) {
      int best_a = -1;
      int best_b = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) {
        if (used[a]) continue;
        for (int b = a + 1; b < m; ++b) {
          if (used[b]) continue;
          double dist = 0.0;
          for (int c = 0; c < means.cols; ++c) {
            const double diff = means(a, c) - means(b, c);
            dist += diff * diff;
          }
          if (dist < best_dist) {
            best_dist = dist;
            best_a = a;
            best_b = b;
          }
        }
      }
      used[best_a] = 1;
      used[best_b] = 1;
      order.push_back(best_a);
      order.push_back(best_b);
    }
    for (int j = 0; j < m; ++j) {
      if (!used[j]) order.push_back(j);  // odd-m leftover
    }
    return PairingPlan(std::move(order));
  }

  if (x.cols != 1) {
    throw DomainError(ErrorCode::MultivariateUnsupported,
                      "sort-based strata pairing requires a scalar covariate");
  }
  std::vector<double> value(m);
  for (int j = 0; j < m; ++j) value[j] = means(j, 0);
  const std::vector<int> sorted = sorted_by_scalar(value);

  std::vector<int> order;
  order.reserve(m);
  if (method == StrataPairingMethod::adjacent_by_mean) {
    for (int i = 0; i + 1 < m; i += 2) {
      order.push_back(sorted[i]);
      order.push_back(sorted[i + 1]);
    }
    if (m % 2 != 0) order.push_back(sorted[m - 1]);
  } else {  // antipodal_by_mean
    for (int i = 0; i < m / 2; ++i) {
      order.push_back(sorted[i]);
      order.push_back(sorted[m - 1 - i]);
    }
    if (m % 2 != 0) order.push_back(sorted[m / 2]);
  }
  return PairingPlan(std::move(order));
}

}  // namespace stratvar
