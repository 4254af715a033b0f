#include "stratvar/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace stratvar {

ObservedExperiment::ObservedExperiment(std::vector<double> y, Assignment a, Matrix x,
                                       Stratification strat)
    : y_(std::move(y)), d_(std::move(a)), x_(std::move(x)), strat_(std::move(strat)) {
  const int n = strat_.n();
  if (static_cast<int>(y_.size()) != n || d_.size() != n ||
      (x_.rows != 0 && x_.rows != n)) {
    throw DomainError(ErrorCode::LengthMismatch, "outcome/assignment/covariate lengths disagree");
  }
  for (double v : y_) {
    if (!std::isfinite(v)) {
      throw DomainError(ErrorCode::NonFinite, "observed outcome");
    }
  }
  for (int j = 0; j < strat_.m(); ++j) {
    int treated = 0;
    for (int idx : strat_.stratum(j)) treated += d_.d[idx];
    if (treated != strat_.ell()) {
      throw DomainError(ErrorCode::BadTreatedCount,
                        "stratum " + std::to_string(j + 1) + " has " + std::to_string(treated) +
                            " treated units, expected " + std::to_string(strat_.ell()));
    }
  }
}

void ObservedExperiment::refresh(const FinitePopulation& pop, const Assignment& a) {
  const int n = strat_.n();
  for (int i = 0; i < n; ++i) {
    y_[i] = a.d[i] ? pop.unit(i).y1 : pop.unit(i).y0;
    d_.d[i] = a.d[i];
  }
}

Assignment draw_assignment(const Stratification& strat, Rng& rng) {
  Assignment a;
  a.d.assign(strat.n(), 0);
  std::vector<int> scratch;
  for (int j = 0; j < strat.m(); ++j) {
    scratch = strat.stratum(j);
    const int k = strat.k();
    for (int t = 0; t < strat.ell(); ++t) {
      const int pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - t)));
      std::swap(scratch[t], scratch[pick]);
      a.d[scratch[t]] = 1;
    }
  }
  return a;
}

namespace {

std::uint64_t binomial(int k, int ell) {
  // saturates instead of wrapping; callers compare against a cap
  constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (int i = 1; i <= ell; ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(k - ell + i);
    if (result > kSaturated / factor) return kSaturated;
    result = result * factor / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::vector<std::vector<int>> lexicographic_subsets(int k, int ell) {
  std::vector<std::vector<int>> subsets;
  std::vector<int> current(ell);
  std::iota(current.begin(), current.end(), 0);
  for (;;) {
    subsets.push_back(current);
    int pos = ell - 1;
    while (pos >= 0 && current[pos] == k - ell + pos) --pos;
    if (pos < 0) break;
    ++current[pos];
    for (int q = pos + 1; q < ell; ++q) current[q] = current[q - 1] + 1;
  }
  return subsets;
}

}  // namespace

std::uint64_t assignment_support_size(const Stratification& strat, std::uint64_t cap) {
  const std::uint64_t per_stratum = binomial(strat.k(), strat.ell());
  std::uint64_t support = 1;
  for (int j = 0; j < strat.m(); ++j) {
    if (support > cap / per_stratum) {
      throw DomainError(ErrorCode::SupportTooLarge,
                        "assignment support exceeds cap " + std::to_string(cap));
    }
    support *= per_stratum;
  }
  return support;
}

AssignmentEnumerator::AssignmentEnumerator(const Stratification& strat, std::uint64_t cap)
    : strata_(strat.strata()), n_(strat.n()) {
  support_ = assignment_support_size(strat, cap);
  const auto subsets = lexicographic_subsets(strat.k(), strat.ell());
  subsets_.assign(strat.m(), subsets);
  odometer_.assign(strat.m(), 0);
}

void AssignmentEnumerator::write(Assignment& out) const {
  out.d.assign(n_, 0);
  for (std::size_t j = 0; j < strata_.size(); ++j) {
    for (int slot : subsets_[j][odometer_[j]]) out.d[strata_[j][slot]] = 1;
  }
}

bool AssignmentEnumerator::next(Assignment& out) {
  if (done_) return false;
  if (first_) {
    first_ = false;
    write(out);
    return true;
  }
  // Advance the odometer, last stratum fastest; stratum 0 changes slowest.
  int j = static_cast<int>(strata_.size()) - 1;
  while (j >= 0) {
    if (++odometer_[j] < static_cast<int>(subsets_[j].size())) break;
    odometer_[j] = 0;
    --j;
  }
  if (j < 0) {
    done_ = true;
    return false;
  }
  write(out);
  return true;
}

std::vector<std::pair<Assignment, double>> enumerate_assignments(const Stratification& strat,
                                                                 std::uint64_t cap) {
  AssignmentEnumerator enumerator(strat, cap);
  std::vector<std::pair<Assignment, double>> all;
  all.reserve(enumerator.support_size());
  Assignment a;
  while (enumerator.next(a)) all.emplace_back(a, enumerator.probability());
  return all;
}

ObservedExperiment observe(const FinitePopulation& pop, const Assignment& a,
                           const Stratification& strat) {
  validate(pop, strat);
  if (a.size() != pop.size()) {
    throw DomainError(ErrorCode::LengthMismatch, "assignment length does not match population");
  }
  std::vector<double> y(pop.size());
  Matrix x(pop.size(), pop.covariate_dim());
  for (int i = 0; i < pop.size(); ++i) {
    const Unit& u = pop.unit(i);
    y[i] = a.d[i] ? u.y1 : u.y0;
    for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = u.x[c];
  }
  return ObservedExperiment(std::move(y), a, std::move(x), strat);
}

}  // namespace stratvar
