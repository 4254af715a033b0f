#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stratvar/matrix.hpp"
#include "stratvar/population.hpp"
#include "stratvar/rng.hpp"

namespace stratvar {

/// One realized treatment vector; exactly ell entries set within each stratum.
struct Assignment {
  std::vector<std::uint8_t> d;

  int size() const { return static_cast<int>(d.size()); }
};

/// Revealed data: observed outcomes, the assignment that produced them, the
/// covariate rows and the stratification. Potential outcomes are not
/// reachable from here.
class ObservedExperiment {
 public:
  ObservedExperiment(std::vector<double> y, Assignment a, Matrix x, Stratification strat);

  const std::vector<double>& y() const { return y_; }
  const Assignment& assignment() const { return d_; }
  const Matrix& x() const { return x_; }
  const Stratification& strat() const { return strat_; }

  /// Re-masks outcomes in place for a new assignment over the same design.
  /// Enumeration hot path; the caller must supply an assignment satisfying
  /// the per-stratum treated-count invariant.
  void refresh(const FinitePopulation& pop, const Assignment& a);

 private:
  std::vector<double> y_;
  Assignment d_;
  Matrix x_;
  Stratification strat_;
};

/// Uniform draw over the C(k,ell)^m support: within each stratum a partial
/// Fisher-Yates shuffle selects the treated subset, independently across
/// strata.
Assignment draw_assignment(const Stratification& strat, Rng& rng);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// C(k,ell)^m. Throws SupportTooLarge beyond cap.
std::uint64_t assignment_support_size(const Stratification& strat,
                                      std::uint64_t cap = kDefaultEnumerationCap);

/// Streams every assignment in the support exactly once, in deterministic
/// order: stratum 0 varies slowest, within-stratum treated subsets in
/// lexicographic order. Each assignment has probability 1/support_size().
class AssignmentEnumerator {
 public:
  explicit AssignmentEnumerator(const Stratification& strat,
                                std::uint64_t cap = kDefaultEnumerationCap);

  std::uint64_t support_size() const { return support_; }
  double probability() const { return 1.0 / static_cast<double>(support_); }

  /// Writes the next assignment into out; returns false once exhausted.
  bool next(Assignment& out);

 private:
  std::vector<std::vector<int>> strata_;
  std::vector<std::vector<std::vector<int>>> subsets_;  // per stratum, lex order
  std::vector<int> odometer_;
  std::uint64_t support_ = 0;
  bool done_ = false;
  bool first_ = true;
  int n_ = 0;

  void write(Assignment& out) const;
};

/// Materialized support with per-assignment probabilities; small instances.
std::vector<std::pair<Assignment, double>> enumerate_assignments(
    const Stratification& strat, std::uint64_t cap = kDefaultEnumerationCap);

/// Masks potential outcomes: y_i = y1_i if treated else y0_i.
ObservedExperiment observe(const FinitePopulation& pop, const Assignment& a,
                           const Stratification& strat);

}  // namespace stratvar
