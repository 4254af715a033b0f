#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stratvar/assignment.hpp"
#include "stratvar/pairing.hpp"
#include "stratvar/population.hpp"

namespace stratvar {

/// Reproducibility record embedded in every emitted report as a leading
/// `# manifest: {...}` comment (CSV) or a `manifest` member (JSON).
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string output;  // "-" for stdout
  std::optional<std::uint64_t> seed;
  std::string config_echo;  // compact JSON, empty if none
};

std::string manifest_comment(const RunManifest& manifest);
std::string manifest_json(const RunManifest& manifest);

/// Shortest round-trip decimal form (17 significant digits).
std::string format_real(double v);

/// Population CSV `unit_id,y1,y0,stratum,x1..xp`. Stratum labels are
/// arbitrary strings mapped to indices in first-appearance order.
struct PopulationFile {
  std::vector<Unit> units;
  std::vector<std::vector<int>> strata;
  std::vector<std::string> stratum_labels;
  std::vector<std::string> unit_ids;
};

PopulationFile load_population_csv(const std::string& path);

/// Observed-data CSV `unit_id,y,d,stratum,x1..xp`. ell is recovered from the
/// d column and must be constant across strata.
struct ObservedFile {
  std::vector<double> y;
  Assignment assignment;
  Matrix x;
  std::vector<std::vector<int>> strata;
  std::vector<std::string> stratum_labels;
  std::vector<std::string> unit_ids;
};

ObservedFile load_observed_csv(const std::string& path);

/// Cluster CSV `cluster_id,member_id,y1,y0,x1..xp`; members grouped by
/// cluster_id in first-appearance order, covariates taken from the first row
/// of each cluster.
ClusterPopulation load_cluster_csv(const std::string& path);

/// Plan CSV `stratum,pair_id,slot` with 1-based stratum indices; an odd-m
/// leftover row carries pair_id=0, slot=0.
PairingPlan load_plan_csv(const std::string& path, int expected_m);
void write_plan_csv(std::ostream& out, const PairingPlan& plan, const RunManifest& manifest);

void write_assignment_csv(std::ostream& out, const std::vector<std::string>& unit_ids,
                          const Assignment& a, const RunManifest& manifest);

}  // namespace stratvar
