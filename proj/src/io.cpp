#include "stratvar/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "stratvar/version.hpp"

namespace stratvar {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["inputs"] = manifest.inputs;
  j["output"] = manifest.output.empty() ? "-" : manifest.output;
  if (manifest.seed) j["seed"] = *manifest.seed;
  if (!manifest.config_echo.empty()) {
    j["config"] = nlohmann::json::parse(manifest.config_echo);
  }
  j["version"] = kVersion;
  return j.dump();
}

std::string manifest_comment(const RunManifest& manifest) {
  return "# manifest: " + manifest_json(manifest);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_real(const std::string& text, int line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(ErrorCode::ParseError,
                      "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return value;
}

long parse_int(const std::string& text, int line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  long value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(ErrorCode::ParseError,
                      "line " + std::to_string(line_no) + ": bad integer '" + text + "'");
  }
  return value;
}

struct CsvReader {
  std::ifstream stream;
  std::string path;
  int line_no = 0;

  explicit CsvReader(const std::string& file) : stream(file), path(file) {
    if (!stream) {
      throw DomainError(ErrorCode::ParseError, "cannot open '" + file + "'");
    }
  }

  // Skips blank lines and # comments (manifest lines round-trip cleanly).
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(stream, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      fields = split_csv_line(line);
      return true;
    }
    return false;
  }
};

void require_header(const std::vector<std::string>& fields,
                    const std::vector<std::string>& expected_prefix, const std::string& path) {
  if (fields.size() < expected_prefix.size()) {
    throw DomainError(ErrorCode::ParseError, path + ": short header");
  }
  for (std::size_t i = 0; i < expected_prefix.size(); ++i) {
    if (fields[i] != expected_prefix[i]) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": expected header column '" + expected_prefix[i] + "', got '" +
                            fields[i] + "'");
    }
  }
}

int covariate_count(const std::vector<std::string>& header, std::size_t fixed,
                    const std::string& path) {
  const int p = static_cast<int>(header.size() - fixed);
  for (int c = 0; c < p; ++c) {
    const std::string expected = "x" + std::to_string(c + 1);
    if (header[fixed + c] != expected) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": expected covariate column '" + expected + "'");
    }
  }
  return p;
}

}  // namespace

PopulationFile load_population_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw DomainError(ErrorCode::ParseError, path + ": empty file");
  }
  require_header(fields, {"unit_id", "y1", "y0", "stratum"}, path);
  const int p = covariate_count(fields, 4, path);

  PopulationFile out;
  std::map<std::string, int> stratum_index;
  while (reader.next(fields)) {
    if (static_cast<int>(fields.size()) != 4 + p) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": field count");
    }
    Unit u;
    u.y1 = parse_real(fields[1], reader.line_no);
    u.y0 = parse_real(fields[2], reader.line_no);
    u.x.resize(p);
    for (int c = 0; c < p; ++c) u.x[c] = parse_real(fields[4 + c], reader.line_no);

    const std::string& label = fields[3];
    auto [it, inserted] = stratum_index.try_emplace(label, static_cast<int>(out.strata.size()));
    if (inserted) {
      out.strata.emplace_back();
      out.stratum_labels.push_back(label);
    }
    out.strata[it->second].push_back(static_cast<int>(out.units.size()));
    out.unit_ids.push_back(fields[0]);
    out.units.push_back(std::move(u));
  }
  if (out.units.empty()) {
    throw DomainError(ErrorCode::ParseError, path + ": no data rows");
  }
  return out;
}

ObservedFile load_observed_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw DomainError(ErrorCode::ParseError, path + ": empty file");
  }
  require_header(fields, {"unit_id", "y", "d", "stratum"}, path);
  const int p = covariate_count(fields, 4, path);

  ObservedFile out;
  std::map<std::string, int> stratum_index;
  std::vector<std::vector<double>> x_rows;
  while (reader.next(fields)) {
    if (static_cast<int>(fields.size()) != 4 + p) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": field count");
    }
    out.y.push_back(parse_real(fields[1], reader.line_no));
    const long d = parse_int(fields[2], reader.line_no);
    if (d != 0 && d != 1) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": d must be 0 or 1");
    }
    out.assignment.d.push_back(static_cast<std::uint8_t>(d));
    std::vector<double> row(p);
    for (int c = 0; c < p; ++c) row[c] = parse_real(fields[4 + c], reader.line_no);
    x_rows.push_back(std::move(row));

    const std::string& label = fields[3];
    auto [it, inserted] = stratum_index.try_emplace(label, static_cast<int>(out.strata.size()));
    if (inserted) {
      out.strata.emplace_back();
      out.stratum_labels.push_back(label);
    }
    out.strata[it->second].push_back(static_cast<int>(out.y.size()) - 1);
    out.unit_ids.push_back(fields[0]);
  }
  if (out.y.empty()) {
    throw DomainError(ErrorCode::ParseError, path + ": no data rows");
  }
  out.x = Matrix(static_cast<int>(x_rows.size()), p);
  for (std::size_t i = 0; i < x_rows.size(); ++i) {
    for (int c = 0; c < p; ++c) out.x(static_cast<int>(i), c) = x_rows[i][c];
  }
  return out;
}

ClusterPopulation load_cluster_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw DomainError(ErrorCode::ParseError, path + ": empty file");
  }
  require_header(fields, {"cluster_id", "member_id", "y1", "y0"}, path);
  const int p = covariate_count(fields, 4, path);

  std::vector<Cluster> clusters;
  std::map<std::string, int> cluster_index;
  while (reader.next(fields)) {
    if (static_cast<int>(fields.size()) != 4 + p) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": field count");
    }
    ClusterMember member;
    member.y1 = parse_real(fields[2], reader.line_no);
    member.y0 = parse_real(fields[3], reader.line_no);

    const std::string& label = fields[0];
    auto [it, inserted] = cluster_index.try_emplace(label, static_cast<int>(clusters.size()));
    if (inserted) {
      clusters.emplace_back();
      clusters.back().x.resize(p);
      for (int c = 0; c < p; ++c) {
        clusters.back().x[c] = parse_real(fields[4 + c], reader.line_no);
      }
    }
    clusters[it->second].members.push_back(member);
  }
  return ClusterPopulation(std::move(clusters));
}

PairingPlan load_plan_csv(const std::string& path, int expected_m) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw DomainError(ErrorCode::ParseError, path + ": empty file");
  }
  require_header(fields, {"stratum", "pair_id", "slot"}, path);

  // (pair_id, slot) -> stratum; leftover rows carry pair_id = slot = 0.
  std::map<std::pair<long, long>, int> by_position;
  int leftover = -1;
  int rows = 0;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": field count");
    }
    const long stratum = parse_int(fields[0], reader.line_no) - 1;
    const long pair_id = parse_int(fields[1], reader.line_no);
    const long slot = parse_int(fields[2], reader.line_no);
    if (stratum < 0 || stratum >= expected_m) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": stratum out of range");
    }
    ++rows;
    if (pair_id == 0 && slot == 0) {
      if (leftover >= 0) {
        throw DomainError(ErrorCode::ParseError, path + ": multiple leftover rows");
      }
      leftover = static_cast<int>(stratum);
      continue;
    }
    if (slot != 1 && slot != 2) {
      throw DomainError(ErrorCode::ParseError,
                        path + ": line " + std::to_string(reader.line_no) + ": slot must be 1 or 2");
    }
    if (!by_position.emplace(std::make_pair(pair_id, slot), static_cast<int>(stratum)).second) {
      throw DomainError(ErrorCode::ParseError, path + ": duplicate pair position");
    }
  }
  if (rows != expected_m) {
    throw DomainError(ErrorCode::ParseError,
                      path + ": plan covers " + std::to_string(rows) + " strata, expected " +
                          std::to_string(expected_m));
  }

  std::vector<int> order;
  order.reserve(expected_m);
  long expected_pair = 1;
  for (auto it = by_position.begin(); it != by_position.end(); ++it) {
    const auto [pair_id, slot] = it->first;
    const long wanted_slot = (order.size() % 2 == 0) ? 1 : 2;
    if (pair_id != expected_pair || slot != wanted_slot) {
      throw DomainError(ErrorCode::ParseError, path + ": pair ids must run 1..floor(m/2) with slots 1,2");
    }
    order.push_back(it->second);
    if (slot == 2) ++expected_pair;
  }
  if (leftover >= 0) order.push_back(leftover);
  return PairingPlan(std::move(order));
}

void write_plan_csv(std::ostream& out, const PairingPlan& plan, const RunManifest& manifest) {
  out << manifest_comment(manifest) << "\n";
  out << "stratum,pair_id,slot\n";
  for (int j = 0; j < plan.pair_count(); ++j) {
    const auto [a, b] = plan.pair(j);
    out << (a + 1) << "," << (j + 1) << ",1\n";
    out << (b + 1) << "," << (j + 1) << ",2\n";
  }
  if (const auto leftover = plan.leftover()) {
    out << (*leftover + 1) << ",0,0\n";
  }
}

void write_assignment_csv(std::ostream& out, const std::vector<std::string>& unit_ids,
                          const Assignment& a, const RunManifest& manifest) {
  out << manifest_comment(manifest) << "\n";
  out << "unit_id,d\n";
  for (std::size_t i = 0; i < unit_ids.size(); ++i) {
    out << unit_ids[i] << "," << static_cast<int>(a.d[i]) << "\n";
  }
}

}  // namespace stratvar
