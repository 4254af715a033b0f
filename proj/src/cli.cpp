#include "stratvar/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratvar/assignment.hpp"
#include "stratvar/estimators.hpp"
#include "stratvar/io.hpp"
#include "stratvar/oracle.hpp"
#include "stratvar/pairing.hpp"
#include "stratvar/simlab.hpp"
#include "stratvar/version.hpp"

namespace stratvar {

namespace {

std::vector<EstimatorKind> parse_estimator_list(const std::string& csv) {
  std::vector<EstimatorKind> kinds;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) kinds.push_back(estimator_from_name(token));
  }
  if (kinds.empty()) {
    throw DomainError(ErrorCode::ParseError, "empty estimator list");
  }
  return kinds;
}

std::string config_echo_json(const SimConfig& cfg) {
  nlohmann::json j;
  j["model"] = static_cast<int>(cfg.dgp.model);
  j["n"] = cfg.population_size;
  j["seed"] = cfg.master_seed;
  j["match"] = cfg.match_method == MatchMethod::good ? "good" : "bad";
  j["replications"] = cfg.replications;
  j["alpha"] = cfg.alpha;
  std::vector<std::string> names;
  for (EstimatorKind kind : cfg.estimators) names.emplace_back(estimator_name(kind));
  j["estimators"] = names;
  return j.dump();
}

// Output sink: stdout by default, file when --out given.
struct Sink {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) {
        throw DomainError(ErrorCode::ParseError, "cannot open output '" + path + "'");
      }
      stream = &file;
    }
  }
};

StrataPairingMethod pairing_method_from_name(const std::string& name) {
  if (name == "adjacent") return StrataPairingMethod::adjacent_by_mean;
  if (name == "antipodal") return StrataPairingMethod::antipodal_by_mean;
  if (name == "greedy") return StrataPairingMethod::greedy_nonbipartite;
  throw DomainError(ErrorCode::ParseError, "unknown pairing method '" + name + "'");
}

int run_pair(const std::string& data_path, const std::string& method_name,
             const std::string& out_path, int ell) {
  const PopulationFile file = load_population_csv(data_path);
  const FinitePopulation pop{file.units};
  const Stratification strat(file.strata, ell);
  validate(pop, strat);

  Matrix x(pop.size(), pop.covariate_dim());
  for (int i = 0; i < pop.size(); ++i) {
    for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = pop.unit(i).x[c];
  }
  const PairingPlan plan = pair_strata(strat, x, pairing_method_from_name(method_name));

  RunManifest manifest;
  manifest.command = "pair";
  manifest.inputs = {data_path};
  manifest.output = out_path;
  Sink sink(out_path);
  write_plan_csv(*sink.stream, plan, manifest);
  return 0;
}

int run_assign(const std::string& pop_path, std::uint64_t seed, const std::string& out_path,
               int ell) {
  const PopulationFile file = load_population_csv(pop_path);
  const FinitePopulation pop{file.units};
  const Stratification strat(file.strata, ell);
  validate(pop, strat);

  Rng rng(seed);
  const Assignment a = draw_assignment(strat, rng);

  RunManifest manifest;
  manifest.command = "assign";
  manifest.inputs = {pop_path};
  manifest.output = out_path;
  manifest.seed = seed;
  Sink sink(out_path);
  write_assignment_csv(*sink.stream, file.unit_ids, a, manifest);
  return 0;
}

int run_estimate(const std::string& data_path, const std::string& estimators_csv,
                 const std::string& plan_path, double alpha, const std::string& out_path) {
  const ObservedFile file = load_observed_csv(data_path);

  // ell is recovered from the data: treated count per stratum, must agree.
  int ell = -1;
  for (const auto& stratum : file.strata) {
    int treated = 0;
    for (int idx : stratum) treated += file.assignment.d[idx];
    if (ell < 0) ell = treated;
  }
  const Stratification strat(file.strata, ell);
  const ObservedExperiment obs(file.y, file.assignment, file.x, strat);

  const std::vector<EstimatorKind> kinds = parse_estimator_list(estimators_csv);

  PairingPlan plan = PairingPlan::identity(strat.m());
  if (!plan_path.empty()) {
    plan = load_plan_csv(plan_path, strat.m());
  } else if (obs.x().cols > 0 && strat.m() >= 2) {
    // sort-based pairing needs a scalar covariate; greedy handles any p
    const StrataPairingMethod method = obs.x().cols == 1
                                           ? StrataPairingMethod::adjacent_by_mean
                                           : StrataPairingMethod::greedy_nonbipartite;
    plan = pair_strata(strat, obs.x(), method);
  }

  const StratumEffects effects = diff_in_means(obs);

  RunManifest manifest;
  manifest.command = "estimate";
  manifest.inputs = {data_path};
  if (!plan_path.empty()) manifest.inputs.push_back(plan_path);
  manifest.output = out_path;

  // rows are buffered so a failing estimator never leaves a partial report
  std::ostringstream body;
  body << manifest_comment(manifest) << "\n";
  body << "estimator,delta_hat,variance,ci_lower,ci_upper,flags\n";
  for (EstimatorKind kind : kinds) {
    VarianceEstimate v;
    switch (kind) {
      case EstimatorKind::paired: v = var_paired(obs, plan); break;
      case EstimatorKind::imai: v = var_imai(obs); break;
      case EstimatorKind::fogarty: v = var_fogarty(obs, fogarty_default_design(obs)); break;
      case EstimatorKind::coarse: v = var_coarse(obs); break;
      case EstimatorKind::alt: v = var_alt(obs, plan); break;
    }
    const ConfidenceInterval ci = confidence_interval(effects, v, alpha);
    body << estimator_name(kind) << "," << format_real(effects.overall) << ","
         << format_real(v.value) << "," << format_real(ci.lower) << ","
         << format_real(ci.upper) << "," << (ci.clamped ? "clamped" : "") << "\n";
  }

  Sink sink(out_path);
  *sink.stream << body.str();
  return 0;
}

int run_oracle(const std::string& pop_path, const std::string& plan_path,
               const std::string& statistic_name, const std::string& out_path, int ell,
               std::uint64_t cap) {
  const PopulationFile file = load_population_csv(pop_path);
  const FinitePopulation pop{file.units};
  const Stratification strat(file.strata, ell);
  validate(pop, strat);

  PairingPlan plan = PairingPlan::identity(strat.m());
  if (!plan_path.empty()) plan = load_plan_csv(plan_path, strat.m());

  const OracleStatistic statistic = oracle_statistic_from_name(statistic_name);
  const ExactMoments moments = exact_moments(pop, strat, plan, statistic, nullptr, cap);

  nlohmann::json j;
  j["statistic"] = statistic_name;
  j["mean"] = moments.mean;
  j["variance"] = moments.variance;
  j["support_size"] = moments.support_size;
  j["closed_form_variance"] = exact_variance(pop, strat);
  switch (statistic) {
    case OracleStatistic::paired:
      j["bias_closed_form"] = bias_paired(pop, strat, plan);
      break;
    case OracleStatistic::imai:
      j["bias_closed_form"] = bias_imai(pop, strat);
      break;
    case OracleStatistic::fogarty: {
      Matrix x(pop.size(), pop.covariate_dim());
      for (int i = 0; i < pop.size(); ++i) {
        for (int c = 0; c < pop.covariate_dim(); ++c) x(i, c) = pop.unit(i).x[c];
      }
      j["bias_closed_form"] = bias_fogarty(pop, strat, fogarty_design(strat, x));
      break;
    }
    case OracleStatistic::coarse:
      j["bias_closed_form"] = bias_coarse(pop, strat);
      break;
    case OracleStatistic::delta_hat:
      j["bias_closed_form"] = 0.0;
      break;
    case OracleStatistic::alt:
      j["bias_closed_form"] = nullptr;  // no closed form
      break;
  }

  RunManifest manifest;
  manifest.command = "oracle";
  manifest.inputs = {pop_path};
  if (!plan_path.empty()) manifest.inputs.push_back(plan_path);
  manifest.output = out_path;
  j["manifest"] = nlohmann::json::parse(manifest_json(manifest));

  Sink sink(out_path);
  *sink.stream << j.dump(2) << "\n";
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path, int threads) {
  SimConfig cfg = parse_config(config_path);
  cfg.threads = threads;
  const SimReport report = run_monte_carlo(cfg);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.inputs = {config_path};
  manifest.output = out_path;
  manifest.seed = cfg.master_seed;
  manifest.config_echo = config_echo_json(cfg);

  Sink sink(out_path);
  std::ostream& out = *sink.stream;
  out << manifest_comment(manifest) << "\n";
  out << "model,n,match,estimator,coverage,avg_length,mc_se\n";
  for (const auto& [kind, summary] : report.estimators) {
    out << static_cast<int>(cfg.dgp.model) << "," << cfg.population_size << ","
        << (cfg.match_method == MatchMethod::good ? "good" : "bad") << ","
        << estimator_name(kind) << "," << format_real(summary.coverage) << ","
        << format_real(summary.avg_length) << "," << format_real(summary.mc_se_coverage)
        << "\n";
  }
  return 0;
}

}  // namespace

SimConfig parse_config(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw DomainError(ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    stream >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(ErrorCode::ParseError, path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw DomainError(ErrorCode::ParseError, path + ": config must be a JSON object");
  }

  static const std::vector<std::string> known = {"model",        "n",     "seed",      "match",
                                                 "replications", "alpha", "estimators"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw DomainError(ErrorCode::ParseError, "unknown config key '" + key + "'");
    }
  }

  SimConfig cfg;
  try {
    const int model = j.at("model").get<int>();
    if (model != 1 && model != 2) {
      throw DomainError(ErrorCode::ParseError, "config key 'model' must be 1 or 2");
    }
    cfg.dgp.model = model == 1 ? DgpModel::model1 : DgpModel::model2;
    cfg.population_size = j.at("n").get<int>();
    cfg.master_seed = j.at("seed").get<std::uint64_t>();
    const std::string match = j.at("match").get<std::string>();
    if (match == "good") {
      cfg.match_method = MatchMethod::good;
    } else if (match == "bad") {
      cfg.match_method = MatchMethod::bad;
    } else {
      throw DomainError(ErrorCode::ParseError, "config key 'match' must be \"good\" or \"bad\"");
    }
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& name : j.at("estimators")) {
        cfg.estimators.push_back(estimator_from_name(name.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(ErrorCode::ParseError, path + ": " + e.what());
  }

  if (cfg.population_size < 2 || cfg.population_size % 2 != 0) {
    throw DomainError(ErrorCode::ParseError, "config key 'n' must be a positive even integer");
  }
  if (cfg.replications < 1) {
    throw DomainError(ErrorCode::ParseError, "config key 'replications' must be at least 1");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw DomainError(ErrorCode::ParseError, "config key 'alpha' must lie in (0,1)");
  }
  if (cfg.estimators.empty()) {
    throw DomainError(ErrorCode::ParseError, "config key 'estimators' must not be empty");
  }
  return cfg;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"design-based variance estimation for finely stratified experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string data_path;
  std::string plan_path;
  std::string out_path;
  std::string method = "greedy";
  std::string estimators_csv = "paired,imai,fogarty,alt";
  std::string statistic = "paired";
  std::string config_path;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::uint64_t cap = kDefaultEnumerationCap;
  int ell = 1;
  int threads = 1;

  CLI::App* pair_cmd = app.add_subcommand("pair", "pair strata by covariate means");
  pair_cmd->add_option("--data", data_path, "population CSV")->required();
  pair_cmd->add_option("--method", method, "adjacent|antipodal|greedy");
  pair_cmd->add_option("--ell", ell, "treated per stratum");
  pair_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* assign_cmd = app.add_subcommand("assign", "draw one stratified assignment");
  assign_cmd->add_option("--population", data_path, "population CSV")->required();
  assign_cmd->add_option("--seed", seed, "RNG seed")->required();
  assign_cmd->add_option("--ell", ell, "treated per stratum");
  assign_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* estimate_cmd = app.add_subcommand("estimate", "estimate effects and variances");
  estimate_cmd->add_option("--data", data_path, "observed-data CSV")->required();
  estimate_cmd->add_option("--estimators", estimators_csv, "comma list of estimators");
  estimate_cmd->add_option("--pairing", plan_path, "pairing plan CSV");
  estimate_cmd->add_option("--alpha", alpha, "nominal level");
  estimate_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact moments by enumeration");
  oracle_cmd->add_option("--population", data_path, "population CSV")->required();
  oracle_cmd->add_option("--plan", plan_path, "pairing plan CSV");
  oracle_cmd->add_option("--statistic", statistic, "delta_hat|paired|imai|fogarty|coarse|alt");
  oracle_cmd->add_option("--ell", ell, "treated per stratum");
  oracle_cmd->add_option("--cap", cap, "enumeration cap");
  oracle_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
  simulate_cmd->add_option("--config", config_path, "simulation config JSON")->required();
  simulate_cmd->add_option("--out", out_path, "output path (default stdout)");
  simulate_cmd->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (pair_cmd->parsed()) return run_pair(data_path, method, out_path, ell);
    if (assign_cmd->parsed()) return run_assign(data_path, seed, out_path, ell);
    if (estimate_cmd->parsed()) {
      return run_estimate(data_path, estimators_csv, plan_path, alpha, out_path);
    }
    if (oracle_cmd->parsed()) {
      return run_oracle(data_path, plan_path, statistic, out_path, ell, cap);
    }
    if (simulate_cmd->parsed()) return run_simulate(config_path, out_path, threads);
  } catch (const DomainError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace stratvar
