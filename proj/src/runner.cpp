#include "dyadim/runner.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadim/counterexample.hpp"
#include "dyadim/detail/csv.hpp"
#include "dyadim/dimension.hpp"
#include "dyadim/entropy.hpp"
#include "dyadim/rng.hpp"

namespace dyadim {

namespace {

using detail::fmt_full;
using detail::fmt_summary;
using detail::fmt_u64;

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    names_.push_back(name);
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return stamp.str();
}

MarkovMeasure require_measure(const ExperimentConfig& config) {
  if (!config.has_weights) {
    throw ConfigError("command '" + config.command + "' needs a [weights] section");
  }
  return MarkovMeasure(config.weights.build());
}

void run_entropy(const ExperimentConfig& config, OutputWriter& out,
                 std::vector<std::string>& summary) {
  const MarkovMeasure m = require_measure(config);
  if (config.horizon == 0) {
    throw ConfigError("entropy needs horizon >= 1");
  }
  const std::uint64_t horizon =
      config.oracle ? std::min<std::uint64_t>(config.horizon, kBruteforceMaxGeneration)
                    : config.horizon;
  const EntropyProfile profile = entropy_profile(m, horizon);
  std::vector<double> oracle;
  if (config.oracle) {
    oracle = entropy_bruteforce_levels(m, static_cast<unsigned>(horizon));
  }

  std::ostringstream csv;
  csv << "n,H_nats,c_n,pi0" << (config.oracle ? ",H_bruteforce" : "") << "\n";
  double max_diff = 0.0;
  for (std::uint64_t i = 0; i < horizon; ++i) {
    csv << fmt_u64(i + 1) << "," << fmt_full(profile.H[i]) << "," << fmt_full(profile.c[i])
        << "," << fmt_full(profile.pi0[i]);
    if (config.oracle) {
      csv << "," << fmt_full(oracle[i]);
      max_diff = std::max(max_diff, std::abs(profile.H[i] - oracle[i]));
    }
    csv << "\n";
  }
  out.write("entropy.csv", csv.str());

  summary.push_back("entropy: horizon=" + fmt_u64(horizon) +
                    " H=" + fmt_summary(profile.H.back()) +
                    " c=" + fmt_summary(profile.c.back()) +
                    " pi0=" + fmt_summary(profile.pi0.back()));
  if (config.oracle) {
    summary.push_back("entropy oracle: max|H - H_bruteforce|=" + fmt_summary(max_diff));
  }
}

void run_dimension(const ExperimentConfig& config, const RunOptions& options, OutputWriter& out,
                   std::vector<std::string>& summary) {
  const MarkovMeasure m = require_measure(config);
  const DimensionEstimate estimate = dimension_estimate(m, config.horizon, config.window);

  std::ostringstream csv;
  csv << "lower,upper,mode,horizon,window\n";
  csv << fmt_full(estimate.lower) << "," << fmt_full(estimate.upper) << ","
      << to_string(estimate.mode) << "," << fmt_u64(estimate.horizon) << ","
      << fmt_u64(estimate.window) << "\n";
  out.write("dimension.csv", csv.str());

  summary.push_back("dimension: lower=" + fmt_summary(estimate.lower) +
                    " upper=" + fmt_summary(estimate.upper) + " mode=" +
                    to_string(estimate.mode));

  if (!config.checkpoints.empty()) {
    const SmbReport report = smb_check(m, config.depth, config.paths, config.seed,
                                       config.checkpoints, options.threads);
    std::ostringstream smb;
    smb << "checkpoint,mean_dev,max_dev,paths\n";
    for (const SmbSummary& row : report.summary) {
      smb << fmt_u64(row.checkpoint) << "," << fmt_full(row.mean_dev) << ","
          << fmt_full(row.max_dev) << "," << fmt_u64(report.paths) << "\n";
    }
    out.write("smb.csv", smb.str());
    for (const SmbSummary& row : report.summary) {
      summary.push_back("smb: checkpoint=" + fmt_u64(row.checkpoint) +
                        " c_ref=" + fmt_summary(row.c_ref) +
                        " mean_dev=" + fmt_summary(row.mean_dev) +
                        " median_dev=" + fmt_summary(row.median_dev) +
                        " max_dev=" + fmt_summary(row.max_dev));
    }
  }
}

void run_sample(const ExperimentConfig& config, OutputWriter& out,
                std::vector<std::string>& summary) {
  const MarkovMeasure m = require_measure(config);
  if (config.depth == 0 || config.paths == 0) {
    throw ConfigError("sample needs depth >= 1 and paths >= 1");
  }
  for (std::uint64_t path = 0; path < config.paths; ++path) {
    SeededRng rng(derive_seed(config.seed, path));
    const PathTrace trace = m.sample_path(config.depth, rng);
    std::ostringstream csv;
    csv << "n,bit,x_n_nats,log_mass_nats\n";
    for (std::uint64_t i = 0; i < config.depth; ++i) {
      csv << fmt_u64(i + 1) << "," << trace.address.bit(i) << ","
          << fmt_full(trace.increments[i]) << "," << fmt_full(trace.cumulative[i]) << "\n";
    }
    out.write("path_" + fmt_u64(path) + ".csv", csv.str());
  }
  summary.push_back("sample: paths=" + fmt_u64(config.paths) + " depth=" +
                    fmt_u64(config.depth) + " seed=" + fmt_u64(config.seed));
}

void run_window_gap(const ExperimentConfig& config, OutputWriter& out,
                    std::vector<std::string>& summary) {
  const MarkovMeasure m = require_measure(config);
  if (config.n_max == 0 || config.k_max == 0) {
    throw ConfigError("window-gap needs n_max >= 1 and k_max >= 1");
  }

  // Per-cell table of the window pair; the bound column carries the shifted
  // index the uniform bound is stated for (a k-window at generation n is the
  // shifted gap of a (k-1)-window at generation n+1).
  std::ostringstream csv;
  csv << "n,k,a,b,delta,eta_bound,bound_ok\n";
  double max_delta = 0.0;
  std::uint64_t bound_violations = 0;
  for (std::uint64_t n = 1; n <= config.n_max; ++n) {
    for (std::uint64_t k = 1; k <= config.k_max; ++k) {
      const WindowGap gap = window_entropy(m, n, k);
      const double eta = eta_bound(k - 1);
      const bool ok = gap.delta <= eta;
      bound_violations += ok ? 0 : 1;
      max_delta = std::max(max_delta, gap.delta);
      csv << fmt_u64(n) << "," << fmt_u64(k) << "," << fmt_full(gap.a) << ","
          << fmt_full(gap.b) << "," << fmt_full(gap.delta) << "," << fmt_full(eta) << ","
          << (ok ? 1 : 0) << "\n";
    }
  }
  out.write("windowgap.csv", csv.str());

  const DeltaCheckReport report = delta_recursion_check(m, config.n_max, config.k_max);
  std::ostringstream check;
  check << "n,k,delta,delta_shifted,recursion_rhs,recursion_ok,eta,eta_ok\n";
  for (const DeltaCheckRow& row : report.rows) {
    check << fmt_u64(row.n) << "," << fmt_u64(row.k) << "," << fmt_full(row.delta) << ","
          << fmt_full(row.delta_shifted) << "," << fmt_full(row.recursion_rhs) << ","
          << (row.recursion_ok ? 1 : 0) << "," << fmt_full(row.eta) << ","
          << (row.eta_ok ? 1 : 0) << "\n";
  }
  out.write("deltacheck.csv", check.str());

  summary.push_back("window-gap: n_max=" + fmt_u64(config.n_max) + " k_max=" +
                    fmt_u64(config.k_max) + " max_delta=" + fmt_summary(max_delta) +
                    " bound_violations=" + fmt_u64(bound_violations));
  summary.push_back("delta-check: comparisons=" + fmt_u64(report.comparisons) +
                    " recursion_violations=" + fmt_u64(report.recursion_violations) +
                    " eta_violations=" + fmt_u64(report.eta_violations) +
                    " worst_eta_margin=" + fmt_summary(report.worst_eta_margin));
}

void run_lemma_scan(const ExperimentConfig& config, OutputWriter& out,
                    std::vector<std::string>& summary) {
  const EntropyBoundScan scan = lemma2_scan(config.grid_step);
  std::ostringstream csv;
  csv << "p,q,lhs,rhs,excess\n";
  for (const EntropyBoundPoint& point : scan.violations) {
    csv << fmt_full(point.p) << "," << fmt_full(point.q) << "," << fmt_full(point.lhs) << ","
        << fmt_full(point.rhs) << "," << fmt_full(point.lhs - point.rhs) << "\n";
  }
  out.write("lemma_scan.csv", csv.str());
  summary.push_back("lemma-scan: grid_step=" + fmt_summary(scan.grid_step) + " points=" +
                    fmt_u64(scan.points_checked) + " violations=" +
                    fmt_u64(scan.violations.size()) + " max_excess=" +
                    fmt_summary(scan.max_excess));
}

void run_continuity(const ExperimentConfig& config, OutputWriter& out,
                    std::vector<std::string>& summary) {
  if (!config.has_weights) {
    throw ConfigError("command 'continuity' needs a [weights] section");
  }
  if (config.zetas.empty()) {
    throw ConfigError("continuity needs a non-empty 'zetas' list");
  }
  const PerturbMode mode = config.perturb_mode == "uniform-shift" ? PerturbMode::UniformShift
                                                                  : PerturbMode::SeededRandom;
  const std::vector<ContinuityRow> rows = continuity_sweep(
      config.weights.build(), config.zetas, mode, config.seed, config.horizon, config.window);

  std::ostringstream csv;
  csv << "zeta,realized_distance,lower_diff,upper_diff,mode\n";
  double max_lower = 0.0;
  double max_upper = 0.0;
  for (const ContinuityRow& row : rows) {
    max_lower = std::max(max_lower, row.lower_diff);
    max_upper = std::max(max_upper, row.upper_diff);
    csv << fmt_full(row.zeta) << "," << fmt_full(row.realized_distance) << ","
        << fmt_full(row.lower_diff) << "," << fmt_full(row.upper_diff) << ","
        << to_string(row.mode) << "\n";
  }
  out.write("continuity.csv", csv.str());
  summary.push_back("continuity: rows=" + fmt_u64(rows.size()) + " max_lower_diff=" +
                    fmt_summary(max_lower) + " max_upper_diff=" + fmt_summary(max_upper));
}

void run_counterexample(const ExperimentConfig& config, OutputWriter& out,
                        std::vector<std::string>& summary) {
  if (config.stages == 0) {
    throw ConfigError("counterexample needs stages >= 1");
  }
  if (!(config.epsilon > 0.0 && config.epsilon < 0.25)) {
    throw ConfigError("counterexample needs epsilon in (0, 1/4)");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw ConfigError("counterexample needs delta in (0, 1)");
  }

  const CounterexamplePair pair =
      build_pair(config.epsilon, config.delta, static_cast<unsigned>(config.stages));
  out.write("stage_plan.json", to_json(pair.plan) + "\n");

  const RatioReport ratio =
      verify_ratio_condition(pair.mu, pair.nu, pair.plan.depths.back());
  std::ostringstream csv;
  csv << "regime,step_mu,step_nu,log_gap\n";
  for (const RatioClass& entry : ratio.classes) {
    csv << entry.regime << "," << fmt_full(entry.step_mu) << "," << fmt_full(entry.step_nu)
        << "," << fmt_full(entry.log_gap) << "\n";
  }
  out.write("ratio_report.csv", csv.str());

  const DimensionGapReport gap = dimension_gap_report(pair.mu, pair.nu, pair.plan);
  nlohmann::json gap_json;
  gap_json["dim_mu_estimate"] = gap.dim_mu_estimate;
  gap_json["dim_nu_bound"] = gap.dim_nu_bound;
  gap_json["gap"] = gap.gap;
  gap_json["asymptotic"] = gap.asymptotic;
  gap_json["mu_exception_tail"] = gap.mu_exception_tail;
  gap_json["nu_exception_tail"] = gap.nu_exception_tail;
  out.write("gap_report.json", gap_json.dump(2) + "\n");

  std::string depths;
  for (const std::uint64_t depth : pair.plan.depths) {
    depths += (depths.empty() ? "" : ",") + fmt_u64(depth);
  }
  summary.push_back("counterexample: stages=" + fmt_u64(pair.plan.stages()) + " depths=" +
                    depths);
  for (std::size_t stage = 0; stage < pair.plan.stages(); ++stage) {
    double min_mass = 1.0;
    for (const RegimeAchieved& regime : pair.plan.achieved[stage]) {
      if (regime.present) {
        min_mass = std::min(min_mass, regime.min_value());
      }
    }
    summary.push_back("stage " + fmt_u64(stage + 1) + ": depth=" +
                      fmt_u64(pair.plan.depths[stage]) + " min_mass=" + fmt_summary(min_mass));
  }
  summary.push_back("ratio: sup_log_gap=" + fmt_summary(ratio.sup_log_gap));
  summary.push_back("gap: dim_mu=" + fmt_summary(gap.dim_mu_estimate) + " dim_nu_bound=" +
                    fmt_summary(gap.dim_nu_bound) + " gap=" + fmt_summary(gap.gap) +
                    (gap.asymptotic ? " asymptotic=true" : " asymptotic=false"));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig resolved = config;
  if (!options.output_dir.empty()) {
    resolved.output_dir = options.output_dir;
  }
  if (options.seed_override) {
    resolved.seed = options.seed;
  }
  resolved.oracle = resolved.oracle || options.oracle;
  if (resolved.command.empty()) {
    throw ConfigError("no command given");
  }

  OutputWriter out{std::filesystem::path(resolved.output_dir)};
  std::vector<std::string> summary;
  if (resolved.command == "entropy") {
    run_entropy(resolved, out, summary);
  } else if (resolved.command == "dimension") {
    run_dimension(resolved, options, out, summary);
  } else if (resolved.command == "sample") {
    run_sample(resolved, out, summary);
  } else if (resolved.command == "window-gap") {
    run_window_gap(resolved, out, summary);
  } else if (resolved.command == "lemma-scan") {
    run_lemma_scan(resolved, out, summary);
  } else if (resolved.command == "continuity") {
    run_continuity(resolved, out, summary);
  } else if (resolved.command == "counterexample") {
    run_counterexample(resolved, out, summary);
  } else {
    throw ConfigError("unknown command '" + resolved.command + "'");
  }

  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(config_to_json(resolved));
  manifest["files"] = out.names();
  manifest["timestamp"] = utc_timestamp();
  out.write("manifest.json", manifest.dump(2) + "\n");

  RunResult result;
  result.files_written = out.names();
  result.summary_lines = std::move(summary);
  return result;
}

namespace {

unsigned worker_count() {
  const unsigned hardware = std::thread::hardware_concurrency();
  unsigned threads = hardware == 0 ? 1 : hardware;
  if (const char* env = std::getenv("DYADIM_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) {
      threads = std::min<unsigned long>(threads, cap);
    }
  }
  return threads;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"non-homogeneous Markov measures on the dyadic tree"};
  app.name("dyadim");
  std::string command;
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool oracle = false;
  app.add_option("command", command, "one of entropy|dimension|sample|window-gap|lemma-scan|continuity|counterexample")
      ->required()
      ->check(CLI::IsMember({"entropy", "dimension", "sample", "window-gap", "lemma-scan",
                             "continuity", "counterexample"}));
  app.add_option("--config", config_path, "experiment config file (INI-style or JSON)")
      ->required();
  app.add_option("--output-dir", output_dir, "override the config output directory");
  CLI::Option* seed_option = app.add_option("--seed", seed, "override the config master seed");
  app.add_flag("--oracle", oracle, "also emit brute-force cross-check columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }

  try {
    ExperimentConfig config = parse_config_file(config_path);
    if (config.command.empty()) {
      config.command = command;
    } else if (config.command != command) {
      throw ConfigError("config declares command '" + config.command + "' but '" + command +
                        "' was requested");
    }
    RunOptions options;
    options.output_dir = output_dir;
    options.seed_override = seed_option->count() > 0;
    options.seed = seed;
    options.oracle = oracle;
    options.threads = worker_count();

    const RunResult result = run_experiment(config, options);
    for (const std::string& line : result.summary_lines) {
      std::cout << line << "\n";
    }
    return 0;
  } catch (const ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}

}  // namespace dyadim
