#include "vanet/config.hpp"
#include "vanet/format.hpp"
#include "vanet/oracle.hpp"
#include "vanet/report.hpp"
#include "vanet/temporal.hpp"
#include "vanet/trajectory.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace vanet;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_gamma_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double g = 0.0;
    if (!parse_number(item, g)) throw UsageError("--gamma: '" + item + "' is not a number");
    if (!(g >= 0.0 && g <= 1.0)) throw UsageError("--gamma: " + item + " is outside [0, 1]");
    out.push_back(g);
  }
  if (out.empty()) throw UsageError("--gamma: empty list");
  return out;
}

std::string gamma_dir(double g) { return "gamma_" + format_double(g); }

int cmd_run(const std::string& config_path, const std::string& gamma_text, const std::uint64_t* seed_flag,
            const std::string& out_flag) {
  RunConfig cfg = load_config(config_path);
  if (seed_flag) cfg.optimizer.seed = *seed_flag;
  if (!out_flag.empty()) cfg.output_dir = out_flag;
  std::vector<double> gammas = cfg.gamma_sweep;
  if (!gamma_text.empty()) gammas = parse_gamma_list(gamma_text);
  const bool sweep = gammas.size() > 1;
  if (gammas.empty()) gammas.push_back(cfg.optimizer.gamma);
  validate(cfg);

  std::vector<Snapshot> snapshots;
  try {
    snapshots = load_snapshots(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const TrajectoryError& e) {
    throw ConfigError(std::string("scenario.trajectory: ") + e.what());
  }
  std::cerr << "scenario: " << snapshots.size() << " seconds, " << snapshots.front().size() << " -> "
            << snapshots.back().size() << " vehicles\n";

  const std::filesystem::path root = cfg.output_dir;
  std::filesystem::create_directories(root);
  write_text(root / "config.toml", config_to_toml(cfg));

  std::vector<std::vector<SecondResult>> results(gammas.size());
  std::vector<std::exception_ptr> errors(gammas.size());
  std::mutex log_mutex;
  auto work = [&](std::size_t i) {
    try {
      OptimizerConfig oc = cfg.optimizer;
      oc.gamma = gammas[i];
      oc.seed = cfg.optimizer.seed ^ static_cast<std::uint64_t>(i);
      results[i] = run_scenario(snapshots, oc, [&](const SecondResult& r) {
        std::lock_guard lock(log_mutex);
        std::cerr << "gamma " << format_double(gammas[i]) << " second " << r.second_index << ": n=" << r.n_vehicles
                  << " front=" << r.pareto_front.size()
                  << (r.representative().objectives.feasible() ? "" : " (infeasible)") << '\n';
      });
      write_run(sweep ? root / gamma_dir(gammas[i]) : root, results[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < gammas.size(); ++i) pool.emplace_back(work, i);
  work(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<RunAggregate> aggregates;
  std::vector<Series> series;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    aggregates.push_back(aggregate(results[i], gammas[i], cfg.optimizer.seed ^ i, cfg.w_c));
    series.push_back({"gamma " + format_double(gammas[i]), &results[i]});
  }
  auto summary = summary_json(aggregates);
  summary["w_c"] = cfg.w_c;
  write_text(root / "summary.json", summary.dump(2) + "\n");
  if (sweep) write_text(root / "metrics.svg", metrics_svg(series));

  std::cout << "gamma,mean_avg_delay_s,mean_load_variance,mean_avg_sinr,mean_path_stability,feasible_seconds\n";
  for (const auto& a : aggregates)
    std::cout << format_double(a.gamma) << ',' << format_double(a.mean_avg_delay_s) << ','
              << format_double(a.mean_load_variance) << ',' << format_double(a.mean_avg_sinr) << ','
              << format_double(a.mean_path_stability) << ',' << format_double(a.feasible_seconds) << '\n';
  std::cerr << "wrote " << root.string() << '\n';
  return exit_ok;
}

int cmd_oracle(const std::string& config_path, const std::string& out_flag) {
  RunConfig cfg = load_config(config_path);
  if (!out_flag.empty()) cfg.output_dir = out_flag;
  const auto& o = cfg.oracle;
  const TinyInstance instance = make_tiny_instance(o, cfg.optimizer.seed);

  OracleFront front;
  try {
    front = enumerate_front(instance, cfg.optimizer.channel, cfg.optimizer.thresholds, o.threads);
  } catch (const OracleRefusal& e) {
    throw UsageError(e.what());
  }
  std::cerr << "oracle: " << front.evaluations << " evaluations, " << front.points.size() << " front points\n";

  std::vector<ObjectiveVector> oracle_points = front.points;
  const Point ref = reference_point(oracle_points);
  EvoParams evo = cfg.optimizer.evo;
  evo.pop_size = o.ga_pop_size;
  evo.max_generations = o.ga_generations;

  std::vector<OracleComparison> runs;
  std::size_t failures = 0;
  for (std::uint64_t seed : o.ga_seeds) {
    const Population ga = ga_front(instance, cfg.optimizer.channel, cfg.optimizer.thresholds, evo, seed);
    std::vector<ObjectiveVector> pts;
    for (const auto& ind : ga) pts.push_back(ind.objectives);
    runs.push_back(compare_to_oracle(pts, oracle_points, ref));
    const auto& c = runs.back();
    failures += c.dominated > 0 ? 1 : 0;
    std::cout << "seed " << seed << ": ga_points=" << c.ga_points << " dominated=" << c.dominated
              << " hv_ratio=" << format_double(c.ratio) << '\n';
  }

  const std::filesystem::path root = cfg.output_dir;
  std::filesystem::create_directories(root);
  std::ostringstream csv;
  write_oracle_csv(csv, front);
  write_text(root / "oracle_front.csv", csv.str());
  write_text(root / "oracle_report.json", comparison_json(front, runs, o.ga_seeds).dump(2) + "\n");
  std::cerr << "wrote " << root.string() << '\n';
  return exit_ok;
}

int cmd_gen_scenario(const std::string& archetype, int duration, const std::uint64_t* seed, const std::string& out) {
  Archetype a;
  try {
    a = parse_archetype(archetype);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--archetype: ") + e.what());
  }
  ScenarioSpec spec = ScenarioSpec::defaults_for(a);
  spec.duration_s = duration;
  if (seed) spec.rng_seed = *seed;
  try {
    validate(spec);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const auto rows = synthesize_frames(spec);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + out);
  write_trajectory_csv(file, rows);
  if (!file) throw std::runtime_error("write failed: " + out);
  std::cerr << "wrote " << rows.size() << " rows to " << out << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal multi-objective relay and power optimization for vehicular networks"};
  app.require_subcommand(1);

  std::string config_path, gamma_text, out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "optimize every second of a scenario");
  run->add_option("--config", config_path, "TOML or JSON config")->required();
  run->add_option("--gamma", gamma_text, "comma-separated inheritance ratios; several mean a sweep");
  auto* run_seed = run->add_option("--seed", seed, "run seed");
  run->add_option("--out", out_dir, "output directory");

  auto* oracle = app.add_subcommand("oracle", "enumerate a tiny instance and compare the GA against it");
  oracle->add_option("--config", config_path, "TOML or JSON config")->required();
  oracle->add_option("--out", out_dir, "output directory");

  std::string archetype, csv_out;
  int duration = 40;
  auto* gen = app.add_subcommand("gen-scenario", "write a synthetic trajectory CSV");
  gen->add_option("--archetype", archetype, "increasing, fluctuating or decreasing")->required();
  gen->add_option("--duration", duration, "seconds");
  auto* gen_seed = gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", csv_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*run) return cmd_run(config_path, gamma_text, *run_seed ? &seed : nullptr, out_dir);
    if (*oracle) return cmd_oracle(config_path, out_dir);
    if (*gen) return cmd_gen_scenario(archetype, duration, *gen_seed ? &seed : nullptr, csv_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}
