#pragma once

#include "vanet/oracle.hpp"
#include "vanet/temporal.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace vanet {

// Columns: second,n_vehicles,avg_delay_s,load_variance,avg_sinr,path_stability
void write_metrics_csv(std::ostream& out, const std::vector<SecondResult>& results);

// Columns: f1,f2,f3,f4,violation
void write_pareto_csv(std::ostream& out, const Population& front);

struct RunAggregate {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::size_t seconds = 0;
  double mean_avg_delay_s = 0.0;
  double mean_load_variance = 0.0;
  double mean_avg_sinr = 0.0;
  double mean_path_stability = 0.0;  // over seconds 2.. (second 1 has no predecessor)
  double mean_front_size = 0.0;
  double feasible_seconds = 0.0;  // share of seconds whose representative is feasible
  double weighted_instability = 0.0;  // w_c * mean_path_stability
};

RunAggregate aggregate(const std::vector<SecondResult>& results, double gamma, std::uint64_t seed, double w_c);

nlohmann::json summary_json(const std::vector<RunAggregate>& runs);

struct Series {
  std::string label;
  std::vector<SecondResult> const* results;
};

// Three pairwise projections (f1-f2, f1-f3, f2-f3) of every second's front, colored by second.
std::string front_svg(const std::vector<SecondResult>& results);

// Four metric time series, one line per series.
std::string metrics_svg(const std::vector<Series>& series);

// Writes metrics.csv, pareto_t<k>.csv, fronts.svg and metrics.svg into dir.
void write_run(const std::filesystem::path& dir, const std::vector<SecondResult>& results);

// Columns: f1,f2,f3,f4,violation,genome (genome as compact JSON)
void write_oracle_csv(std::ostream& out, const OracleFront& front);

nlohmann::json comparison_json(const OracleFront& oracle, const std::vector<OracleComparison>& runs,
                               const std::vector<std::uint64_t>& seeds);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vanet
