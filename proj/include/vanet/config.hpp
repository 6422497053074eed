#pragma once

#include "vanet/oracle.hpp"
#include "vanet/temporal.hpp"
#include "vanet/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSettings {
  // Vehicles of the tiny instance; empty means the built-in two-pair layout.
  std::vector<VehicleState> vehicles;
  // Relays of the previous second's representative, one row per vehicle; empty means no predecessor.
  std::vector<std::vector<VehicleId>> predecessor_relays;
  std::size_t hops = 1;
  double max_range_m = 300.0;
  std::vector<double> data_bits_grid{1e5, 1e6, 1e7};
  std::vector<double> power_mw_grid{1e3, 1e4, 1e5};
  std::size_t ga_pop_size = 200;
  std::size_t ga_generations = 200;
  std::vector<std::uint64_t> ga_seeds{1, 2, 3, 4, 5};
  unsigned threads = 0;  // 0: hardware concurrency
};

// Four vehicles in two well separated pairs, 12 m apart within each pair.
std::vector<VehicleState> default_oracle_vehicles();

struct RunConfig {
  OptimizerConfig optimizer;
  std::vector<double> gamma_sweep;  // empty: single run at optimizer.gamma
  double w_c = 0.3;                 // time continuity weight, reporting only
  ScenarioSpec scenario = ScenarioSpec::defaults_for(Archetype::increasing);
  std::string trajectory_path;      // non-empty: read highD-style CSV instead of synthesizing
  std::string output_dir = "out";
  OracleSettings oracle;
};

void validate(const RunConfig& c);

// Field names in errors are dotted paths, e.g. "thresholds.min_sinr_db".
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig parse_config_toml(std::string_view text);
RunConfig parse_config_json(std::string_view text);
std::string config_to_toml(const RunConfig& c);

// .json files are read as JSON, everything else as TOML.
RunConfig load_config(const std::filesystem::path& path);

std::vector<Snapshot> load_snapshots(const RunConfig& c);

TinyInstance make_tiny_instance(const OracleSettings& o, std::uint64_t shadow_seed);

}  // namespace vanet
