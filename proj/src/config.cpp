#include "vanet/config.hpp"

#include "vanet/toml_lite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <type_traits>
#include <set>
#include <sstream>

namespace vanet {

using nlohmann::json;

std::vector<VehicleState> default_oracle_vehicles() {
  return {
      {1, 0.0, 0.0, 30.0, 0.0},
      {2, 12.0, 3.75, 28.0, 0.0},
      {3, 250.0, 0.0, 30.0, 0.0},
      {4, 262.0, 3.75, 31.0, 0.0},
  };
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Reads one JSON object, remembering which keys were consumed so leftovers can be reported.
class Fields {
 public:
  Fields(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(label() + ": expected a table");
  }

  std::string where(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }

  const json* find(const std::string& k) {
    used_.insert(k);
    auto it = obj_.find(k);
    return it == obj_.end() ? nullptr : &*it;
  }

  bool has(const std::string& k) const { return obj_.contains(k); }

  void get(const std::string& k, double& out) {
    if (const json* v = find(k)) out = as_double(*v, where(k));
  }

  template <typename U>
    requires std::is_unsigned_v<U>
  void get(const std::string& k, U& out) {
    if (const json* v = find(k)) {
      const std::uint64_t n = as_count(*v, where(k));
      if (n > std::numeric_limits<U>::max()) throw ConfigError(where(k) + ": too large");
      out = static_cast<U>(n);
    }
  }

  void get(const std::string& k, int& out) {
    if (const json* v = find(k)) {
      if (!v->is_number_integer()) throw ConfigError(where(k) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void get(const std::string& k, std::string& out) {
    if (const json* v = find(k)) {
      if (!v->is_string()) throw ConfigError(where(k) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void get(const std::string& k, std::vector<double>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(where(k) + ": expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_double((*v)[i], where(k) + "[" + std::to_string(i) + "]"));
    }
  }

  void get(const std::string& k, std::vector<std::uint64_t>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(where(k) + ": expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_count((*v)[i], where(k) + "[" + std::to_string(i) + "]"));
    }
  }

  void range(const std::string& k, double& lo, double& hi) {
    std::vector<double> v;
    get(k, v);
    if (!has(k)) return;
    if (v.size() != 2) throw ConfigError(where(k) + ": expected [min, max]");
    lo = v[0];
    hi = v[1];
  }

  // Either `linear_key` or `db_key`, not both.
  void linear_or_db(const std::string& linear_key, const std::string& db_key, double& out,
                    double (*convert)(double) = db_to_linear) {
    if (has(linear_key) && has(db_key))
      throw ConfigError(where(db_key) + ": conflicts with " + where(linear_key) + ", give one");
    get(linear_key, out);
    double alt = 0.0;
    if (has(db_key)) {
      get(db_key, alt);
      out = convert(alt);
    } else {
      used_.insert(db_key);
    }
  }

  Fields table(const std::string& k) {
    static const json empty = json::object();
    const json* v = find(k);
    return Fields(v ? *v : empty, where(k));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> used_;

  std::string label() const { return prefix_.empty() ? "config" : prefix_; }

  static double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
  }

  static std::uint64_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      if (i < 0) throw ConfigError(path + ": must be >= 0");
      return static_cast<std::uint64_t>(i);
    }
    throw ConfigError(path + ": expected a non-negative integer");
  }
};

void read_channel(Fields f, ChannelParams& c) {
  f.get("carrier_hz", c.carrier_hz);
  f.get("reference_distance_m", c.reference_distance_m);
  f.get("path_loss_exponent", c.path_loss_exponent);
  f.linear_or_db("antenna_gain", "antenna_gain_db", c.antenna_gain);
  f.linear_or_db("system_loss", "system_loss_db", c.system_loss);
  f.get("shadow_sigma_db", c.shadow_sigma_db);
  f.get("doppler_threshold_hz", c.doppler_threshold_hz);
  f.get("temperature_k", c.temperature_k);
  f.get("bandwidth_hz", c.bandwidth_hz);
  f.get("boltzmann", c.boltzmann);
  f.get("min_distance_m", c.min_distance_m);
  std::string model(to_string(c.interference));
  f.get("interference", model);
  try {
    c.interference = parse_interference_model(model);
  } catch (const std::exception& e) {
    throw ConfigError(f.where("interference") + ": " + e.what());
  }
  f.finish();
}

void read_bounds(Fields f, Bounds& b) {
  f.range("data_bits", b.data_bits_min, b.data_bits_max);
  if (f.has("power_mw") && f.has("power_w"))
    throw ConfigError(f.where("power_w") + ": conflicts with " + f.where("power_mw") + ", give one");
  f.range("power_mw", b.power_mw_min, b.power_mw_max);
  if (f.has("power_w")) {
    f.range("power_w", b.power_mw_min, b.power_mw_max);
    b.power_mw_min *= 1000.0;
    b.power_mw_max *= 1000.0;
  } else {
    f.find("power_w");
  }
  f.get("hops", b.hops);
  f.get("max_range_m", b.max_range_m);
  f.get("data_bits_grid", b.data_bits_grid);
  f.get("power_mw_grid", b.power_mw_grid);
  f.finish();
}

void read_evolution(Fields f, EvoParams& e) {
  f.get("pop_size", e.pop_size);
  f.get("max_generations", e.max_generations);
  f.get("p_crossover", e.p_crossover);
  f.get("p_mutation", e.p_mutation);
  f.get("eta_c", e.eta_c);
  f.get("eta_m", e.eta_m);
  f.get("tournament_size", e.tournament_size);
  f.finish();
}

double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }
double ms_to_s(double ms) { return ms / 1000.0; }

void read_thresholds(Fields f, QosThresholds& t) {
  f.linear_or_db("min_received_w", "min_received_dbm", t.min_received_w, dbm_to_w);
  f.linear_or_db("min_sinr", "min_sinr_db", t.min_sinr);
  f.linear_or_db("max_delay_s", "max_delay_ms", t.max_delay_s, ms_to_s);
  f.finish();
}

void read_scenario(Fields f, RunConfig& c) {
  if (const json* a = f.find("archetype")) {
    if (!a->is_string()) throw ConfigError(f.where("archetype") + ": expected a string");
    try {
      c.scenario = ScenarioSpec::defaults_for(parse_archetype(a->get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(f.where("archetype") + ": " + e.what());
    }
  }
  auto& s = c.scenario;
  f.get("duration_s", s.duration_s);
  f.get("road_length_m", s.road_length_m);
  f.get("lane_count", s.lane_count);
  f.get("initial_vehicles", s.initial_vehicles);
  f.get("arrival_rate", s.arrival_rate);
  f.get("departure_rate", s.departure_rate);
  f.get("fluctuation_period_s", s.fluctuation_period_s);
  f.get("frame_rate", s.frame_rate);
  f.get("min_speed", s.min_speed);
  f.get("max_speed", s.max_speed);
  f.get("seed", s.rng_seed);
  f.get("trajectory", c.trajectory_path);
  f.finish();
}

VehicleState read_vehicle(const json& v, const std::string& path) {
  VehicleState out;
  if (v.is_array()) {
    if (v.size() != 5) throw ConfigError(path + ": expected [id, x, y, vx, vy]");
    for (std::size_t i = 0; i < 5; ++i)
      if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    if (!v[0].is_number_integer()) throw ConfigError(path + "[0]: id must be an integer");
    return {v[0].get<VehicleId>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>(), v[4].get<double>()};
  }
  Fields f(v, path);
  std::uint64_t id = 0;
  if (!f.has("id")) throw ConfigError(path + ".id: missing");
  f.get("id", id);
  out.id = static_cast<VehicleId>(id);
  f.get("x", out.x);
  f.get("y", out.y);
  f.get("vx", out.vx);
  f.get("vy", out.vy);
  f.finish();
  return out;
}

void read_oracle(Fields f, OracleSettings& o) {
  if (const json* vs = f.find("vehicles")) {
    if (!vs->is_array()) throw ConfigError(f.where("vehicles") + ": expected an array");
    o.vehicles.clear();
    for (std::size_t i = 0; i < vs->size(); ++i)
      o.vehicles.push_back(read_vehicle((*vs)[i], f.where("vehicles") + "[" + std::to_string(i) + "]"));
  }
  if (const json* ps = f.find("predecessor_relays")) {
    const std::string where = f.where("predecessor_relays");
    if (!ps->is_array()) throw ConfigError(where + ": expected an array of relay lists");
    o.predecessor_relays.clear();
    for (std::size_t i = 0; i < ps->size(); ++i) {
      const json& row = (*ps)[i];
      const std::string at = where + "[" + std::to_string(i) + "]";
      if (!row.is_array()) throw ConfigError(at + ": expected an array of vehicle ids");
      std::vector<VehicleId> relays;
      for (const auto& r : row) {
        if (!r.is_number_integer()) throw ConfigError(at + ": vehicle ids must be integers");
        relays.push_back(r.get<VehicleId>());
      }
      o.predecessor_relays.push_back(std::move(relays));
    }
  }
  f.get("hops", o.hops);
  f.get("max_range_m", o.max_range_m);
  f.get("data_bits_grid", o.data_bits_grid);
  f.get("power_mw_grid", o.power_mw_grid);
  f.get("ga_pop_size", o.ga_pop_size);
  f.get("ga_generations", o.ga_generations);
  f.get("ga_seeds", o.ga_seeds);
  f.get("threads", o.threads);
  f.finish();
}

template <typename Fn>
void checked(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    throw ConfigError(what.rfind(section, 0) == 0 ? what : section + ": " + what);
  }
}

}  // namespace

void validate(const RunConfig& c) {
  checked("channel", [&] { validate(c.optimizer.channel); });
  checked("bounds", [&] { validate(c.optimizer.bounds); });
  checked("evolution", [&] { validate(c.optimizer.evo); });
  checked("thresholds", [&] { validate(c.optimizer.thresholds); });
  if (!(c.optimizer.gamma >= 0.0 && c.optimizer.gamma <= 1.0)) throw ConfigError("gamma: must be in [0, 1]");
  for (std::size_t i = 0; i < c.gamma_sweep.size(); ++i)
    if (!(c.gamma_sweep[i] >= 0.0 && c.gamma_sweep[i] <= 1.0))
      throw ConfigError("gamma_sweep[" + std::to_string(i) + "]: must be in [0, 1]");
  if (!(c.w_c >= 0.0 && c.w_c <= 1.0)) throw ConfigError("w_c: must be in [0, 1]");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  if (c.trajectory_path.empty()) checked("scenario", [&] { validate(c.scenario); });
  else if (c.scenario.frame_rate < 1) throw ConfigError("scenario.frame_rate: must be >= 1");

  const auto& o = c.oracle;
  if (o.hops < 1) throw ConfigError("oracle.hops: must be >= 1");
  if (!(o.max_range_m > 0.0)) throw ConfigError("oracle.max_range_m: must be > 0");
  if (o.data_bits_grid.empty()) throw ConfigError("oracle.data_bits_grid: must not be empty");
  if (o.power_mw_grid.empty()) throw ConfigError("oracle.power_mw_grid: must not be empty");
  for (double v : o.data_bits_grid)
    if (!(v > 0.0)) throw ConfigError("oracle.data_bits_grid: values must be > 0");
  for (double v : o.power_mw_grid)
    if (!(v > 0.0)) throw ConfigError("oracle.power_mw_grid: values must be > 0");
  if (o.ga_pop_size < 4 || o.ga_pop_size % 2 != 0) throw ConfigError("oracle.ga_pop_size: must be even and >= 4");
  if (o.ga_seeds.empty()) throw ConfigError("oracle.ga_seeds: must not be empty");
  if (!o.predecessor_relays.empty()) {
    const std::size_t n = o.vehicles.empty() ? default_oracle_vehicles().size() : o.vehicles.size();
    if (o.predecessor_relays.size() != n)
      throw ConfigError("oracle.predecessor_relays: need one row per vehicle (" + std::to_string(n) + ")");
    for (std::size_t i = 0; i < n; ++i)
      if (o.predecessor_relays[i].size() != o.hops)
        throw ConfigError("oracle.predecessor_relays[" + std::to_string(i) + "]: need " + std::to_string(o.hops) +
                          " relays");
  }
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  Fields top(doc, "");
  top.get("seed", c.optimizer.seed);
  top.get("gamma", c.optimizer.gamma);
  top.get("gamma_sweep", c.gamma_sweep);
  top.get("w_c", c.w_c);
  top.get("output_dir", c.output_dir);
  read_scenario(top.table("scenario"), c);
  read_channel(top.table("channel"), c.optimizer.channel);
  read_bounds(top.table("bounds"), c.optimizer.bounds);
  read_evolution(top.table("evolution"), c.optimizer.evo);
  read_thresholds(top.table("thresholds"), c.optimizer.thresholds);
  read_oracle(top.table("oracle"), c.oracle);
  top.finish();
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  const auto& o = c.optimizer;
  json doc;
  doc["seed"] = o.seed;
  doc["gamma"] = o.gamma;
  doc["gamma_sweep"] = c.gamma_sweep;
  doc["w_c"] = c.w_c;
  doc["output_dir"] = c.output_dir;

  const auto& s = c.scenario;
  json scen = {{"archetype", std::string(to_string(s.archetype))},
               {"duration_s", s.duration_s},
               {"road_length_m", s.road_length_m},
               {"lane_count", s.lane_count},
               {"initial_vehicles", s.initial_vehicles},
               {"arrival_rate", s.arrival_rate},
               {"departure_rate", s.departure_rate},
               {"fluctuation_period_s", s.fluctuation_period_s},
               {"frame_rate", s.frame_rate},
               {"min_speed", s.min_speed},
               {"max_speed", s.max_speed},
               {"seed", s.rng_seed}};
  if (!c.trajectory_path.empty()) scen["trajectory"] = c.trajectory_path;
  doc["scenario"] = scen;

  const auto& ch = o.channel;
  doc["channel"] = {{"carrier_hz", ch.carrier_hz},
                    {"reference_distance_m", ch.reference_distance_m},
                    {"path_loss_exponent", ch.path_loss_exponent},
                    {"antenna_gain", ch.antenna_gain},
                    {"system_loss", ch.system_loss},
                    {"shadow_sigma_db", ch.shadow_sigma_db},
                    {"doppler_threshold_hz", ch.doppler_threshold_hz},
                    {"temperature_k", ch.temperature_k},
                    {"bandwidth_hz", ch.bandwidth_hz},
                    {"boltzmann", ch.boltzmann},
                    {"min_distance_m", ch.min_distance_m},
                    {"interference", std::string(to_string(ch.interference))}};

  const auto& b = o.bounds;
  doc["bounds"] = {{"data_bits", {b.data_bits_min, b.data_bits_max}},
                   {"power_mw", {b.power_mw_min, b.power_mw_max}},
                   {"hops", b.hops},
                   {"max_range_m", b.max_range_m},
                   {"data_bits_grid", b.data_bits_grid},
                   {"power_mw_grid", b.power_mw_grid}};

  const auto& e = o.evo;
  doc["evolution"] = {{"pop_size", e.pop_size},       {"max_generations", e.max_generations},
                      {"p_crossover", e.p_crossover}, {"p_mutation", e.p_mutation},
                      {"eta_c", e.eta_c},             {"eta_m", e.eta_m},
                      {"tournament_size", e.tournament_size}};

  const auto& t = o.thresholds;
  doc["thresholds"] = {{"min_received_w", t.min_received_w}, {"min_sinr", t.min_sinr}, {"max_delay_s", t.max_delay_s}};

  const auto& orc = c.oracle;
  json vehicles = json::array();
  for (const auto& v : orc.vehicles) vehicles.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}, {"vx", v.vx}, {"vy", v.vy}});
  doc["oracle"] = {{"vehicles", vehicles},
                   {"predecessor_relays", orc.predecessor_relays},
                   {"hops", orc.hops},
                   {"max_range_m", orc.max_range_m},
                   {"data_bits_grid", orc.data_bits_grid},
                   {"power_mw_grid", orc.power_mw_grid},
                   {"ga_pop_size", orc.ga_pop_size},
                   {"ga_generations", orc.ga_generations},
                   {"ga_seeds", orc.ga_seeds},
                   {"threads", orc.threads}};
  return doc;
}

RunConfig parse_config_toml(std::string_view text) {
  json doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::ParseError& e) {
    throw ConfigError(std::string("TOML ") + e.what());
  }
  return config_from_json(doc);
}

RunConfig parse_config_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON: ") + e.what());
  }
  return config_from_json(doc);
}

std::string config_to_toml(const RunConfig& c) {
  return toml::dump(config_to_json(c));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return path.extension() == ".json" ? parse_config_json(text) : parse_config_toml(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<Snapshot> load_snapshots(const RunConfig& c) {
  if (!c.trajectory_path.empty()) return load_trajectory(c.trajectory_path, c.scenario.frame_rate);
  return synthesize_scenario(c.scenario);
}

TinyInstance make_tiny_instance(const OracleSettings& o, std::uint64_t shadow_seed) {
  TinyInstance t;
  t.snapshot.second_index = 1;
  t.snapshot.vehicles = o.vehicles.empty() ? default_oracle_vehicles() : o.vehicles;
  std::sort(t.snapshot.vehicles.begin(), t.snapshot.vehicles.end(),
            [](const VehicleState& a, const VehicleState& b) { return a.id < b.id; });
  t.hops = o.hops;
  t.max_range_m = o.max_range_m;
  t.data_bits_grid = o.data_bits_grid;
  t.power_mw_grid = o.power_mw_grid;
  t.shadow_seed = shadow_seed;
  if (!o.predecessor_relays.empty()) {
    Genome prev;
    prev.roster = t.snapshot.roster();
    for (const auto& relays : o.predecessor_relays)
      prev.blocks.push_back(GeneBlock{o.data_bits_grid.front(), o.power_mw_grid.front(), relays});
    t.predecessor = std::move(prev);
  }
  return t;
}

}  // namespace vanet
