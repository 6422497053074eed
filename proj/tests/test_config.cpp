#include "vanet/config.hpp"
#include "vanet/report.hpp"
#include "vanet/toml_lite.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace vanet;

TEST_SUITE("config") {

static std::string error_of(std::string_view toml) {
  try {
    parse_config_toml(toml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("toml subset") {
  const auto j = toml::parse(R"(
# comment
a = 1_000
b = -2.5e3
c = "x\ty"
d = 'raw\n'
e = [1, 2,
     3]
f = { g = true, h = [] }
[t.u]
v = inf
)");
  CHECK(j["a"] == 1000);
  CHECK(j["b"] == -2500.0);
  CHECK(j["c"] == "x\ty");
  CHECK(j["d"] == "raw\\n");
  CHECK(j["e"].size() == 3);
  CHECK(j["f"]["g"] == true);
  CHECK(std::isinf(j["t"]["u"]["v"].get<double>()));
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = \n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("[x]\n[x]\n"), toml::ParseError);
}

TEST_CASE("units are normalized at the boundary") {
  const auto c = parse_config_toml(R"(
[thresholds]
min_sinr_db = 10
max_delay_ms = 100
min_received_dbm = -90
[channel]
antenna_gain_db = 3
[bounds]
power_w = [1, 100]
)");
  CHECK(c.optimizer.thresholds.min_sinr == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.optimizer.thresholds.max_delay_s == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.optimizer.thresholds.min_received_w == doctest::Approx(1e-12).epsilon(1e-9));
  CHECK(c.optimizer.channel.antenna_gain == doctest::Approx(std::pow(10.0, 0.3)));
  CHECK(c.optimizer.bounds.power_mw_min == 1e3);
  CHECK(c.optimizer.bounds.power_mw_max == 1e5);
}

TEST_CASE("errors name the field") {
  CHECK(error_of("[evolution]\npop_sise = 10\n").find("evolution.pop_sise") != std::string::npos);
  CHECK(error_of("[thresholds]\nmin_sinr = 10\nmin_sinr_db = 10\n").find("thresholds.min_sinr_db") != std::string::npos);
  CHECK(error_of("[scenario]\narchetype = \"rush\"\n").find("scenario.archetype") != std::string::npos);
  CHECK(error_of("[oracle]\ndata_bits_grid = \"1e5\"\n").find("oracle.data_bits_grid") != std::string::npos);
  CHECK(error_of("gamma = 1.5\n").find("gamma") != std::string::npos);
  CHECK(error_of("[scenario]\nduration_s = 0\n").find("scenario") != std::string::npos);
  CHECK(error_of("seed = 1.5\n").find("seed") != std::string::npos);
  CHECK(error_of("[bounds]\nhops = 0\n").find("hops") != std::string::npos);
  CHECK_FALSE(error_of("gamma = 0.5\n").size());
}

static RunConfig varied() {
  RunConfig c;
  c.optimizer.seed = 123456789012345ULL;
  c.optimizer.gamma = 0.8;
  c.optimizer.channel.interference = InterferenceModel::all_vehicles;
  c.optimizer.channel.antenna_gain = 1.7;
  c.optimizer.bounds.hops = 2;
  c.optimizer.evo.pop_size = 50;
  c.optimizer.thresholds.min_sinr = 3.16;
  c.gamma_sweep = {0, 0.3, 0.5, 0.8};
  c.w_c = 0.25;
  c.scenario = ScenarioSpec::defaults_for(Archetype::fluctuating);
  c.scenario.rng_seed = 99;
  c.output_dir = "some dir/with \"quotes\"";
  c.oracle.vehicles = default_oracle_vehicles();
  c.oracle.predecessor_relays = {{2}, {1}, {4}, {3}};
  c.oracle.ga_seeds = {3, 9};
  return c;
}

TEST_CASE("toml round trip is the identity") {
  for (const auto& c : {RunConfig{}, varied()}) {
    const auto text = config_to_toml(c);
    const auto back = parse_config_toml(text);
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(config_to_toml(back) == text);
  }
}

TEST_CASE("json round trip is the identity") {
  for (const auto& c : {RunConfig{}, varied()}) {
    const auto text = config_to_json(c).dump();
    CHECK(config_to_json(parse_config_json(text)) == config_to_json(c));
  }
}

TEST_CASE("oracle settings build the tiny instance") {
  auto o = OracleSettings{};
  o.predecessor_relays = {{2}, {1}, {4}, {3}};
  const auto t = make_tiny_instance(o, 5);
  CHECK(t.shadow_seed == 5);
  REQUIRE(t.predecessor.has_value());
  CHECK(t.predecessor->blocks[2].relays[0] == 4);
  CHECK(t.data_bits_grid == o.data_bits_grid);
}

TEST_CASE("metrics csv header") {
  std::ostringstream out;
  write_metrics_csv(out, {});
  CHECK(out.str() == "second,n_vehicles,avg_delay_s,load_variance,avg_sinr,path_stability\n");
  std::ostringstream pf;
  write_pareto_csv(pf, {});
  CHECK(pf.str() == "f1,f2,f3,f4,violation\n");
}

}
