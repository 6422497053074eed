#include "support.hpp"
#include "vanet/trajectory.hpp"

#include <doctest.h>

#include <sstream>

using namespace vanet;

TEST_SUITE("trajectory") {

TEST_CASE("middle frame is the median of the 25 frames of a second") {
  CHECK(middle_frame(1, 25) == 13);
  CHECK(middle_frame(2, 25) == 38);
  std::vector<int> frames;
  for (int f = 1; f <= 25; ++f) frames.push_back(f);
  CHECK(frames[frames.size() / 2] == middle_frame(1, 25));
}

TEST_CASE("distance examples") {
  VehicleState a, b;
  b.x = 3;
  b.y = 4;
  CHECK(distance(a, b) == 5.0);
  CHECK(distance(a, a) == 0.0);
  VehicleState c;
  c.x = 300;
  CHECK(distance(a, c) == 300.0);
  Snapshot s;
  s.vehicles = {a, c};
  s.vehicles[1].id = 1;
  Topology t(s, 300.0);
  CHECK(t.in_range(0, 1));
}

static std::string frames_csv(std::int64_t last_frame, int vehicles) {
  std::ostringstream out;
  out << "frame,id,x,y,xVelocity,yVelocity\n";
  for (std::int64_t f = 1; f <= last_frame; ++f)
    for (int v = 1; v <= vehicles; ++v) out << f << ',' << v << ',' << (f * 0.04 * 30 + v * 20) << ",3.75,30,0\n";
  return out.str();
}

TEST_CASE("1000 frames at 25 fps give 40 snapshots") {
  std::istringstream in(frames_csv(1000, 1));
  const auto snaps = parse_trajectory(in, 25);
  REQUIRE(snaps.size() == 40);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    CHECK(snaps[k].size() == 1);
    CHECK(snaps[k].second_index == static_cast<int>(k) + 1);
    CHECK(snaps[k].frame_index == middle_frame(static_cast<int>(k) + 1, 25));
  }
}

TEST_CASE("missing column is named") {
  std::istringstream in("frame,id,x,y,xVelocity\n1,1,0,0,0\n");
  try {
    parse_trajectory(in, 25);
    FAIL("expected a schema error");
  } catch (const TrajectoryError& e) {
    CHECK(std::string(e.what()).find("yVelocity") != std::string::npos);
  }
}

TEST_CASE("second without vehicles at its middle frame is reported") {
  std::ostringstream csv;
  csv << "frame,id,x,y,xVelocity,yVelocity\n";
  for (int f = 1; f <= 50; ++f)
    if (f != middle_frame(2, 25)) csv << f << ",1,0,0,30,0\n";
  std::istringstream in(csv.str());
  try {
    parse_trajectory(in, 25);
    FAIL("expected an error");
  } catch (const TrajectoryError& e) {
    CHECK(std::string(e.what()).find("second 2") != std::string::npos);
  }
}

TEST_CASE("snapshot lookup by id agrees with a linear scan") {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = ref::random_snapshot(rng, 1 + rng.index(30));
    validate(s);
    for (VehicleId id = 0; id <= s.vehicles.back().id + 1; ++id) {
      std::optional<std::size_t> scan;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s.vehicles[i].id == id) scan = i;
      REQUIRE(s.index_of(id) == scan);
    }
  }
}

TEST_CASE("synthetic archetypes follow their count curves") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inc = ScenarioSpec::defaults_for(Archetype::increasing);
    inc.rng_seed = seed;
    const auto a = synthesize_scenario(inc);
    REQUIRE(a.size() == 40);
    CHECK(a.front().size() >= 8);
    CHECK(a.front().size() <= 12);
    CHECK(a.back().size() > 20);

    auto dec = ScenarioSpec::defaults_for(Archetype::decreasing);
    dec.rng_seed = seed;
    const auto d = synthesize_scenario(dec);
    CHECK(d.back().size() < d.front().size());

    auto fl = ScenarioSpec::defaults_for(Archetype::fluctuating);
    fl.rng_seed = seed;
    const auto f = synthesize_scenario(fl);
    bool rise = false, fall = false;
    for (std::size_t k = 1; k < f.size(); ++k) {
      rise = rise || f[k].size() > f[k - 1].size();
      fall = fall || f[k].size() < f[k - 1].size();
    }
    CHECK(rise);
    CHECK(fall);
  }
}

TEST_CASE("zero rates keep the roster") {
  auto spec = ScenarioSpec::defaults_for(Archetype::increasing);
  spec.duration_s = 2;
  spec.arrival_rate = 0;
  spec.departure_rate = 0;
  const auto s = synthesize_scenario(spec);
  REQUIRE(s.size() == 2);
  CHECK(s[0].roster() == s[1].roster());
}

TEST_CASE("synthesis is deterministic and round-trips through CSV") {
  for (auto a : {Archetype::increasing, Archetype::fluctuating, Archetype::decreasing}) {
    auto spec = ScenarioSpec::defaults_for(a);
    spec.rng_seed = 77;
    const auto rows = synthesize_frames(spec);
    std::ostringstream one, two;
    write_trajectory_csv(one, rows);
    write_trajectory_csv(two, synthesize_frames(spec));
    CHECK(one.str() == two.str());
    std::istringstream in(one.str());
    CHECK(parse_trajectory(in, spec.frame_rate) == synthesize_scenario(spec));
  }
}

TEST_CASE("archetype names") {
  CHECK(parse_archetype("fluctuating") == Archetype::fluctuating);
  try {
    parse_archetype("rush-hour");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("increasing") != std::string::npos);
    CHECK(msg.find("decreasing") != std::string::npos);
  }
  auto spec = ScenarioSpec::defaults_for(Archetype::increasing);
  spec.duration_s = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

}
