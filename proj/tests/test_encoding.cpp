#include "support.hpp"
#include "vanet/encoding.hpp"

#include <doctest.h>

#include <map>

using namespace vanet;

TEST_SUITE("encoding") {

static Snapshot make(std::vector<std::pair<VehicleId, double>> at) {
  Snapshot s;
  for (auto [id, x] : at) s.vehicles.push_back({id, x, 0.0, 30.0, 0.0});
  return s;
}

TEST_CASE("single vehicle can only loop on itself") {
  const auto s = make({{7, 0.0}});
  Bounds b;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_genome(s, b, rng);
    for (auto r : g.blocks[0].relays) CHECK(r == 7);
  }
}

TEST_CASE("degenerate bounds pin the continuous genes") {
  Bounds b;
  b.data_bits_min = b.data_bits_max = 1e6;
  Rng rng(2);
  const auto s = ref::random_snapshot(rng, 10);
  for (int i = 0; i < 20; ++i)
    for (const auto& blk : random_genome(s, b, rng).blocks) CHECK(blk.data_bits == 1e6);
}

TEST_CASE("relay draws are uniform over self and neighbors") {
  const auto s = make({{1, 0.0}, {2, 50.0}, {3, 100.0}, {4, 150.0}});
  Bounds b;
  b.hops = 1;
  Rng rng(3);
  const Topology t(s, b.max_range_m);
  std::map<VehicleId, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[random_block(0, s, t, b, rng).relays[0]];
  REQUIRE(counts.size() == 4);
  for (auto [id, c] : counts) CHECK(std::abs(c / double(n) - 0.25) <= 0.02);
}

TEST_CASE("random genomes are valid and sized (2+H) per vehicle") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    Bounds b;
    b.hops = 1 + rng.index(4);
    const auto s = ref::random_snapshot(rng, 1 + rng.index(25), 800.0);
    const auto g = random_genome(s, b, rng);
    REQUIRE_NOTHROW(validate(g, s, b));
    REQUIRE(g.dimension() == (2 + b.hops) * s.size());
  }
}

TEST_CASE("active hops skip self-loop markers") {
  const auto s = make({{1, 0.0}, {2, 50.0}, {3, 100.0}});
  Genome g;
  g.roster = {1, 2, 3};
  g.blocks = {{1e6, 1e4, {2, 1, 3}}, {1e6, 1e4, {2, 2, 2}}, {1e6, 1e4, {1, 1, 2}}};
  const auto a = active_hops(g, 0, s);
  REQUIRE(a.size() == 2);
  CHECK(a[0].tx == 0);
  CHECK(a[0].rx == 1);
  CHECK(a[1].tx == 1);
  CHECK(a[1].rx == 2);
  CHECK(a[1].slot == 2);
  CHECK(active_hops(g, 1, s).empty());
  // 3 -> 1, then 1 is the current node, then 2.
  const auto c = active_hops(g, 2, s);
  REQUIRE(c.size() == 2);
  CHECK(c[1].rx == 1);
}

TEST_CASE("repair replaces a departed relay by the only neighbor") {
  const auto s = make({{1, 0.0}, {2, 50.0}});
  Genome g;
  g.roster = {1, 2};
  g.blocks = {{1e6, 1e4, {9}}, {1e6, 1e4, {1}}};
  RepairStats st;
  const auto r = repair_relays(g, s, Bounds{}, &st);
  CHECK(r.blocks[0].relays[0] == 2);
  CHECK(st.replaced == 1);
  CHECK(st.unresolved == 0);
}

TEST_CASE("repair falls back to the self-loop marker when nobody is in range") {
  const auto s = make({{1, 0.0}, {2, 500.0}});
  Genome g;
  g.roster = {1, 2};
  g.blocks = {{1e6, 1e4, {2}}, {1e6, 1e4, {2}}};
  RepairStats st;
  const auto r = repair_relays(g, s, Bounds{}, &st);
  CHECK(r.blocks[0].relays[0] == 1);
  CHECK(st.unresolved == 1);
}

TEST_CASE("repair breaks distance ties toward the lower id") {
  const auto s = make({{3, -40.0}, {5, 0.0}, {8, 40.0}, {9, 400.0}});
  Genome g;
  g.roster = {3, 5, 8, 9};
  g.blocks = {{1e6, 1e4, {5}}, {1e6, 1e4, {9}}, {1e6, 1e4, {5}}, {1e6, 1e4, {9}}};
  const auto r = repair_relays(g, s, Bounds{});
  CHECK(r.blocks[1].relays[0] == 3);
}

TEST_CASE("repair is idempotent and leaves only in-range relays") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Bounds b;
    b.hops = 1 + rng.index(3);
    const auto before = ref::random_snapshot(rng, 2 + rng.index(15), 900.0);
    auto g = random_genome(before, b, rng);
    // Scramble positions so many relays fall out of range.
    Snapshot after = before;
    for (auto& v : after.vehicles) v.x = rng.uniform(0.0, 900.0);
    const Topology t(after, b.max_range_m);
    const auto once = repair_relays(g, after, t);
    REQUIRE(repair_relays(once, after, t) == once);
    for (std::size_t v = 0; v < once.blocks.size(); ++v)
      for (const auto& hop : active_hops(once, v, after)) REQUIRE(t.in_range(hop.tx, hop.rx));
  }
}

TEST_CASE("adapt keeps survivors, drops leavers and draws arrivals") {
  const auto old_s = make({{1, 0.0}, {2, 50.0}, {3, 100.0}});
  const auto new_s = make({{1, 0.0}, {3, 100.0}, {4, 150.0}});
  Genome g;
  g.roster = {1, 2, 3};
  g.blocks = {{2e6, 2e3, {3}}, {3e6, 3e3, {1}}, {4e6, 4e3, {1}}};
  Bounds b;
  b.hops = 1;
  Rng rng(6);
  const auto a = adapt_dimension(g, new_s, b, rng);
  REQUIRE(a.roster == std::vector<VehicleId>{1, 3, 4});
  CHECK(a.blocks[0] == g.blocks[0]);
  CHECK(a.blocks[1] == g.blocks[2]);
  CHECK_NOTHROW(validate(a, new_s, b));
  CHECK(adapt_dimension(g, old_s, b, rng) == g);
}

TEST_CASE("adapted genomes satisfy the invariants of the new snapshot") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Bounds b;
    b.hops = 1 + rng.index(3);
    const auto s1 = ref::random_snapshot(rng, 1 + rng.index(15));
    const auto s2 = ref::random_snapshot(rng, 1 + rng.index(15));
    const auto g = random_genome(s1, b, rng);
    const auto a = adapt_dimension(g, s2, b, rng);
    REQUIRE_NOTHROW(validate(a, s2, b));
    REQUIRE(a.dimension() == (2 + b.hops) * s2.size());
  }
}

TEST_CASE("adapting onto a disjoint roster looks like a cold start") {
  // Old ids 1000+ never appear in the new roster, so every block is redrawn.
  const auto s = make({{1, 0.0}, {2, 50.0}, {3, 100.0}, {4, 150.0}});
  Snapshot far = s;
  for (auto& v : far.vehicles) v.id += 1000;
  Bounds b;
  b.hops = 1;
  Rng rng(8);
  const auto old = random_genome(far, b, rng);
  std::map<VehicleId, int> adapted, fresh;
  double bits_a = 0, bits_f = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto a = adapt_dimension(old, s, b, rng);
    const auto f = random_genome(s, b, rng);
    ++adapted[a.blocks[0].relays[0]];
    ++fresh[f.blocks[0].relays[0]];
    bits_a += a.blocks[0].data_bits;
    bits_f += f.blocks[0].data_bits;
  }
  for (auto [id, c] : fresh) CHECK(std::abs(adapted[id] - c) / double(n) < 0.02);
  CHECK(std::abs(bits_a - bits_f) / n < 0.02 * (b.data_bits_max - b.data_bits_min));
}

TEST_CASE("genome json round trip") {
  Rng rng(9);
  const auto s = ref::random_snapshot(rng, 6);
  const auto g = random_genome(s, Bounds{}, rng);
  nlohmann::json j = g;
  CHECK(j.get<Genome>() == g);
}

TEST_CASE("grid snapping") {
  const std::vector<double> grid{1e5, 1e6, 1e7};
  CHECK(snap_to_grid(3e5, grid) == 1e5);
  CHECK(snap_to_grid(6e5, grid) == 1e6);
  CHECK(snap_to_grid(9e6, grid) == 1e7);
  CHECK(snap_to_grid(42.0, {}) == 42.0);
}

}
