#include "vanet/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace vanet {

void validate(const Bounds& b) {
  if (!(b.data_bits_min > 0.0) || b.data_bits_min > b.data_bits_max)
    throw std::invalid_argument("bounds: need 0 < data_bits_min <= data_bits_max");
  if (!(b.power_mw_min > 0.0) || b.power_mw_min > b.power_mw_max)
    throw std::invalid_argument("bounds: need 0 < power_mw_min <= power_mw_max");
  if (b.hops < 1) throw std::invalid_argument("bounds.hops must be >= 1");
  if (!(b.max_range_m > 0.0)) throw std::invalid_argument("bounds.max_range_m must be > 0");
  for (double v : b.data_bits_grid)
    if (v < b.data_bits_min || v > b.data_bits_max) throw std::invalid_argument("bounds: data_bits_grid outside bounds");
  for (double v : b.power_mw_grid)
    if (v < b.power_mw_min || v > b.power_mw_max) throw std::invalid_argument("bounds: power_mw_grid outside bounds");
}

std::size_t Genome::dimension() const {
  std::size_t d = 0;
  for (const auto& b : blocks) d += 2 + b.relays.size();
  return d;
}

void validate(const Genome& g, const Snapshot& snapshot, const Bounds& bounds) {
  if (g.roster != snapshot.roster()) throw std::invalid_argument("genome roster does not match snapshot");
  if (g.blocks.size() != g.roster.size()) throw std::invalid_argument("genome has one block per roster entry");
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const auto& b = g.blocks[i];
    const auto who = " (vehicle " + std::to_string(g.roster[i]) + ")";
    if (b.data_bits < bounds.data_bits_min || b.data_bits > bounds.data_bits_max)
      throw std::invalid_argument("data_bits out of bounds" + who);
    if (b.power_mw < bounds.power_mw_min || b.power_mw > bounds.power_mw_max)
      throw std::invalid_argument("power_mw out of bounds" + who);
    if (b.relays.size() != bounds.hops) throw std::invalid_argument("relay slot count differs from hops" + who);
    for (auto r : b.relays)
      if (!snapshot.contains(r)) throw std::invalid_argument("relay " + std::to_string(r) + " not in roster" + who);
  }
}

std::vector<Hop> active_hops(const Genome& g, std::size_t source, const Snapshot& snapshot) {
  std::vector<Hop> hops;
  const auto& block = g.blocks[source];
  const VehicleId self = g.roster[source];
  std::size_t node = source;
  for (std::size_t h = 0; h < block.relays.size(); ++h) {
    const VehicleId r = block.relays[h];
    if (r == self || r == snapshot.vehicles[node].id) continue;
    const auto next = snapshot.index_of(r);
    if (!next) throw std::invalid_argument("active_hops: relay " + std::to_string(r) + " not in snapshot");
    hops.push_back({node, *next, h});
    node = *next;
  }
  return hops;
}

double snap_to_grid(double value, const std::vector<double>& grid) {
  if (grid.empty()) return value;
  double best = grid.front();
  for (double v : grid)
    if (std::abs(v - value) < std::abs(best - value)) best = v;
  return best;
}

VehicleId draw_relay(std::size_t node, const Snapshot& snapshot, const Topology& topology, Rng& rng) {
  const auto& nb = topology.neighbors(node);
  const auto pick = rng.index(nb.size() + 1);
  return pick == nb.size() ? snapshot.vehicles[node].id : snapshot.vehicles[nb[pick]].id;
}

double draw_data_bits(const Bounds& b, Rng& rng) {
  if (!b.data_bits_grid.empty()) return b.data_bits_grid[rng.index(b.data_bits_grid.size())];
  return rng.uniform(b.data_bits_min, b.data_bits_max);
}

double draw_power_mw(const Bounds& b, Rng& rng) {
  if (!b.power_mw_grid.empty()) return b.power_mw_grid[rng.index(b.power_mw_grid.size())];
  return rng.uniform(b.power_mw_min, b.power_mw_max);
}

GeneBlock random_block(std::size_t source, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                       Rng& rng) {
  GeneBlock block;
  block.data_bits = draw_data_bits(bounds, rng);
  block.power_mw = draw_power_mw(bounds, rng);
  block.relays.reserve(bounds.hops);
  const VehicleId self = snapshot.vehicles[source].id;
  std::size_t node = source;
  for (std::size_t h = 0; h < bounds.hops; ++h) {
    const VehicleId r = draw_relay(node, snapshot, topology, rng);
    block.relays.push_back(r);
    if (r != self && r != snapshot.vehicles[node].id) node = *snapshot.index_of(r);
  }
  return block;
}

Genome random_genome(const Snapshot& snapshot, const Topology& topology, const Bounds& bounds, Rng& rng) {
  Genome g;
  g.roster = snapshot.roster();
  g.blocks.reserve(g.roster.size());
  for (std::size_t i = 0; i < g.roster.size(); ++i) g.blocks.push_back(random_block(i, snapshot, topology, bounds, rng));
  return g;
}

Genome random_genome(const Snapshot& snapshot, const Bounds& bounds, Rng& rng) {
  return random_genome(snapshot, Topology(snapshot, bounds.max_range_m), bounds, rng);
}

Genome repair_relays(Genome g, const Snapshot& snapshot, const Topology& topology, RepairStats* stats) {
  RepairStats local;
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    auto& relays = g.blocks[i].relays;
    const VehicleId self = g.roster[i];
    const auto source = snapshot.index_of(self);
    if (!source) throw std::invalid_argument("repair_relays: genome roster does not match snapshot");
    std::size_t node = *source;
    for (auto& r : relays) {
      if (r == self || r == snapshot.vehicles[node].id) continue;
      auto next = snapshot.index_of(r);
      if (!next || !topology.in_range(node, *next)) {
        ++local.replaced;
        next.reset();
        for (auto candidate : topology.neighbors_by_distance(node)) {
          if (candidate != *source) {
            next = candidate;
            break;
          }
        }
        if (!next) {
          r = self;
          ++local.unresolved;
          continue;
        }
        r = snapshot.vehicles[*next].id;
      }
      node = *next;
    }
  }
  if (stats) *stats = local;
  return g;
}

Genome repair_relays(Genome g, const Snapshot& snapshot, const Bounds& bounds, RepairStats* stats) {
  return repair_relays(std::move(g), snapshot, Topology(snapshot, bounds.max_range_m), stats);
}

Genome adapt_dimension(const Genome& old, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                       Rng& rng) {
  std::unordered_map<VehicleId, std::size_t> previous;
  previous.reserve(old.roster.size());
  for (std::size_t i = 0; i < old.roster.size(); ++i) previous.emplace(old.roster[i], i);

  Genome g;
  g.roster = snapshot.roster();
  g.blocks.reserve(g.roster.size());
  for (std::size_t i = 0; i < g.roster.size(); ++i) {
    auto it = previous.find(g.roster[i]);
    if (it != previous.end())
      g.blocks.push_back(old.blocks[it->second]);
    else
      g.blocks.push_back(random_block(i, snapshot, topology, bounds, rng));
  }
  return repair_relays(std::move(g), snapshot, topology);
}

Genome adapt_dimension(const Genome& old, const Snapshot& snapshot, const Bounds& bounds, Rng& rng) {
  return adapt_dimension(old, snapshot, Topology(snapshot, bounds.max_range_m), bounds, rng);
}

void to_json(nlohmann::json& j, const Genome& g) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : g.blocks) {
    nlohmann::json row = nlohmann::json::array({b.data_bits, b.power_mw});
    for (auto r : b.relays) row.push_back(r);
    blocks.push_back(std::move(row));
  }
  j = nlohmann::json{{"roster", g.roster}, {"blocks", std::move(blocks)}};
}

void from_json(const nlohmann::json& j, Genome& g) {
  g.roster = j.at("roster").get<std::vector<VehicleId>>();
  g.blocks.clear();
  for (const auto& row : j.at("blocks")) {
    if (!row.is_array() || row.size() < 2) throw std::invalid_argument("genome json: block needs [data_bits, power_mw, relays...]");
    GeneBlock b;
    b.data_bits = row[0].get<double>();
    b.power_mw = row[1].get<double>();
    for (std::size_t k = 2; k < row.size(); ++k) b.relays.push_back(row[k].get<VehicleId>());
    g.blocks.push_back(std::move(b));
  }
  if (g.blocks.size() != g.roster.size()) throw std::invalid_argument("genome json: blocks and roster differ in length");
}

}  // namespace vanet
