#pragma once

#include "vanet/rng.hpp"
#include "vanet/trajectory.hpp"

#include <json.hpp>

#include <cstddef>
#include <vector>

namespace vanet {

struct Bounds {
  double data_bits_min = 1e5;
  double data_bits_max = 1e7;
  double power_mw_min = 1e3;
  double power_mw_max = 1e5;
  std::size_t hops = 3;
  double max_range_m = 300.0;
  // Non-empty grids restrict the continuous genes to these values (oracle comparison mode).
  std::vector<double> data_bits_grid;
  std::vector<double> power_mw_grid;

  bool snapped() const { return !data_bits_grid.empty() || !power_mw_grid.empty(); }
};

void validate(const Bounds& b);

// Decision block of one vehicle. A relay slot equal to the owner's own id is the
// self-loop marker: the slot is unused and the path is shorter than `hops`.
struct GeneBlock {
  double data_bits = 0.0;
  double power_mw = 0.0;
  std::vector<VehicleId> relays;

  double transmit_w() const { return power_mw / 1000.0; }
  bool operator==(const GeneBlock&) const = default;
};

struct Genome {
  std::vector<VehicleId> roster;
  std::vector<GeneBlock> blocks;

  std::size_t vehicle_count() const { return roster.size(); }
  // Scalar decision-vector length, (2 + H) per vehicle.
  std::size_t dimension() const;
  bool operator==(const Genome&) const = default;
};

// Throws std::invalid_argument naming the first broken invariant.
void validate(const Genome& g, const Snapshot& snapshot, const Bounds& bounds);

// One transmission along a vehicle's path: snapshot indices of both ends and the slot it came from.
struct Hop {
  std::size_t tx;
  std::size_t rx;
  std::size_t slot;
};

// Walks the relay slots of vehicle `source`. A slot is a hop when it names a vehicle
// other than the source and other than the current node; other slots are skipped.
// Relay ids must be present in the snapshot.
std::vector<Hop> active_hops(const Genome& g, std::size_t source, const Snapshot& snapshot);

double snap_to_grid(double value, const std::vector<double>& grid);

// Uniform draw among the node itself and its in-range neighbors.
VehicleId draw_relay(std::size_t node, const Snapshot& snapshot, const Topology& topology, Rng& rng);

double draw_data_bits(const Bounds& b, Rng& rng);
double draw_power_mw(const Bounds& b, Rng& rng);

GeneBlock random_block(std::size_t source, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                       Rng& rng);

Genome random_genome(const Snapshot& snapshot, const Topology& topology, const Bounds& bounds, Rng& rng);
Genome random_genome(const Snapshot& snapshot, const Bounds& bounds, Rng& rng);

struct RepairStats {
  std::size_t replaced = 0;
  // Slots that had to fall back to the self-loop marker because no vehicle was in range.
  std::size_t unresolved = 0;
};

// Replaces relays that left the roster or are out of range of the preceding node by
// the nearest other in-range vehicle (ties to the lower id), else the self-loop marker.
Genome repair_relays(Genome g, const Snapshot& snapshot, const Topology& topology, RepairStats* stats = nullptr);
Genome repair_relays(Genome g, const Snapshot& snapshot, const Bounds& bounds, RepairStats* stats = nullptr);

// Re-keys a genome onto a new roster: surviving vehicles keep their blocks, departed
// ones are dropped, arrivals get random blocks, then relays are repaired.
Genome adapt_dimension(const Genome& old, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                       Rng& rng);
Genome adapt_dimension(const Genome& old, const Snapshot& snapshot, const Bounds& bounds, Rng& rng);

void to_json(nlohmann::json& j, const Genome& g);
void from_json(const nlohmann::json& j, Genome& g);

}  // namespace vanet
