#pragma once

#include "vanet/channel.hpp"
#include "vanet/encoding.hpp"
#include "vanet/evolution.hpp"
#include "vanet/objectives.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vanet {

// A desk-sized problem whose whole discretized decision space can be enumerated.
struct TinyInstance {
  Snapshot snapshot;
  std::size_t hops = 1;
  double max_range_m = 300.0;
  std::vector<double> data_bits_grid;
  std::vector<double> power_mw_grid;
  std::optional<Genome> predecessor;
  std::uint64_t shadow_seed = 1;  // fixes the shadowing draw so oracle and GA score the same problem

  // Bounds for running the GA restricted to the same grids.
  Bounds bounds() const;
};

inline constexpr std::uint64_t oracle_max_combinations = 5'000'000;
inline constexpr std::size_t oracle_max_vehicles = 5;
inline constexpr std::size_t oracle_max_hops = 2;
inline constexpr std::size_t oracle_max_grid = 3;

class OracleRefusal : public std::runtime_error {
 public:
  OracleRefusal(const std::string& what, std::uint64_t combinations)
      : std::runtime_error(what), combinations_(combinations) {}
  std::uint64_t combinations() const { return combinations_; }

 private:
  std::uint64_t combinations_;
};

// Per-vehicle relay sequences that repair leaves unchanged; the GA can only produce these.
std::vector<std::vector<VehicleId>> relay_options(const Snapshot& snapshot, const Topology& topology, std::size_t vehicle,
                                                  std::size_t hops);

// Size of the joint space, saturating at UINT64_MAX.
std::uint64_t joint_space_size(const TinyInstance& instance);

struct OracleFront {
  std::uint64_t evaluations = 0;
  std::vector<ObjectiveVector> points;  // distinct objective vectors
  std::vector<Genome> genomes;          // one witness per point
};

// Exact front 0 under constraint domination. Throws OracleRefusal when the instance
// exceeds the size limits. `threads` = 0 uses the hardware concurrency.
OracleFront enumerate_front(const TinyInstance& instance, const ChannelParams& channel,
                            const QosThresholds& thresholds, unsigned threads = 0);

// Front 0 of a GA run restricted to the instance's grids. `seed` drives variation only.
Population ga_front(const TinyInstance& instance, const ChannelParams& channel, const QosThresholds& thresholds,
                    const EvoParams& evo, std::uint64_t seed);

using Point = std::vector<double>;

// Exact dominated volume by recursive slicing. Throws std::invalid_argument for a point
// beyond the reference point.
double hypervolume(std::span<const Point> points, const Point& reference);

struct OracleComparison {
  std::size_t ga_points = 0;
  std::size_t dominated = 0;  // GA points dominated by some oracle point
  double ga_hypervolume = 0.0;
  double oracle_hypervolume = 0.0;
  double ratio = 0.0;
  Point reference;
};

// Reference point: oracle nadir plus 10% of each objective's range (plus 1 where the range is zero).
Point reference_point(std::span<const ObjectiveVector> oracle_points);

OracleComparison compare_to_oracle(std::span<const ObjectiveVector> ga_front, std::span<const ObjectiveVector> oracle,
                                   const Point& reference);

}  // namespace vanet
