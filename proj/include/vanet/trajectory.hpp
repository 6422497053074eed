#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vanet {

using VehicleId = std::int64_t;

struct VehicleState {
  VehicleId id = 0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  double speed() const;
  bool operator==(const VehicleState&) const = default;
};

// Planar Euclidean distance in meters.
double distance(const VehicleState& a, const VehicleState& b);

// Magnitude of the velocity difference in m/s.
double relative_speed(const VehicleState& a, const VehicleState& b);

// Positions and velocities of every vehicle at the representative frame of one second.
// Vehicles are kept sorted by id; ids are the join key across seconds.
struct Snapshot {
  int second_index = 1;
  std::int64_t frame_index = 0;
  std::vector<VehicleState> vehicles;

  std::size_t size() const { return vehicles.size(); }
  std::optional<std::size_t> index_of(VehicleId id) const;
  bool contains(VehicleId id) const { return index_of(id).has_value(); }
  std::vector<VehicleId> roster() const;

  bool operator==(const Snapshot&) const = default;
};

// Throws std::invalid_argument if the ordering or finiteness invariants are broken.
void validate(const Snapshot& snapshot);

// Pairwise distances of one snapshot and, per vehicle, the other vehicles within range.
class Topology {
 public:
  Topology(const Snapshot& snapshot, double max_range_m);

  std::size_t size() const { return n_; }
  double distance(std::size_t a, std::size_t b) const { return dist_[a * n_ + b]; }
  double max_range_m() const { return max_range_m_; }
  bool in_range(std::size_t a, std::size_t b) const { return dist_[a * n_ + b] <= max_range_m_; }
  // Vehicles other than v within range of v, ascending by index (and so by id).
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return neighbors_[v]; }
  // Same set ordered by (distance, id).
  const std::vector<std::size_t>& neighbors_by_distance(std::size_t v) const { return by_distance_[v]; }

 private:
  std::size_t n_;
  double max_range_m_;
  std::vector<double> dist_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::vector<std::size_t>> by_distance_;
};

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// First frame is 1. Second s is represented by frame (s-1)*fps + fps/2 + 1.
std::int64_t middle_frame(int second, int frame_rate);

std::vector<Snapshot> load_trajectory(const std::filesystem::path& path, int frame_rate);
std::vector<Snapshot> parse_trajectory(std::istream& in, int frame_rate);

enum class Archetype { increasing, fluctuating, decreasing };

std::string_view to_string(Archetype a);
// Throws std::invalid_argument listing the valid names.
Archetype parse_archetype(std::string_view name);

struct ScenarioSpec {
  Archetype archetype = Archetype::increasing;
  int duration_s = 40;
  double road_length_m = 480.0;
  int lane_count = 4;
  int initial_vehicles = 10;
  // Mean vehicle arrivals and departures per second. For the fluctuating
  // archetype the two rates swap every half period.
  double arrival_rate = 0.55;
  double departure_rate = 0.25;
  int fluctuation_period_s = 10;
  int frame_rate = 25;
  double min_speed = 22.0;
  double max_speed = 36.0;
  std::uint64_t rng_seed = 1;

  // Rates and initial count that reproduce the archetype's count curve.
  static ScenarioSpec defaults_for(Archetype a);
};

void validate(const ScenarioSpec& spec);

// Frame-level trajectories in highD column layout, one entry per vehicle per frame.
struct TrajectoryRow {
  std::int64_t frame = 0;
  VehicleState state;
};

std::vector<TrajectoryRow> synthesize_frames(const ScenarioSpec& spec);
std::vector<Snapshot> synthesize_scenario(const ScenarioSpec& spec);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

}  // namespace vanet
