#include "vanet/trajectory.hpp"

#include "vanet/format.hpp"
#include "vanet/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace vanet {

double VehicleState::speed() const { return std::hypot(vx, vy); }

double distance(const VehicleState& a, const VehicleState& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double relative_speed(const VehicleState& a, const VehicleState& b) {
  return std::hypot(a.vx - b.vx, a.vy - b.vy);
}

std::optional<std::size_t> Snapshot::index_of(VehicleId id) const {
  auto it = std::lower_bound(vehicles.begin(), vehicles.end(), id,
                             [](const VehicleState& v, VehicleId key) { return v.id < key; });
  if (it == vehicles.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - vehicles.begin());
}

std::vector<VehicleId> Snapshot::roster() const {
  std::vector<VehicleId> ids;
  ids.reserve(vehicles.size());
  for (const auto& v : vehicles) ids.push_back(v.id);
  return ids;
}

void validate(const Snapshot& snapshot) {
  if (snapshot.vehicles.empty())
    throw std::invalid_argument("snapshot for second " + std::to_string(snapshot.second_index) + " is empty");
  for (std::size_t i = 0; i < snapshot.vehicles.size(); ++i) {
    const auto& v = snapshot.vehicles[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.vx) || !std::isfinite(v.vy))
      throw std::invalid_argument("vehicle " + std::to_string(v.id) + " has a non-finite state");
    if (i > 0 && snapshot.vehicles[i - 1].id >= v.id)
      throw std::invalid_argument("snapshot vehicles must be strictly ordered by id");
  }
}

Topology::Topology(const Snapshot& snapshot, double max_range_m)
    : n_(snapshot.size()), max_range_m_(max_range_m), dist_(n_ * n_, 0.0), neighbors_(n_), by_distance_(n_) {
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a + 1; b < n_; ++b)
      dist_[a * n_ + b] = dist_[b * n_ + a] = vanet::distance(snapshot.vehicles[a], snapshot.vehicles[b]);
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b)
      if (b != a && dist_[a * n_ + b] <= max_range_m_) neighbors_[a].push_back(b);
    by_distance_[a] = neighbors_[a];
    std::stable_sort(by_distance_[a].begin(), by_distance_[a].end(),
                     [&](std::size_t x, std::size_t y) { return dist_[a * n_ + x] < dist_[a * n_ + y]; });
  }
}

std::int64_t middle_frame(int second, int frame_rate) {
  return static_cast<std::int64_t>(second - 1) * frame_rate + frame_rate / 2 + 1;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& f : fields) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.remove_suffix(1);
    while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
  }
  return fields;
}

}  // namespace

std::vector<Snapshot> parse_trajectory(std::istream& in, int frame_rate) {
  if (frame_rate < 1) throw std::invalid_argument("frame_rate must be >= 1");

  std::string line;
  if (!std::getline(in, line)) throw TrajectoryError("trajectory file is empty");
  const auto header = split_csv_line(line);
  constexpr std::array<std::string_view, 6> required{"frame", "id", "x", "y", "xVelocity", "yVelocity"};
  std::array<std::size_t, 6> column{};
  for (std::size_t c = 0; c < required.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), required[c]);
    if (it == header.end()) throw TrajectoryError("trajectory schema: missing column '" + std::string(required[c]) + "'");
    column[c] = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t needed = *std::max_element(column.begin(), column.end()) + 1;

  std::map<std::int64_t, std::vector<VehicleState>> by_frame;
  std::int64_t max_frame = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < needed)
      throw TrajectoryError("trajectory line " + std::to_string(line_no) + ": expected at least " +
                            std::to_string(needed) + " fields");
    std::int64_t frame = 0;
    VehicleState v;
    bool ok = parse_number(fields[column[0]], frame) && parse_number(fields[column[1]], v.id) &&
              parse_number(fields[column[2]], v.x) && parse_number(fields[column[3]], v.y) &&
              parse_number(fields[column[4]], v.vx) && parse_number(fields[column[5]], v.vy);
    if (!ok) throw TrajectoryError("trajectory line " + std::to_string(line_no) + ": malformed number");
    if (frame < 1) throw TrajectoryError("trajectory line " + std::to_string(line_no) + ": frames are 1-based");
    max_frame = std::max(max_frame, frame);
    const auto offset = (frame - 1) % frame_rate;
    if (offset == frame_rate / 2) by_frame[frame].push_back(v);
  }
  if (max_frame == 0) throw TrajectoryError("trajectory file has no rows");

  const std::int64_t mid = frame_rate / 2 + 1;
  if (max_frame < mid) throw TrajectoryError("trajectory covers less than one second");
  const int seconds = static_cast<int>((max_frame - mid) / frame_rate) + 1;

  std::vector<Snapshot> out;
  out.reserve(static_cast<std::size_t>(seconds));
  for (int s = 1; s <= seconds; ++s) {
    const auto frame = middle_frame(s, frame_rate);
    auto it = by_frame.find(frame);
    if (it == by_frame.end() || it->second.empty())
      throw TrajectoryError("second " + std::to_string(s) + " has no vehicles at frame " + std::to_string(frame));
    Snapshot snap;
    snap.second_index = s;
    snap.frame_index = frame;
    snap.vehicles = std::move(it->second);
    std::sort(snap.vehicles.begin(), snap.vehicles.end(),
              [](const VehicleState& a, const VehicleState& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < snap.vehicles.size(); ++i)
      if (snap.vehicles[i].id == snap.vehicles[i - 1].id)
        throw TrajectoryError("second " + std::to_string(s) + ": vehicle " + std::to_string(snap.vehicles[i].id) +
                              " appears twice in frame " + std::to_string(frame));
    out.push_back(std::move(snap));
  }
  return out;
}

std::vector<Snapshot> load_trajectory(const std::filesystem::path& path, int frame_rate) {
  std::ifstream in(path);
  if (!in) throw TrajectoryError("cannot open trajectory file " + path.string());
  return parse_trajectory(in, frame_rate);
}

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::increasing: return "increasing";
    case Archetype::fluctuating: return "fluctuating";
    case Archetype::decreasing: return "decreasing";
  }
  return "unknown";
}

Archetype parse_archetype(std::string_view name) {
  if (name == "increasing") return Archetype::increasing;
  if (name == "fluctuating") return Archetype::fluctuating;
  if (name == "decreasing") return Archetype::decreasing;
  throw std::invalid_argument("unknown archetype '" + std::string(name) +
                              "' (valid: increasing, fluctuating, decreasing)");
}

ScenarioSpec ScenarioSpec::defaults_for(Archetype a) {
  ScenarioSpec spec;
  spec.archetype = a;
  switch (a) {
    case Archetype::increasing:
      spec.initial_vehicles = 10;
      spec.arrival_rate = 0.55;
      spec.departure_rate = 0.25;
      break;
    case Archetype::fluctuating:
      spec.initial_vehicles = 18;
      spec.arrival_rate = 0.8;
      spec.departure_rate = 0.2;
      break;
    case Archetype::decreasing:
      spec.initial_vehicles = 24;
      spec.arrival_rate = 0.2;
      spec.departure_rate = 0.5;
      break;
  }
  return spec;
}

void validate(const ScenarioSpec& spec) {
  if (spec.duration_s < 2) throw std::invalid_argument("scenario.duration_s must be >= 2");
  if (!(spec.road_length_m > 0.0)) throw std::invalid_argument("scenario.road_length_m must be > 0");
  if (spec.lane_count < 1) throw std::invalid_argument("scenario.lane_count must be >= 1");
  if (spec.initial_vehicles < 1) throw std::invalid_argument("scenario.initial_vehicles must be >= 1");
  if (!(spec.arrival_rate >= 0.0)) throw std::invalid_argument("scenario.arrival_rate must be >= 0");
  if (!(spec.departure_rate >= 0.0)) throw std::invalid_argument("scenario.departure_rate must be >= 0");
  if (spec.fluctuation_period_s < 2) throw std::invalid_argument("scenario.fluctuation_period_s must be >= 2");
  if (spec.frame_rate < 1) throw std::invalid_argument("scenario.frame_rate must be >= 1");
  if (!(spec.min_speed >= 0.0) || spec.max_speed < spec.min_speed)
    throw std::invalid_argument("scenario speeds must satisfy 0 <= min_speed <= max_speed");
}

namespace {

struct SimVehicle {
  VehicleId id;
  double lane_y;
  double direction;
  double speed;
  double entry_x;
  std::int64_t entry_frame;
  std::int64_t exit_frame;  // first frame at which the vehicle is gone
};

constexpr double lane_width = 3.75;
constexpr double median_gap = 4.0;

VehicleState state_at(const SimVehicle& v, std::int64_t frame, const ScenarioSpec& spec) {
  const double elapsed = static_cast<double>(frame - v.entry_frame) / spec.frame_rate;
  double x = v.entry_x + v.direction * v.speed * elapsed;
  x -= spec.road_length_m * std::floor(x / spec.road_length_m);
  if (x >= spec.road_length_m) x = 0.0;
  return VehicleState{v.id, x, v.lane_y, v.direction * v.speed, 0.0};
}

std::vector<SimVehicle> simulate(const ScenarioSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.rng_seed, {static_cast<std::uint64_t>(StreamRole::scenario)}));
  const int forward_lanes = std::max(1, spec.lane_count / 2);

  VehicleId next_id = 1;
  std::vector<SimVehicle> all;
  std::vector<std::size_t> alive;

  auto spawn = [&](std::int64_t frame, bool anywhere) {
    const int lane = static_cast<int>(rng.index(static_cast<std::size_t>(spec.lane_count)));
    const bool forward = lane < forward_lanes;
    SimVehicle v;
    v.id = next_id++;
    v.lane_y = lane * lane_width + (forward ? 0.0 : median_gap);
    v.direction = forward ? 1.0 : -1.0;
    v.speed = rng.uniform(spec.min_speed, spec.max_speed);
    v.entry_x = anywhere ? rng.uniform(0.0, spec.road_length_m) : (forward ? 0.0 : spec.road_length_m);
    v.entry_frame = frame;
    v.exit_frame = -1;
    alive.push_back(all.size());
    all.push_back(v);
  };

  for (int i = 0; i < spec.initial_vehicles; ++i) spawn(1, true);

  // Randomly phased fluid schedule: cumulative event counts stay within one of
  // the rate line, so the archetype's trend holds for every seed.
  const double arrival_phase = rng.uniform();
  const double departure_phase = rng.uniform();
  double cum_arrivals = 0.0;
  double cum_departures = 0.0;
  const int half_period = spec.fluctuation_period_s / 2;

  for (int s = 2; s <= spec.duration_s; ++s) {
    double arrival = spec.arrival_rate;
    double departure = spec.departure_rate;
    if (spec.archetype == Archetype::fluctuating && ((s - 2) / half_period) % 2 == 1) std::swap(arrival, departure);

    const auto before_a = static_cast<long>(std::floor(cum_arrivals + arrival_phase));
    const auto before_d = static_cast<long>(std::floor(cum_departures + departure_phase));
    cum_arrivals += arrival;
    cum_departures += departure;
    const long arrivals = static_cast<long>(std::floor(cum_arrivals + arrival_phase)) - before_a;
    const long departures = static_cast<long>(std::floor(cum_departures + departure_phase)) - before_d;

    const std::int64_t frame = static_cast<std::int64_t>(s - 1) * spec.frame_rate + 1;
    for (long k = 0; k < departures && alive.size() > 1; ++k) {
      const auto pick = rng.index(alive.size());
      all[alive[pick]].exit_frame = frame;
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    for (long k = 0; k < arrivals; ++k) spawn(frame, false);
  }
  return all;
}

bool present(const SimVehicle& v, std::int64_t frame) {
  return frame >= v.entry_frame && (v.exit_frame < 0 || frame < v.exit_frame);
}

}  // namespace

std::vector<TrajectoryRow> synthesize_frames(const ScenarioSpec& spec) {
  const auto vehicles = simulate(spec);
  const std::int64_t last = static_cast<std::int64_t>(spec.duration_s) * spec.frame_rate;
  std::vector<TrajectoryRow> rows;
  for (std::int64_t f = 1; f <= last; ++f)
    for (const auto& v : vehicles)
      if (present(v, f)) rows.push_back({f, state_at(v, f, spec)});
  return rows;
}

std::vector<Snapshot> synthesize_scenario(const ScenarioSpec& spec) {
  const auto vehicles = simulate(spec);
  std::vector<Snapshot> out;
  out.reserve(static_cast<std::size_t>(spec.duration_s));
  for (int s = 1; s <= spec.duration_s; ++s) {
    Snapshot snap;
    snap.second_index = s;
    snap.frame_index = middle_frame(s, spec.frame_rate);
    for (const auto& v : vehicles)
      if (present(v, snap.frame_index)) snap.vehicles.push_back(state_at(v, snap.frame_index, spec));
    out.push_back(std::move(snap));
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "frame,id,x,y,xVelocity,yVelocity\n";
  for (const auto& r : rows) {
    out << r.frame << ',' << r.state.id << ',' << format_double(r.state.x) << ',' << format_double(r.state.y) << ','
        << format_double(r.state.vx) << ',' << format_double(r.state.vy) << '\n';
  }
}

}  // namespace vanet
