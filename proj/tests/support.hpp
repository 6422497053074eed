#pragma once

// Reference computations written independently of the library, used to cross-check it.

#include "vanet/channel.hpp"
#include "vanet/encoding.hpp"
#include "vanet/objectives.hpp"
#include "vanet/rng.hpp"
#include "vanet/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace ref {

using vanet::ChannelParams;
using vanet::Genome;
using vanet::ObjectiveVector;
using vanet::QosThresholds;
using vanet::Snapshot;
using vanet::VehicleId;
using vanet::VehicleState;

inline double path_loss_db(double d, double fc, double d0, double gamma) {
  return 20.0 * std::log10(d / d0) + 10.0 * gamma * std::log10(d / d0) + 20.0 * std::log10(fc / 1e9);
}

// Linear power gain of a link with no shadowing, distance clamped like the library's link level.
inline double gain(const VehicleState& a, const VehicleState& b, const ChannelParams& p) {
  const double d = std::max(std::hypot(a.x - b.x, a.y - b.y), p.min_distance_m);
  const double v = std::hypot(a.vx - b.vx, a.vy - b.vy);
  const double pl = path_loss_db(d, p.carrier_hz, p.reference_distance_m, p.path_loss_exponent);
  const double dop = std::exp(-std::min(v * p.carrier_hz / 2.998e8 / p.doppler_threshold_hz, 10.0));
  return std::pow(10.0, -pl / 10.0) * p.antenna_gain / p.system_loss * dop;
}

struct RefHop {
  VehicleId from, to;
  std::size_t slot;
};

// Path walk keyed by ids: a slot moves the packet unless it names the source or the node holding it.
inline std::vector<RefHop> walk(VehicleId source, const std::vector<VehicleId>& relays) {
  std::vector<RefHop> out;
  VehicleId at = source;
  for (std::size_t h = 0; h < relays.size(); ++h) {
    if (relays[h] == source || relays[h] == at) continue;
    out.push_back({at, relays[h], h});
    at = relays[h];
  }
  return out;
}

// Objectives and violation with shadowing off and no predecessor (f4 = 0).
inline ObjectiveVector objectives(const Genome& g, const Snapshot& s, const ChannelParams& p,
                                  const QosThresholds& q, double range_m) {
  std::map<VehicleId, VehicleState> veh;
  for (const auto& v : s.vehicles) veh[v.id] = v;
  std::map<VehicleId, double> watts;
  std::map<VehicleId, std::vector<RefHop>> paths;
  std::size_t slots = 0;
  for (std::size_t i = 0; i < g.roster.size(); ++i) {
    watts[g.roster[i]] = g.blocks[i].power_mw * 1e-3;
    paths[g.roster[i]] = walk(g.roster[i], g.blocks[i].relays);
    slots += g.blocks[i].relays.size();
  }
  const double n = static_cast<double>(g.roster.size());

  std::map<VehicleId, std::set<VehicleId>> flows_from;
  std::map<std::size_t, std::set<VehicleId>> senders_in_slot;
  std::map<VehicleId, double> load;
  for (const auto& [src, path] : paths)
    for (const auto& hop : path) {
      flows_from[hop.from].insert(src);
      senders_in_slot[hop.slot].insert(hop.from);
      load[hop.to] += 1.0;
    }

  ObjectiveVector o;
  double violation = 0.0;
  double inv_sinr = 0.0;
  for (std::size_t i = 0; i < g.roster.size(); ++i) {
    const VehicleId src = g.roster[i];
    double delay = 0.0;
    for (const auto& hop : paths[src]) {
      const auto& a = veh[hop.from];
      const auto& b = veh[hop.to];
      const double bw = p.bandwidth_hz / static_cast<double>(flows_from[hop.from].size());
      delay += g.blocks[i].data_bits / bw + std::hypot(a.x - b.x, a.y - b.y) / 2.998e8;
      const double signal = watts[hop.from] * gain(a, b, p);
      double interference = 0.0;
      for (VehicleId k : senders_in_slot[hop.slot])
        if (k != hop.from && k != hop.to) interference += watts[k] * gain(veh[k], b, p);
      const double ratio = signal / (interference + p.boltzmann * p.temperature_k * p.bandwidth_hz);
      inv_sinr += 1.0 / ratio;
      if (signal < q.min_received_w) violation += (q.min_received_w - signal) / q.min_received_w;
      if (ratio < q.min_sinr) violation += (q.min_sinr - ratio) / q.min_sinr;
    }
    o.f1 += delay / n;
    if (delay > q.max_delay_s) violation += (delay - q.max_delay_s) / q.max_delay_s;
    if (paths[src].empty()) {
      bool has_neighbor = false;
      for (const auto& v : s.vehicles)
        if (v.id != src && std::hypot(v.x - veh[src].x, v.y - veh[src].y) <= range_m) has_neighbor = true;
      if (has_neighbor) violation += 1.0;
    }
  }
  if (slots > 0) {
    double mean = 0.0;
    for (VehicleId id : g.roster) mean += load[id] / static_cast<double>(slots) / n;
    for (VehicleId id : g.roster) {
      const double dl = load[id] / static_cast<double>(slots) - mean;
      o.f2 += dl * dl / n;
    }
    o.f3 = inv_sinr / static_cast<double>(slots);
  }
  o.violation = violation;
  return o;
}

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  const bool fa = a.violation <= 0.0, fb = b.violation <= 0.0;
  if (fa != fb) return fa;
  if (!fa) return a.violation < b.violation;
  bool strictly = false;
  for (std::size_t m = 0; m < 4; ++m) {
    if (a[m] > b[m]) return false;
    if (a[m] < b[m]) strictly = true;
  }
  return strictly;
}

// Full dominance matrix, then repeated peeling of undominated rows.
inline std::vector<std::vector<std::size_t>> naive_sort(const std::vector<ObjectiveVector>& v) {
  const std::size_t n = v.size();
  std::vector<std::vector<char>> dom(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dom[i][j] = i != j && dominates(v[i], v[j]);
  std::vector<char> placed(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::size_t left = n;
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t j = 0; j < n; ++j) {
      if (placed[j]) continue;
      bool beaten = false;
      for (std::size_t i = 0; i < n && !beaten; ++i) beaten = !placed[i] && dom[i][j];
      if (!beaten) front.push_back(j);
    }
    for (auto j : front) placed[j] = 1;
    left -= front.size();
    fronts.push_back(front);
  }
  return fronts;
}

// Crowding for a front with pairwise distinct values per objective.
inline std::vector<double> naive_crowding(const std::vector<ObjectiveVector>& f) {
  const std::size_t n = f.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n, 0.0);
  if (n <= 2) return std::vector<double>(n, inf);
  for (std::size_t m = 0; m < 4; ++m) {
    double lo = inf, hi = -inf;
    for (const auto& x : f) lo = std::min(lo, x[m]), hi = std::max(hi, x[m]);
    if (hi <= lo) continue;
    for (std::size_t i = 0; i < n; ++i) {
      double below = -inf, above = inf;
      for (std::size_t j = 0; j < n; ++j) {
        if (f[j][m] < f[i][m]) below = std::max(below, f[j][m]);
        if (f[j][m] > f[i][m]) above = std::min(above, f[j][m]);
      }
      if (below == -inf || above == inf)
        d[i] = inf;
      else
        d[i] += (above - below) / (hi - lo);
    }
  }
  return d;
}

// Union volume by inclusion-exclusion over every subset; fine up to ~15 points.
inline double inclusion_exclusion_hv(const std::vector<std::vector<double>>& pts, const std::vector<double>& r) {
  const std::size_t n = pts.size();
  double total = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> corner(r.size(), -std::numeric_limits<double>::infinity());
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        ++bits;
        for (std::size_t m = 0; m < r.size(); ++m) corner[m] = std::max(corner[m], pts[i][m]);
      }
    double vol = 1.0;
    for (std::size_t m = 0; m < r.size(); ++m) vol *= std::max(0.0, r[m] - corner[m]);
    total += (bits % 2 ? 1.0 : -1.0) * vol;
  }
  return total;
}

// Vehicles scattered over a stretch of highway; ids are sorted but not contiguous.
inline Snapshot random_snapshot(vanet::Rng& rng, std::size_t n, double length_m = 400.0) {
  Snapshot s;
  VehicleId id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    id += 1 + static_cast<VehicleId>(rng.index(3));
    VehicleState v;
    v.id = id;
    v.x = rng.uniform(0.0, length_m);
    v.y = 3.75 * static_cast<double>(rng.index(4));
    v.vx = rng.uniform(20.0, 36.0) * (v.y < 7.0 ? 1.0 : -1.0);
    v.vy = rng.uniform(-0.5, 0.5);
    s.vehicles.push_back(v);
  }
  return s;
}

inline ObjectiveVector random_objectives(vanet::Rng& rng, double infeasible_share = 0.0) {
  ObjectiveVector o{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), 0.0};
  if (rng.uniform() < infeasible_share) o.violation = rng.uniform(0.0, 3.0);
  return o;
}

}  // namespace ref
