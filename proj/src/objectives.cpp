#include "vanet/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace vanet {

void validate(const QosThresholds& t) {
  if (!(t.min_received_w > 0.0)) throw std::invalid_argument("thresholds.min_received_w must be > 0");
  if (!(t.min_sinr > 0.0)) throw std::invalid_argument("thresholds.min_sinr must be > 0");
  if (!(t.max_delay_s > 0.0)) throw std::invalid_argument("thresholds.max_delay_s must be > 0");
}

namespace {

std::vector<std::vector<Hop>> all_hops(const Genome& g, const Snapshot& snapshot) {
  std::vector<std::vector<Hop>> paths(g.blocks.size());
  for (std::size_t i = 0; i < g.blocks.size(); ++i) paths[i] = active_hops(g, i, snapshot);
  return paths;
}

std::size_t slot_count(const Genome& g) {
  std::size_t slots = 0;
  for (const auto& b : g.blocks) slots += b.relays.size();
  return slots;
}

DelayResult delay_from_paths(const Genome& g, const Snapshot& snapshot, const ChannelParams& channel,
                             const std::vector<std::vector<Hop>>& paths) {
  const std::size_t n = g.blocks.size();
  // Distinct flows sending from each node.
  std::vector<std::size_t> flows(n, 0);
  std::vector<std::size_t> last_flow(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& hop : paths[i])
      if (last_flow[hop.tx] != i) {
        last_flow[hop.tx] = i;
        ++flows[hop.tx];
      }

  DelayResult out;
  out.per_vehicle.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (const auto& hop : paths[i]) {
      const double rate = channel.bandwidth_hz / static_cast<double>(std::max<std::size_t>(1, flows[hop.tx]));
      d += g.blocks[i].data_bits / rate +
           distance(snapshot.vehicles[hop.tx], snapshot.vehicles[hop.rx]) / speed_of_light;
    }
    out.per_vehicle[i] = d;
    out.f1 += d;
  }
  if (n > 0) out.f1 /= static_cast<double>(n);
  return out;
}

double load_from_paths(const Genome& g, const std::vector<std::vector<Hop>>& paths) {
  const std::size_t n = g.blocks.size();
  const std::size_t slots = slot_count(g);
  if (n == 0 || slots == 0) return 0.0;
  std::vector<double> load(n, 0.0);
  for (const auto& path : paths)
    for (const auto& hop : path) load[hop.rx] += 1.0;
  double mean = 0.0;
  for (auto& l : load) {
    l /= static_cast<double>(slots);
    mean += l;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double l : load) var += (l - mean) * (l - mean);
  return var / static_cast<double>(n);
}

LinkQualityResult quality_from_paths(const Genome& g, const LinkBudget& budget,
                                     const std::vector<std::vector<Hop>>& paths, InterferenceModel model) {
  const std::size_t n = g.blocks.size();
  std::vector<double> power(n);
  for (std::size_t i = 0; i < n; ++i) power[i] = g.blocks[i].transmit_w();

  // Hop h of every path shares slot h; a node radiates once per slot however many flows it carries.
  std::vector<std::vector<std::size_t>> on_air;
  std::vector<std::size_t> everyone(n);
  for (std::size_t k = 0; k < n; ++k) everyone[k] = k;
  for (const auto& path : paths)
    for (const auto& hop : path) {
      if (hop.slot >= on_air.size()) on_air.resize(hop.slot + 1);
      on_air[hop.slot].push_back(hop.tx);
    }
  for (auto& txs : on_air) {
    std::sort(txs.begin(), txs.end());
    txs.erase(std::unique(txs.begin(), txs.end()), txs.end());
  }

  LinkQualityResult out;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& hop : paths[i]) {
      const double signal = budget.received(hop.tx, hop.rx, power[hop.tx]);
      double interference = 0.0;
      const auto& interferers = model == InterferenceModel::same_slot ? on_air[hop.slot] : everyone;
      for (std::size_t k : interferers)
        if (k != hop.tx && k != hop.rx) interference += budget.received(k, hop.rx, power[k]);
      const double ratio = signal / (interference + budget.noise_w());
      out.links.push_back({i, hop.tx, hop.rx, signal, ratio});
      sum += 1.0 / ratio;
    }
  }
  const std::size_t slots = slot_count(g);
  out.f3 = slots == 0 ? 0.0 : sum / static_cast<double>(slots);
  return out;
}

}  // namespace

DelayResult eval_delay(const Genome& g, const Snapshot& snapshot, const ChannelParams& channel) {
  return delay_from_paths(g, snapshot, channel, all_hops(g, snapshot));
}

double eval_load(const Genome& g, const Snapshot& snapshot) { return load_from_paths(g, all_hops(g, snapshot)); }

LinkQualityResult eval_link_quality(const Genome& g, const Snapshot& snapshot, const LinkBudget& budget,
                                    InterferenceModel model) {
  return quality_from_paths(g, budget, all_hops(g, snapshot), model);
}

double eval_stability(const Genome& current, const Genome* previous) {
  if (previous == nullptr) return 0.0;

  auto changed_slots = [](const GeneBlock& a, const GeneBlock& b, std::size_t hops) {
    std::size_t c = 0;
    for (std::size_t h = 0; h < hops; ++h) c += a.relays[h] != b.relays[h] ? 1 : 0;
    return c;
  };

  if (current.roster == previous->roster) {
    std::size_t changed = 0;
    std::size_t slots = 0;
    for (std::size_t i = 0; i < current.blocks.size(); ++i) {
      const std::size_t hops = std::min(current.blocks[i].relays.size(), previous->blocks[i].relays.size());
      changed += changed_slots(current.blocks[i], previous->blocks[i], hops);
      slots += hops;
    }
    return slots == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(slots);
  }

  std::unordered_map<VehicleId, std::size_t> before;
  for (std::size_t i = 0; i < previous->roster.size(); ++i) before.emplace(previous->roster[i], i);
  std::size_t changed = 0;
  std::size_t slots = 0;
  for (std::size_t i = 0; i < current.roster.size(); ++i) {
    auto it = before.find(current.roster[i]);
    if (it == before.end()) continue;
    const auto& a = current.blocks[i];
    const auto& b = previous->blocks[it->second];
    const std::size_t hops = std::min(a.relays.size(), b.relays.size());
    changed += changed_slots(a, b, hops);
    slots += hops;
  }
  const double path_term = slots == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(slots);
  const double n_now = static_cast<double>(current.roster.size());
  const double n_before = static_cast<double>(previous->roster.size());
  const double larger = std::max(n_now, n_before);
  const double size_term = larger == 0.0 ? 0.0 : std::abs(n_now - n_before) / larger;
  return 0.5 * (path_term + size_term);
}

double eval_constraints(const Genome& g, const Topology& topology, const QosThresholds& thresholds,
                        const std::vector<LinkMetric>& links, const std::vector<double>& delays) {
  double violation = 0.0;
  std::vector<bool> sends(g.blocks.size(), false);
  for (const auto& link : links) {
    violation += std::max(0.0, (thresholds.min_received_w - link.received_w) / thresholds.min_received_w);
    violation += std::max(0.0, (thresholds.min_sinr - link.sinr) / thresholds.min_sinr);
    sends[link.source] = true;
  }
  for (double d : delays) violation += std::max(0.0, (d - thresholds.max_delay_s) / thresholds.max_delay_s);
  for (std::size_t i = 0; i < g.blocks.size(); ++i)
    if (!sends[i] && !topology.neighbors(i).empty()) violation += 1.0;
  return violation;
}

Evaluator::Evaluator(const Snapshot& snapshot, const ChannelParams& channel, const QosThresholds& thresholds,
                     const Bounds& bounds, const ShadowSampler& shadow, std::optional<Genome> previous)
    : snapshot_(snapshot),
      channel_(channel),
      thresholds_(thresholds),
      bounds_(bounds),
      topology_(snapshot_, bounds.max_range_m),
      budget_(snapshot_, channel, shadow),
      previous_(std::move(previous)) {}

Evaluator::Detail Evaluator::evaluate_detail(const Genome& g) const {
  const auto paths = all_hops(g, snapshot_);
  Detail d;
  d.delay = delay_from_paths(g, snapshot_, channel_, paths);
  d.quality = quality_from_paths(g, budget_, paths, channel_.interference);
  d.objectives.f1 = d.delay.f1;
  d.objectives.f2 = load_from_paths(g, paths);
  d.objectives.f3 = d.quality.f3;
  d.objectives.f4 = eval_stability(g, previous_ ? &*previous_ : nullptr);
  d.objectives.violation = eval_constraints(g, topology_, thresholds_, d.quality.links, d.delay.per_vehicle);
  return d;
}

ObjectiveVector Evaluator::evaluate(const Genome& g) const { return evaluate_detail(g).objectives; }

}  // namespace vanet
