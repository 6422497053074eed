#pragma once

#include "vanet/channel.hpp"
#include "vanet/encoding.hpp"
#include "vanet/trajectory.hpp"

#include <array>
#include <optional>
#include <vector>

namespace vanet {

inline constexpr std::size_t objective_count = 4;

struct ObjectiveVector {
  double f1 = 0.0;  // mean end-to-end delay, s
  double f2 = 0.0;  // variance of normalized relay loads
  double f3 = 0.0;  // mean inverse SINR over all N*H slots
  double f4 = 0.0;  // temporal instability in [0, 1]
  double violation = 0.0;

  std::array<double, objective_count> values() const { return {f1, f2, f3, f4}; }
  double operator[](std::size_t m) const { return values()[m]; }
  bool feasible() const { return violation <= 0.0; }
  bool operator==(const ObjectiveVector&) const = default;
};

struct QosThresholds {
  double min_received_w = 1e-12;  // -90 dBm
  double min_sinr = 10.0;         // linear, 10 dB
  double max_delay_s = 0.1;
};

void validate(const QosThresholds& t);

struct DelayResult {
  double f1 = 0.0;
  std::vector<double> per_vehicle;
};

// Bandwidth at a hop is B_net split evenly over the distinct flows transmitting from
// the hop's sender; each hop costs data_bits / bandwidth plus distance / c.
DelayResult eval_delay(const Genome& g, const Snapshot& snapshot, const ChannelParams& channel);

double eval_load(const Genome& g, const Snapshot& snapshot);

struct LinkMetric {
  std::size_t source = 0;
  std::size_t tx = 0;
  std::size_t rx = 0;
  double received_w = 0.0;
  double sinr = 0.0;
};

struct LinkQualityResult {
  double f3 = 0.0;
  std::vector<LinkMetric> links;
};

LinkQualityResult eval_link_quality(const Genome& g, const Snapshot& snapshot, const LinkBudget& budget,
                                    InterferenceModel model = InterferenceModel::same_slot);

// 0 without a predecessor. Same roster: fraction of changed relay slots. Otherwise the
// mean of the changed fraction over vehicles present in both and the relative size change.
double eval_stability(const Genome& current, const Genome* previous);

// Normalized shortfalls on every active link and every vehicle delay, plus one unit per
// vehicle that has an in-range neighbor but sends nothing.
double eval_constraints(const Genome& g, const Topology& topology, const QosThresholds& thresholds,
                        const std::vector<LinkMetric>& links, const std::vector<double>& delays);

// Everything needed to score genomes within one second.
class Evaluator {
 public:
  Evaluator(const Snapshot& snapshot, const ChannelParams& channel, const QosThresholds& thresholds,
            const Bounds& bounds, const ShadowSampler& shadow, std::optional<Genome> previous);

  ObjectiveVector evaluate(const Genome& g) const;

  struct Detail {
    ObjectiveVector objectives;
    DelayResult delay;
    LinkQualityResult quality;
  };
  Detail evaluate_detail(const Genome& g) const;

  const Snapshot& snapshot() const { return snapshot_; }
  const Topology& topology() const { return topology_; }
  const LinkBudget& budget() const { return budget_; }
  const Bounds& bounds() const { return bounds_; }
  const std::optional<Genome>& previous() const { return previous_; }

 private:
  Snapshot snapshot_;
  ChannelParams channel_;
  QosThresholds thresholds_;
  Bounds bounds_;
  Topology topology_;
  LinkBudget budget_;
  std::optional<Genome> previous_;
};

}  // namespace vanet
