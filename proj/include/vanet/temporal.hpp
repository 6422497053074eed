#pragma once

#include "vanet/channel.hpp"
#include "vanet/encoding.hpp"
#include "vanet/evolution.hpp"
#include "vanet/objectives.hpp"
#include "vanet/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace vanet {

struct OptimizerConfig {
  ChannelParams channel;
  Bounds bounds;
  EvoParams evo;
  QosThresholds thresholds;
  double gamma = 0.3;  // share of each second's initial population inherited from the previous second
  std::uint64_t seed = 1;
};

void validate(const OptimizerConfig& c);

struct SecondMetrics {
  double avg_delay_s = 0.0;
  double load_variance = 0.0;
  double avg_sinr = 0.0;  // linear
  double path_stability = 0.0;  // f4 of the representative
};

struct SecondResult {
  int second_index = 0;
  std::size_t n_vehicles = 0;
  std::size_t inherited = 0;
  Population initial_population;
  Population final_population;
  Population pareto_front;
  std::size_t representative_index = 0;  // into pareto_front
  SecondMetrics metrics;

  const Individual& representative() const { return pareto_front.at(representative_index); }
};

// Best `count` individuals by (rank ascending, crowding descending, index ascending).
std::vector<Genome> select_inheritance(const Population& previous, std::size_t count);

// round(gamma * size), halves rounded up.
std::size_t inherited_count(double gamma, std::size_t size);

// Front member closest to the ideal point after min-max normalization of f1..f3.
std::size_t knee_point(const Population& front);

SecondMetrics compute_metrics(const Individual& representative, const Evaluator& evaluator);

Population initialize_population(int second, const SecondResult* previous, const Evaluator& evaluator,
                                 const OptimizerConfig& config, Rng& rng);

SecondResult run_second(int second, const Snapshot& snapshot, const SecondResult* previous,
                        const OptimizerConfig& config);

using ProgressFn = std::function<void(const SecondResult&)>;

std::vector<SecondResult> run_scenario(const std::vector<Snapshot>& snapshots, const OptimizerConfig& config,
                                       const ProgressFn& progress = {});

}  // namespace vanet
