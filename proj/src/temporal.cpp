#include "vanet/temporal.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vanet {

void validate(const OptimizerConfig& c) {
  validate(c.channel);
  validate(c.bounds);
  validate(c.evo);
  validate(c.thresholds);
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
}

std::vector<Genome> select_inheritance(const Population& previous, std::size_t count) {
  if (count > previous.size()) {
    std::clog << "warning: inheritance count " << count << " exceeds population size " << previous.size()
              << ", clamping\n";
    count = previous.size();
  }
  std::vector<std::size_t> order(previous.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (previous[a].rank != previous[b].rank) return previous[a].rank < previous[b].rank;
    return previous[a].crowding > previous[b].crowding;
  });
  std::vector<Genome> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(previous[order[k]].genome);
  return out;
}

std::size_t inherited_count(double gamma, std::size_t size) {
  return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(size) + 0.5));
}

std::size_t knee_point(const Population& front) {
  if (front.empty()) throw std::invalid_argument("knee_point: empty front");
  constexpr std::size_t knee_objectives = 3;
  std::array<double, knee_objectives> lo{}, hi{};
  for (std::size_t m = 0; m < knee_objectives; ++m) {
    lo[m] = hi[m] = front.front().objectives[m];
    for (const auto& ind : front) {
      lo[m] = std::min(lo[m], ind.objectives[m]);
      hi[m] = std::max(hi[m], ind.objectives[m]);
    }
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    double d = 0.0;
    for (std::size_t m = 0; m < knee_objectives; ++m) {
      if (!(hi[m] > lo[m])) continue;
      const double z = (front[i].objectives[m] - lo[m]) / (hi[m] - lo[m]);
      d += z * z;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

SecondMetrics compute_metrics(const Individual& representative, const Evaluator& evaluator) {
  const auto detail = evaluator.evaluate_detail(representative.genome);
  SecondMetrics m;
  m.avg_delay_s = detail.objectives.f1;
  m.load_variance = detail.objectives.f2;
  m.path_stability = detail.objectives.f4;
  if (!detail.quality.links.empty()) {
    double sum = 0.0;
    for (const auto& link : detail.quality.links) sum += link.sinr;
    m.avg_sinr = sum / static_cast<double>(detail.quality.links.size());
  }
  return m;
}

Population initialize_population(int second, const SecondResult* previous, const Evaluator& evaluator,
                                 const OptimizerConfig& config, Rng& rng) {
  const std::size_t size = config.evo.pop_size;
  Population pop;
  pop.reserve(size);
  if (second > 1 && previous != nullptr) {
    const auto elites = select_inheritance(previous->final_population, inherited_count(config.gamma, size));
    for (const auto& g : elites)
      pop.push_back(make_individual(adapt_dimension(g, evaluator.snapshot(), evaluator.topology(), config.bounds, rng),
                                    evaluator, Provenance::inherited));
  }
  while (pop.size() < size)
    pop.push_back(make_individual(random_genome(evaluator.snapshot(), evaluator.topology(), config.bounds, rng),
                                  evaluator, Provenance::random));
  rank_population(pop);
  return pop;
}

SecondResult run_second(int second, const Snapshot& snapshot, const SecondResult* previous,
                        const OptimizerConfig& config) {
  validate(snapshot);
  const auto s = static_cast<std::uint64_t>(second);
  std::optional<Genome> anchor;
  if (previous != nullptr && second > 1) anchor = previous->representative().genome;
  const Evaluator evaluator(snapshot, config.channel, config.thresholds, config.bounds,
                            ShadowSampler(config.seed, second, config.channel.shadow_sigma_db), std::move(anchor));

  SecondResult result;
  result.second_index = second;
  result.n_vehicles = snapshot.size();

  Rng init_rng(derive_seed(config.seed, {s, 0, static_cast<std::uint64_t>(StreamRole::init)}));
  Population pop = initialize_population(second, previous, evaluator, config, init_rng);
  sort_population(pop);
  result.inherited = static_cast<std::size_t>(
      std::count_if(pop.begin(), pop.end(), [](const Individual& i) { return i.provenance == Provenance::inherited; }));
  result.initial_population = pop;

  const long delta_n = previous != nullptr && second > 1
                           ? static_cast<long>(snapshot.size()) - static_cast<long>(previous->n_vehicles)
                           : 0;
  const GenerationContext ctx{evaluator, config.evo,
                              adaptive_mutation_rate(config.evo.p_mutation, delta_n, snapshot.size())};
  for (std::size_t gen = 1; gen <= config.evo.max_generations; ++gen) {
    Rng rng(derive_seed(config.seed, {s, gen, static_cast<std::uint64_t>(StreamRole::variation)}));
    pop = run_generation(std::move(pop), ctx, rng);
  }

  for (const auto& ind : pop)
    if (ind.rank == 0) result.pareto_front.push_back(ind);
  result.final_population = std::move(pop);
  result.representative_index = knee_point(result.pareto_front);
  result.metrics = compute_metrics(result.representative(), evaluator);
  return result;
}

std::vector<SecondResult> run_scenario(const std::vector<Snapshot>& snapshots, const OptimizerConfig& config,
                                       const ProgressFn& progress) {
  if (snapshots.empty()) throw std::invalid_argument("run_scenario: no snapshots");
  validate(config);
  std::vector<SecondResult> results;
  results.reserve(snapshots.size());
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const int second = static_cast<int>(k) + 1;
    try {
      results.push_back(run_second(second, snapshots[k], results.empty() ? nullptr : &results.back(), config));
    } catch (const std::exception& e) {
      throw std::runtime_error("second " + std::to_string(second) + ": " + e.what());
    }
    if (progress) progress(results.back());
  }
  return results;
}

}  // namespace vanet
