#pragma once

#include "vanet/encoding.hpp"
#include "vanet/objectives.hpp"
#include "vanet/rng.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace vanet {

enum class Provenance { random, inherited, offspring };

struct Individual {
  Genome genome;
  ObjectiveVector objectives;
  std::size_t rank = 0;
  double crowding = 0.0;
  Provenance provenance = Provenance::random;
};

using Population = std::vector<Individual>;

struct EvoParams {
  std::size_t pop_size = 100;
  std::size_t max_generations = 20;
  double p_crossover = 0.9;
  double p_mutation = 0.1;
  double eta_c = 15.0;
  double eta_m = 20.0;
  std::size_t tournament_size = 2;
};

void validate(const EvoParams& p);

// Feasible beats infeasible, lower violation beats higher, and feasible pairs
// compare by Pareto dominance over (f1..f4).
bool constrained_dominates(const ObjectiveVector& a, const ObjectiveVector& b);
bool pareto_dominates(std::span<const double> a, std::span<const double> b);

using Fronts = std::vector<std::vector<std::size_t>>;

Fronts non_dominated_sort(std::span<const ObjectiveVector> objectives);

// Distances for the members of one front, in the order given.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> front);

// Assigns rank and crowding to every individual and returns the fronts.
Fronts rank_population(Population& population);

// Reorders by (rank ascending, crowding descending), keeping the current order on ties.
void sort_population(Population& population);

double sbx_beta(double r, double eta);
// Children 0.5[(y1+y2) -/+ beta|y2-y1|] for the spread factor drawn from r.
std::pair<double, double> sbx_pair(double y1, double y2, double r, double eta);

// Continuous genes: each gene pair is recombined with probability 0.5 using a fresh
// spread draw, then clamped (and snapped in grid mode). Relay slots are swapped
// independently with probability 0.5. Throws std::invalid_argument on roster mismatch.
std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, const Bounds& bounds, double eta_c,
                                        Rng& rng);

double adaptive_mutation_rate(double p_m, long delta_n, std::size_t n_t);

double polynomial_mutation(double y, double lo, double hi, double eta, double u);

// Each continuous gene and each relay slot mutates with probability `rate`. Relay slots
// reset to a uniform draw among the current node and its in-range neighbors.
Genome mutate(Genome g, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds, double rate,
              double eta_m, Rng& rng);

Individual adaptive_mutation(Individual ind, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                             double p_m, long delta_n, std::size_t n_t, double eta_m, Rng& rng);

// Index of the winner of a k-way tournament with replacement: lower rank, then larger
// crowding, then lower index.
std::size_t tournament_select(const Population& population, std::size_t k, Rng& rng);

// Truncates to `size` by whole fronts, breaking the last front by crowding. The result is ranked and sorted.
Population environmental_select(Population pool, std::size_t size);

struct GenerationContext {
  const Evaluator& evaluator;
  const EvoParams& params;
  double mutation_rate;
};

// One NSGA-II generation: tournament, crossover, mutation, repair, evaluation and
// elitist truncation of the parent/offspring union. Offspring identical to a genome
// already in the pool are discarded.
Population run_generation(Population population, const GenerationContext& ctx, Rng& rng);

Individual make_individual(Genome g, const Evaluator& evaluator, Provenance provenance);

}  // namespace vanet
