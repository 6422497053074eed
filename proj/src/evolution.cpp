#include "vanet/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace vanet {

void validate(const EvoParams& p) {
  if (p.pop_size < 4 || p.pop_size % 2 != 0) throw std::invalid_argument("evolution.pop_size must be even and >= 4");
  auto probability = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string("evolution.") + name + " must be in [0, 1]");
  };
  probability(p.p_crossover, "p_crossover");
  probability(p.p_mutation, "p_mutation");
  if (!(p.eta_c >= 0.0) || !(p.eta_m >= 0.0)) throw std::invalid_argument("evolution distribution indices must be >= 0");
  if (p.tournament_size < 1) throw std::invalid_argument("evolution.tournament_size must be >= 1");
}

bool pareto_dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] > b[m]) return false;
    if (a[m] < b[m]) strictly = true;
  }
  return strictly;
}

bool constrained_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  const bool fa = a.feasible();
  const bool fb = b.feasible();
  if (fa != fb) return fa;
  if (!fa) return a.violation < b.violation;
  const auto va = a.values();
  const auto vb = b.values();
  return pareto_dominates(va, vb);
}

Fronts non_dominated_sort(std::span<const ObjectiveVector> objectives) {
  const std::size_t n = objectives.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> counts(n, 0);
  Fronts fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (constrained_dominates(objectives[p], objectives[q])) {
        dominated[p].push_back(q);
        ++counts[q];
      } else if (constrained_dominates(objectives[q], objectives[p])) {
        dominated[q].push_back(p);
        ++counts[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (counts[p] == 0) current.push_back(p);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current)
      for (auto q : dominated[p])
        if (--counts[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n, 0.0);
  if (n <= 2) {
    std::fill(d.begin(), d.end(), inf);
    return d;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < objective_count; ++m) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    const double lo = front[order.front()][m];
    const double hi = front[order.back()][m];
    if (!(hi > lo)) continue;
    d[order.front()] = inf;
    d[order.back()] = inf;
    for (std::size_t k = 1; k + 1 < n; ++k)
      d[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / (hi - lo);
  }
  return d;
}

Fronts rank_population(Population& population) {
  std::vector<ObjectiveVector> objs;
  objs.reserve(population.size());
  for (const auto& ind : population) objs.push_back(ind.objectives);
  auto fronts = non_dominated_sort(objs);
  std::vector<ObjectiveVector> members;
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    members.clear();
    for (auto i : fronts[r]) members.push_back(objs[i]);
    const auto dist = crowding_distance(members);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      population[fronts[r][k]].rank = r;
      population[fronts[r][k]].crowding = dist[k];
    }
  }
  return fronts;
}

void sort_population(Population& population) {
  std::stable_sort(population.begin(), population.end(), [](const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
  });
}

double sbx_beta(double r, double eta) {
  if (r <= 0.5) return std::pow(2.0 * r, 1.0 / (eta + 1.0));
  return std::pow(1.0 / (2.0 * (1.0 - r)), 1.0 / (eta + 1.0));
}

std::pair<double, double> sbx_pair(double y1, double y2, double r, double eta) {
  const double beta = sbx_beta(r, eta);
  const double spread = beta * std::abs(y2 - y1);
  return {0.5 * ((y1 + y2) - spread), 0.5 * ((y1 + y2) + spread)};
}

namespace {

double clamp_gene(double v, double lo, double hi, const std::vector<double>& grid) {
  return snap_to_grid(std::clamp(v, lo, hi), grid);
}

}  // namespace

std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, const Bounds& bounds, double eta_c,
                                        Rng& rng) {
  if (a.roster != b.roster) throw std::invalid_argument("sbx_crossover: parents must share a roster");
  Genome c1 = a;
  Genome c2 = b;
  auto cross = [&](double& x, double& y, double lo, double hi, const std::vector<double>& grid) {
    if (rng.uniform() >= 0.5) return;
    const auto [u, v] = sbx_pair(x, y, rng.uniform(), eta_c);
    x = clamp_gene(u, lo, hi, grid);
    y = clamp_gene(v, lo, hi, grid);
  };
  for (std::size_t i = 0; i < c1.blocks.size(); ++i) {
    auto& x = c1.blocks[i];
    auto& y = c2.blocks[i];
    cross(x.data_bits, y.data_bits, bounds.data_bits_min, bounds.data_bits_max, bounds.data_bits_grid);
    cross(x.power_mw, y.power_mw, bounds.power_mw_min, bounds.power_mw_max, bounds.power_mw_grid);
    const std::size_t hops = std::min(x.relays.size(), y.relays.size());
    for (std::size_t h = 0; h < hops; ++h)
      if (rng.uniform() < 0.5) std::swap(x.relays[h], y.relays[h]);
  }
  return {std::move(c1), std::move(c2)};
}

double adaptive_mutation_rate(double p_m, long delta_n, std::size_t n_t) {
  if (n_t == 0) throw std::invalid_argument("adaptive_mutation_rate: vehicle count must be >= 1");
  return p_m * (1.0 + static_cast<double>(std::labs(delta_n)) / static_cast<double>(n_t));
}

double polynomial_mutation(double y, double lo, double hi, double eta, double u) {
  const double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                               : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
  return std::clamp(y + delta * (hi - lo), lo, hi);
}

Genome mutate(Genome g, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds, double rate,
              double eta_m, Rng& rng) {
  if (rate <= 0.0) return g;
  auto gene = [&](double& y, double lo, double hi, const std::vector<double>& grid) {
    if (rng.uniform() >= rate) return;
    if (!grid.empty())
      y = grid[rng.index(grid.size())];
    else
      y = polynomial_mutation(y, lo, hi, eta_m, rng.uniform());
  };
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    auto& block = g.blocks[i];
    gene(block.data_bits, bounds.data_bits_min, bounds.data_bits_max, bounds.data_bits_grid);
    gene(block.power_mw, bounds.power_mw_min, bounds.power_mw_max, bounds.power_mw_grid);
    const auto source = snapshot.index_of(g.roster[i]);
    if (!source) throw std::invalid_argument("mutate: genome roster does not match snapshot");
    std::size_t node = *source;
    for (auto& r : block.relays) {
      if (rng.uniform() < rate) r = draw_relay(node, snapshot, topology, rng);
      if (r == g.roster[i] || r == snapshot.vehicles[node].id) continue;
      if (auto next = snapshot.index_of(r)) node = *next;
    }
  }
  return g;
}

Individual adaptive_mutation(Individual ind, const Snapshot& snapshot, const Topology& topology, const Bounds& bounds,
                             double p_m, long delta_n, std::size_t n_t, double eta_m, Rng& rng) {
  const double rate = adaptive_mutation_rate(p_m, delta_n, n_t);
  ind.genome = mutate(std::move(ind.genome), snapshot, topology, bounds, rate, eta_m, rng);
  return ind;
}

std::size_t tournament_select(const Population& population, std::size_t k, Rng& rng) {
  std::size_t best = rng.index(population.size());
  for (std::size_t t = 1; t < k; ++t) {
    const std::size_t c = rng.index(population.size());
    const auto& a = population[c];
    const auto& b = population[best];
    if (a.rank < b.rank || (a.rank == b.rank && (a.crowding > b.crowding || (a.crowding == b.crowding && c < best))))
      best = c;
  }
  return best;
}

Population environmental_select(Population pool, std::size_t size) {
  const auto fronts = rank_population(pool);
  Population next;
  next.reserve(size);
  for (const auto& front : fronts) {
    if (next.size() + front.size() <= size) {
      for (auto i : front) next.push_back(std::move(pool[i]));
      if (next.size() == size) break;
      continue;
    }
    std::vector<std::size_t> order(front.begin(), front.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pool[a].crowding > pool[b].crowding; });
    for (std::size_t k = 0; next.size() < size; ++k) next.push_back(std::move(pool[order[k]]));
    break;
  }
  rank_population(next);
  sort_population(next);
  return next;
}

Individual make_individual(Genome g, const Evaluator& evaluator, Provenance provenance) {
  Individual ind;
  ind.objectives = evaluator.evaluate(g);
  ind.genome = std::move(g);
  ind.provenance = provenance;
  return ind;
}

namespace {

std::uint64_t genome_hash(const Genome& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) { h = splitmix64(h ^ v); };
  for (const auto& b : g.blocks) {
    mix(std::bit_cast<std::uint64_t>(b.data_bits));
    mix(std::bit_cast<std::uint64_t>(b.power_mw));
    for (auto r : b.relays) mix(static_cast<std::uint64_t>(r));
  }
  return h;
}

}  // namespace

Population run_generation(Population population, const GenerationContext& ctx, Rng& rng) {
  const auto& ev = ctx.evaluator;
  const auto& params = ctx.params;
  const std::size_t size = population.size();

  std::unordered_multimap<std::uint64_t, std::size_t> seen;
  std::vector<Genome> pool_genomes;
  for (std::size_t i = 0; i < size; ++i) seen.emplace(genome_hash(population[i].genome), i);

  auto is_new = [&](const Genome& g, std::uint64_t h) {
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      const auto& other = it->second < size ? population[it->second].genome : pool_genomes[it->second - size];
      if (other == g) return false;
    }
    return true;
  };

  std::vector<Genome> children;
  children.reserve(size);
  while (children.size() < size) {
    const auto& pa = population[tournament_select(population, params.tournament_size, rng)].genome;
    const auto& pb = population[tournament_select(population, params.tournament_size, rng)].genome;
    std::pair<Genome, Genome> kids = rng.uniform() < params.p_crossover
                                         ? sbx_crossover(pa, pb, ev.bounds(), params.eta_c, rng)
                                         : std::pair<Genome, Genome>{pa, pb};
    for (Genome* kid : {&kids.first, &kids.second}) {
      if (children.size() == size) break;
      Genome g = mutate(std::move(*kid), ev.snapshot(), ev.topology(), ev.bounds(), ctx.mutation_rate, params.eta_m, rng);
      g = repair_relays(std::move(g), ev.snapshot(), ev.topology());
      children.push_back(std::move(g));
    }
  }

  for (auto& g : children) {
    const auto h = genome_hash(g);
    if (!is_new(g, h)) continue;
    seen.emplace(h, size + pool_genomes.size());
    pool_genomes.push_back(std::move(g));
  }

  Population pool = std::move(population);
  pool.reserve(size + pool_genomes.size());
  for (auto& g : pool_genomes) pool.push_back(make_individual(std::move(g), ev, Provenance::offspring));
  return environmental_select(std::move(pool), size);
}

}  // namespace vanet
