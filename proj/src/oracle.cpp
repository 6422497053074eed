#include "vanet/oracle.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace vanet {

Bounds TinyInstance::bounds() const {
  Bounds b;
  b.hops = hops;
  b.max_range_m = max_range_m;
  b.data_bits_grid = data_bits_grid;
  b.power_mw_grid = power_mw_grid;
  b.data_bits_min = *std::min_element(data_bits_grid.begin(), data_bits_grid.end());
  b.data_bits_max = *std::max_element(data_bits_grid.begin(), data_bits_grid.end());
  b.power_mw_min = *std::min_element(power_mw_grid.begin(), power_mw_grid.end());
  b.power_mw_max = *std::max_element(power_mw_grid.begin(), power_mw_grid.end());
  return b;
}

std::vector<std::vector<VehicleId>> relay_options(const Snapshot& snapshot, const Topology& topology, std::size_t vehicle,
                                                  std::size_t hops) {
  const std::size_t n = snapshot.size();
  std::vector<std::vector<VehicleId>> out;
  std::vector<std::size_t> digits(hops, 0);
  while (true) {
    std::vector<VehicleId> seq(hops);
    bool valid = true;
    std::size_t node = vehicle;
    for (std::size_t h = 0; h < hops && valid; ++h) {
      const std::size_t r = digits[h];
      seq[h] = snapshot.vehicles[r].id;
      if (r == vehicle || r == node) continue;
      if (!topology.in_range(node, r)) valid = false;
      node = r;
    }
    if (valid) out.push_back(std::move(seq));
    std::size_t k = 0;
    while (k < hops && ++digits[k] == n) digits[k++] = 0;
    if (k == hops) break;
  }
  return out;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

struct Archive {
  std::vector<ObjectiveVector> points;
  std::vector<Genome> genomes;

  void offer(const ObjectiveVector& p, const Genome& g) {
    for (const auto& q : points)
      if (q == p || constrained_dominates(q, p)) return;
    std::size_t keep = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (constrained_dominates(p, points[i])) continue;
      if (keep != i) {
        points[keep] = std::move(points[i]);
        genomes[keep] = std::move(genomes[i]);
      }
      ++keep;
    }
    points.resize(keep);
    genomes.resize(keep);
    points.push_back(p);
    genomes.push_back(g);
  }
};

void check_size(const TinyInstance& instance) {
  const auto n = instance.snapshot.size();
  const auto total = joint_space_size(instance);
  auto refuse = [&](const std::string& why) {
    throw OracleRefusal("oracle refuses instance: " + why + " (joint space " + std::to_string(total) + ")", total);
  };
  if (n == 0 || n > oracle_max_vehicles) refuse("needs 1.." + std::to_string(oracle_max_vehicles) + " vehicles");
  if (instance.hops < 1 || instance.hops > oracle_max_hops) refuse("needs 1.." + std::to_string(oracle_max_hops) + " hops");
  if (instance.data_bits_grid.empty() || instance.data_bits_grid.size() > oracle_max_grid ||
      instance.power_mw_grid.empty() || instance.power_mw_grid.size() > oracle_max_grid)
    refuse("grids need 1.." + std::to_string(oracle_max_grid) + " values");
  if (total > oracle_max_combinations) refuse("more than " + std::to_string(oracle_max_combinations) + " combinations");
}

}  // namespace

std::uint64_t joint_space_size(const TinyInstance& instance) {
  const Topology topology(instance.snapshot, instance.max_range_m);
  const std::uint64_t grid = instance.data_bits_grid.size() * instance.power_mw_grid.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < instance.snapshot.size(); ++i) {
    if (instance.hops > oracle_max_hops || instance.snapshot.size() > 8) {
      // Upper bound without enumerating relay sequences.
      std::uint64_t seqs = 1;
      for (std::size_t h = 0; h < instance.hops; ++h) seqs = saturating_mul(seqs, instance.snapshot.size());
      total = saturating_mul(total, saturating_mul(grid, seqs));
      continue;
    }
    total = saturating_mul(total, saturating_mul(grid, relay_options(instance.snapshot, topology, i, instance.hops).size()));
  }
  return total;
}

OracleFront enumerate_front(const TinyInstance& instance, const ChannelParams& channel,
                            const QosThresholds& thresholds, unsigned threads) {
  check_size(instance);
  validate(instance.snapshot);
  const Bounds bounds = instance.bounds();
  const Evaluator evaluator(instance.snapshot, channel, thresholds, bounds,
                            ShadowSampler(instance.shadow_seed, instance.snapshot.second_index, channel.shadow_sigma_db),
                            instance.predecessor);

  const std::size_t n = instance.snapshot.size();
  std::vector<std::vector<GeneBlock>> options(n);
  for (std::size_t i = 0; i < n; ++i)
    for (double s : instance.data_bits_grid)
      for (double p : instance.power_mw_grid)
        for (auto& relays : relay_options(instance.snapshot, evaluator.topology(), i, instance.hops))
          options[i].push_back(GeneBlock{s, p, relays});

  std::uint64_t total = 1;
  for (const auto& o : options) total *= o.size();

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));

  std::vector<Archive> partial(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t begin = total * t / threads;
    const std::uint64_t end = total * (t + 1) / threads;
    Genome g;
    g.roster = instance.snapshot.roster();
    g.blocks.resize(n);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint64_t rest = idx;
      for (std::size_t i = 0; i < n; ++i) {
        g.blocks[i] = options[i][rest % options[i].size()];
        rest /= options[i].size();
      }
      partial[t].offer(evaluator.evaluate(g), g);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();

  Archive merged;
  for (auto& a : partial)
    for (std::size_t i = 0; i < a.points.size(); ++i) merged.offer(a.points[i], a.genomes[i]);

  // Stable output order: lexicographic by objective vector.
  std::vector<std::size_t> order(merged.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto va = merged.points[a].values();
    const auto vb = merged.points[b].values();
    if (va != vb) return va < vb;
    return merged.points[a].violation < merged.points[b].violation;
  });
  OracleFront out;
  out.evaluations = total;
  for (auto i : order) {
    out.points.push_back(merged.points[i]);
    out.genomes.push_back(std::move(merged.genomes[i]));
  }
  return out;
}

Population ga_front(const TinyInstance& instance, const ChannelParams& channel, const QosThresholds& thresholds,
                    const EvoParams& evo, std::uint64_t seed) {
  validate(evo);
  const Bounds bounds = instance.bounds();
  const Evaluator evaluator(instance.snapshot, channel, thresholds, bounds,
                            ShadowSampler(instance.shadow_seed, instance.snapshot.second_index, channel.shadow_sigma_db),
                            instance.predecessor);
  const auto s = static_cast<std::uint64_t>(instance.snapshot.second_index);
  Rng init(derive_seed(seed, {s, 0, static_cast<std::uint64_t>(StreamRole::init)}));
  Population pop;
  pop.reserve(evo.pop_size);
  while (pop.size() < evo.pop_size)
    pop.push_back(make_individual(random_genome(instance.snapshot, evaluator.topology(), bounds, init), evaluator,
                                  Provenance::random));
  rank_population(pop);
  const GenerationContext ctx{evaluator, evo, evo.p_mutation};
  for (std::size_t gen = 1; gen <= evo.max_generations; ++gen) {
    Rng rng(derive_seed(seed, {s, gen, static_cast<std::uint64_t>(StreamRole::variation)}));
    pop = run_generation(std::move(pop), ctx, rng);
  }
  Population front;
  for (auto& ind : pop)
    if (ind.rank == 0) front.push_back(std::move(ind));
  return front;
}

namespace {

double hv_recursive(std::vector<const double*> pts, const Point& ref, std::size_t dim) {
  if (pts.empty()) return 0.0;
  if (dim == 1) {
    double best = ref[0];
    for (const double* p : pts) best = std::min(best, p[0]);
    return ref[0] - best;
  }
  const std::size_t axis = dim - 1;
  std::sort(pts.begin(), pts.end(), [axis](const double* a, const double* b) { return a[axis] < b[axis]; });
  double volume = 0.0;
  std::vector<const double*> slab;
  slab.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    slab.push_back(pts[i]);
    const double upper = i + 1 < pts.size() ? pts[i + 1][axis] : ref[axis];
    const double width = upper - pts[i][axis];
    if (width > 0.0) volume += width * hv_recursive(slab, ref, dim - 1);
  }
  return volume;
}

}  // namespace

double hypervolume(std::span<const Point> points, const Point& reference) {
  std::vector<const double*> pts;
  for (const auto& p : points) {
    if (p.size() != reference.size()) throw std::invalid_argument("hypervolume: dimension mismatch");
    for (std::size_t m = 0; m < p.size(); ++m)
      if (p[m] > reference[m]) throw std::invalid_argument("hypervolume: point lies beyond the reference point");
    pts.push_back(p.data());
  }
  if (reference.empty()) return 0.0;
  return hv_recursive(std::move(pts), reference, reference.size());
}

Point reference_point(std::span<const ObjectiveVector> oracle_points) {
  Point ref(objective_count, 1.0);
  if (oracle_points.empty()) return ref;
  for (std::size_t m = 0; m < objective_count; ++m) {
    double lo = oracle_points.front()[m];
    double hi = lo;
    for (const auto& p : oracle_points) {
      lo = std::min(lo, p[m]);
      hi = std::max(hi, p[m]);
    }
    ref[m] = hi > lo ? hi + 0.1 * (hi - lo) : hi + 1.0;
  }
  return ref;
}

OracleComparison compare_to_oracle(std::span<const ObjectiveVector> ga_front, std::span<const ObjectiveVector> oracle,
                                   const Point& reference) {
  OracleComparison c;
  c.reference = reference;
  c.ga_points = ga_front.size();
  auto inside = [&](const ObjectiveVector& v) {
    for (std::size_t m = 0; m < objective_count; ++m)
      if (v[m] > reference[m]) return false;
    return true;
  };
  auto to_point = [](const ObjectiveVector& v) {
    const auto a = v.values();
    return Point(a.begin(), a.end());
  };
  std::vector<Point> ga;
  for (const auto& v : ga_front) {
    for (const auto& o : oracle)
      if (constrained_dominates(o, v)) {
        ++c.dominated;
        break;
      }
    if (v.feasible() && inside(v)) ga.push_back(to_point(v));
  }
  std::vector<Point> ref_set;
  for (const auto& o : oracle)
    if (o.feasible() && inside(o)) ref_set.push_back(to_point(o));
  c.ga_hypervolume = hypervolume(ga, reference);
  c.oracle_hypervolume = hypervolume(ref_set, reference);
  c.ratio = c.oracle_hypervolume > 0.0 ? c.ga_hypervolume / c.oracle_hypervolume : 1.0;
  return c;
}

}  // namespace vanet
