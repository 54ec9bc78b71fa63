#include "aqp/ga_optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aqp {

double phi(const Category& c, const QueryVector& d) {
  return cosine(c.desc_pos, d) - cosine(c.desc_neg, d);
}

double fitness(const QueryVector& candidate, const Category& c, const EvaluationSet& s) {
  if (s.queries.empty()) {
    throw std::invalid_argument("fitness: evaluation set is empty");
  }
  double sum = 0.0;
  for (const QueryVector& d : s.queries) {
    sum += cosine(candidate, d) - cosine(c.desc_neg, d);
  }
  return sum / static_cast<double>(s.queries.size());
}

QueryVector crossover(const QueryVector& a, const QueryVector& b, double mix) {
  if (!(mix >= 0.0 && mix <= 1.0)) {
    throw std::invalid_argument("crossover: mix must lie in [0, 1]");
  }
  QueryVector child = a.scaled(mix);
  child.accumulate(b, 1.0 - mix);
  return child;
}

QueryVector mutate(const QueryVector& v, const GaConfig& cfg, Rng& rng) {
  QueryVector out = v;
  for (const auto& [id, w] : v.entries()) {
    if (uniform_double(rng) < cfg.mutation_rate) {
      out.set_weight(id, std::max(0.0, w + cfg.mutation_sigma * gaussian(rng)));
    }
  }
  return out;
}

namespace {

// Union support of the descriptors and the evaluation set: the GA's search
// space, in ascending feature order.
std::vector<FeatureId> working_domain(const Category& c, const EvaluationSet& s) {
  std::vector<FeatureId> ids;
  const auto collect = [&ids](const QueryVector& v) {
    for (const auto& [id, w] : v.entries()) {
      ids.push_back(id);
    }
  };
  collect(c.desc_pos);
  collect(c.desc_neg);
  for (const QueryVector& q : s.queries) {
    collect(q);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

QueryVector perturb_over_domain(const QueryVector& v, std::span<const FeatureId> domain,
                                double rate, double sigma, Rng& rng) {
  QueryVector out = v;
  for (FeatureId id : domain) {
    if (uniform_double(rng) < rate) {
      out.set_weight(id, std::max(0.0, v.weight(id) + sigma * gaussian(rng)));
    }
  }
  return out;
}

}  // namespace

EvolveResult evolve(const Category& c, const EvaluationSet& s, const GaConfig& cfg) {
  if (cfg.population_size < 1) {
    throw std::invalid_argument("evolve: population_size must be >= 1");
  }
  if (cfg.elitism < 1 || cfg.elitism > cfg.population_size) {
    throw std::invalid_argument("evolve: elitism must lie in [1, population_size]");
  }
  if (cfg.tournament_size < 2) {
    throw std::invalid_argument("evolve: tournament_size must be >= 2");
  }
  if (s.queries.empty()) {
    throw std::invalid_argument("evolve: evaluation set is empty");
  }

  const std::vector<FeatureId> domain = working_domain(c, s);
  Rng rng(cfg.seed);

  std::vector<Individual> pop;
  pop.reserve(cfg.population_size);
  pop.push_back({c.desc_pos, fitness(c.desc_pos, c, s)});
  for (std::size_t i = 1; i < cfg.population_size; ++i) {
    QueryVector chrom =
        perturb_over_domain(c.desc_pos, domain, 1.0, cfg.mutation_sigma, rng);
    const double f = fitness(chrom, c, s);
    pop.push_back({std::move(chrom), f});
  }

  const auto population_best = [](const std::vector<Individual>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].fitness > v[best].fitness) {
        best = i;
      }
    }
    return best;
  };

  Individual best_ever = pop[population_best(pop)];
  EvolveResult result;
  result.best_per_generation.reserve(cfg.generations + 1);
  result.best_per_generation.push_back(best_ever.fitness);

  const auto tournament = [&](std::vector<Individual>& v) -> const Individual& {
    std::size_t winner = uniform_index(rng, v.size());
    for (std::size_t t = 1; t < cfg.tournament_size; ++t) {
      const std::size_t challenger = uniform_index(rng, v.size());
      if (v[challenger].fitness > v[winner].fitness) {
        winner = challenger;
      }
    }
    return v[winner];
  };

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&pop](std::size_t a, std::size_t b) {
      return pop[a].fitness > pop[b].fitness;
    });

    std::vector<Individual> next;
    next.reserve(cfg.population_size);
    for (std::size_t e = 0; e < cfg.elitism; ++e) {
      next.push_back(pop[order[e]]);
    }
    while (next.size() < cfg.population_size) {
      const Individual& parent_a = tournament(pop);
      const Individual& parent_b = tournament(pop);
      QueryVector chrom;
      if (uniform_double(rng) < cfg.crossover_rate) {
        chrom = crossover(parent_a.chromosome, parent_b.chromosome, uniform_double(rng));
      } else {
        chrom = parent_a.chromosome;
      }
      chrom = perturb_over_domain(chrom, domain, cfg.mutation_rate, cfg.mutation_sigma, rng);
      const double f = fitness(chrom, c, s);
      next.push_back({std::move(chrom), f});
    }
    pop = std::move(next);

    const Individual& gen_best = pop[population_best(pop)];
    if (gen_best.fitness > best_ever.fitness) {
      best_ever = gen_best;
    }
    result.best_per_generation.push_back(gen_best.fitness);
  }

  result.best = std::move(best_ever);
  return result;
}

}  // namespace aqp
