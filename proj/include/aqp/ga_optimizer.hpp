#pragma once

#include <cstdint>
#include <vector>

#include "aqp/profile.hpp"
#include "aqp/rng.hpp"
#include "aqp/vector_model.hpp"

namespace aqp {

struct Individual {
  QueryVector chromosome;
  double fitness = 0.0;

  friend bool operator==(const Individual&, const Individual&) = default;
};

// Query sample the fitness is averaged over; must be nonempty.
struct EvaluationSet {
  std::vector<QueryVector> queries;
};

struct GaConfig {
  std::size_t population_size = 20;
  std::size_t generations = 50;
  double crossover_rate = 0.9;
  double mutation_sigma = 0.1;
  double mutation_rate = 0.1;
  std::size_t elitism = 1;
  std::size_t tournament_size = 2;
  std::uint64_t seed = 0;
};

// Positive-minus-negative similarity of one query to a category, in [-1, 1].
double phi(const Category& c, const QueryVector& d);

// Mean over the evaluation set of the candidate's similarity minus the
// negative descriptor's similarity; the candidate stands in for the positive
// descriptor. Throws std::invalid_argument on an empty evaluation set.
double fitness(const QueryVector& candidate, const Category& c, const EvaluationSet& s);

// Component-wise mix * a + (1 - mix) * b over the union support.
// mix must lie in [0, 1].
QueryVector crossover(const QueryVector& a, const QueryVector& b, double mix);

// Perturbs each stored component independently with probability
// cfg.mutation_rate by Gaussian noise of cfg.mutation_sigma; negative
// results clamp to zero.
QueryVector mutate(const QueryVector& v, const GaConfig& cfg, Rng& rng);

struct EvolveResult {
  Individual best;
  // Population best after the initial evaluation and after each generation
  // (length cfg.generations + 1). Non-decreasing whenever elitism >= 1.
  std::vector<double> best_per_generation;
};

// Generational GA over real-valued chromosomes on the union feature support
// of the category and the evaluation set: seeded from desc_pos plus
// Gaussian-perturbed clones, tournament selection, arithmetic crossover,
// Gaussian mutation, elitism. Deterministic given cfg.seed.
EvolveResult evolve(const Category& c, const EvaluationSet& s, const GaConfig& cfg);

}  // namespace aqp
