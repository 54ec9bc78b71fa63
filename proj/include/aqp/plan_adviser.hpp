#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "aqp/profile.hpp"
#include "aqp/vector_model.hpp"

namespace aqp {

// A prepared execution plan bound to one category. Costs are simulated units;
// a prepared plan never costs more than re-optimizing.
struct PlanCandidate {
  std::uint32_t plan_id = 0;
  std::uint32_t category_id = 0;
  double prepared_cost = 0.0;
  double fresh_cost = 0.0;
  std::uint64_t hit_count = 0;

  friend bool operator==(const PlanCandidate&, const PlanCandidate&) = default;
};

struct ScoredCategory {
  std::uint32_t category_id = 0;
  double score = 0.0;

  friend bool operator==(const ScoredCategory&, const ScoredCategory&) = default;
};

// Either a prepared plan or the fallback to fresh optimization.
// fallback is true exactly when plan_id is absent.
struct Recommendation {
  std::optional<std::uint32_t> plan_id;
  double score = 0.0;
  bool fallback = true;
  double estimated_cost = 0.0;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

// Registry of prepared plans, at most one per category, plus the cost
// accounting updated by record_outcome. Mutations need single-writer
// semantics; reads may be concurrent.
class PlanRegistry {
 public:
  PlanRegistry() = default;
  PlanRegistry(double default_prepared_cost, double default_fresh_cost);

  // Validates costs (finite, 0 <= prepared <= fresh) and uniqueness of both
  // the plan id and the category binding; throws std::invalid_argument.
  void register_plan(const PlanCandidate& plan);

  const PlanCandidate* plan(std::uint32_t plan_id) const;
  const PlanCandidate* plan_for_category(std::uint32_t category_id) const;

  // Books the outcome of one served query: a plan hit bumps the plan's
  // hit_count, a fallback bumps the fallback counters.
  // Throws std::out_of_range for an unknown plan id.
  void record(const Recommendation& rec, double actual_cost);

  const std::map<std::uint32_t, PlanCandidate>& plans() const { return plans_; }
  const std::map<std::uint32_t, std::uint32_t>& by_category() const { return by_category_; }
  double default_prepared_cost() const { return default_prepared_cost_; }
  double default_fresh_cost() const { return default_fresh_cost_; }
  std::uint64_t fallback_count() const { return fallback_count_; }
  double prepared_cost_total() const { return prepared_cost_total_; }
  double fallback_cost_total() const { return fallback_cost_total_; }

  static PlanRegistry from_parts(std::map<std::uint32_t, PlanCandidate> plans,
                                 double default_prepared_cost, double default_fresh_cost,
                                 std::uint64_t fallback_count, double prepared_cost_total,
                                 double fallback_cost_total);

  friend bool operator==(const PlanRegistry&, const PlanRegistry&) = default;

 private:
  std::map<std::uint32_t, PlanCandidate> plans_;
  std::map<std::uint32_t, std::uint32_t> by_category_;
  double default_prepared_cost_ = 1.0;
  double default_fresh_cost_ = 10.0;
  std::uint64_t fallback_count_ = 0;
  double prepared_cost_total_ = 0.0;
  double fallback_cost_total_ = 0.0;
};

// Usage-share weight times positive-descriptor similarity, in [0, 1].
// Throws std::invalid_argument when c does not belong to p.
ScoredCategory score(const Category& c, const QueryVector& q, const UserProfile& p);

// All categories scored and sorted by score descending, ascending id on ties.
std::vector<ScoredCategory> rank(const UserProfile& p, const QueryVector& q);

// Takes the top-ranked category; returns its plan when the score reaches
// advise_threshold and a plan is registered, the fresh-optimization fallback
// otherwise. advise_threshold must lie in [0, 1].
Recommendation advise(const QueryVector& q, const UserProfile& p, const PlanRegistry& reg,
                      double advise_threshold);

// Value-returning form of PlanRegistry::record.
PlanRegistry record_outcome(const PlanRegistry& reg, const Recommendation& rec,
                            double actual_cost);

}  // namespace aqp
