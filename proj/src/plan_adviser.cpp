#include "aqp/plan_adviser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aqp {

PlanRegistry::PlanRegistry(double default_prepared_cost, double default_fresh_cost)
    : default_prepared_cost_(default_prepared_cost), default_fresh_cost_(default_fresh_cost) {
  if (!std::isfinite(default_prepared_cost) || !std::isfinite(default_fresh_cost) ||
      default_prepared_cost < 0.0 || default_prepared_cost > default_fresh_cost) {
    throw std::invalid_argument("plan registry default costs must satisfy 0 <= prepared <= fresh");
  }
}

void PlanRegistry::register_plan(const PlanCandidate& plan) {
  if (!std::isfinite(plan.prepared_cost) || !std::isfinite(plan.fresh_cost) ||
      plan.prepared_cost < 0.0 || plan.prepared_cost > plan.fresh_cost) {
    throw std::invalid_argument("plan " + std::to_string(plan.plan_id) +
                                ": costs must satisfy 0 <= prepared <= fresh");
  }
  if (plans_.contains(plan.plan_id)) {
    throw std::invalid_argument("plan id " + std::to_string(plan.plan_id) + " already registered");
  }
  if (by_category_.contains(plan.category_id)) {
    throw std::invalid_argument("category " + std::to_string(plan.category_id) +
                                " already has a plan");
  }
  plans_.emplace(plan.plan_id, plan);
  by_category_.emplace(plan.category_id, plan.plan_id);
}

const PlanCandidate* PlanRegistry::plan(std::uint32_t plan_id) const {
  const auto it = plans_.find(plan_id);
  return it == plans_.end() ? nullptr : &it->second;
}

const PlanCandidate* PlanRegistry::plan_for_category(std::uint32_t category_id) const {
  const auto it = by_category_.find(category_id);
  return it == by_category_.end() ? nullptr : plan(it->second);
}

void PlanRegistry::record(const Recommendation& rec, double actual_cost) {
  if (rec.fallback) {
    fallback_count_ += 1;
    fallback_cost_total_ += actual_cost;
    return;
  }
  const auto it = plans_.find(*rec.plan_id);
  if (it == plans_.end()) {
    throw std::out_of_range("record: unknown plan id " + std::to_string(*rec.plan_id));
  }
  it->second.hit_count += 1;
  prepared_cost_total_ += actual_cost;
}

PlanRegistry PlanRegistry::from_parts(std::map<std::uint32_t, PlanCandidate> plans,
                                      double default_prepared_cost, double default_fresh_cost,
                                      std::uint64_t fallback_count, double prepared_cost_total,
                                      double fallback_cost_total) {
  PlanRegistry reg(default_prepared_cost, default_fresh_cost);
  for (const auto& [id, plan] : plans) {
    if (id != plan.plan_id) {
      throw std::invalid_argument("plan map key does not match plan id");
    }
    PlanCandidate fresh = plan;
    fresh.hit_count = 0;
    reg.register_plan(fresh);
    reg.plans_.at(id).hit_count = plan.hit_count;
  }
  reg.fallback_count_ = fallback_count;
  reg.prepared_cost_total_ = prepared_cost_total;
  reg.fallback_cost_total_ = fallback_cost_total;
  return reg;
}

ScoredCategory score(const Category& c, const QueryVector& q, const UserProfile& p) {
  return {c.id, category_weight(c, p) * relevance(c, q)};
}

std::vector<ScoredCategory> rank(const UserProfile& p, const QueryVector& q) {
  std::vector<ScoredCategory> scored;
  scored.reserve(p.categories.size());
  for (const Category& c : p.categories) {
    scored.push_back(score(c, q, p));
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCategory& a, const ScoredCategory& b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.category_id < b.category_id;
  });
  return scored;
}

Recommendation advise(const QueryVector& q, const UserProfile& p, const PlanRegistry& reg,
                      double advise_threshold) {
  if (!(advise_threshold >= 0.0 && advise_threshold <= 1.0)) {
    throw std::invalid_argument("advise threshold must lie in [0, 1]");
  }
  const std::vector<ScoredCategory> ranked = rank(p, q);
  if (ranked.empty()) {
    return {std::nullopt, 0.0, true, reg.default_fresh_cost()};
  }
  const ScoredCategory& top = ranked.front();
  if (top.score >= advise_threshold) {
    if (const PlanCandidate* plan = reg.plan_for_category(top.category_id)) {
      return {plan->plan_id, top.score, false, plan->prepared_cost};
    }
  }
  return {std::nullopt, top.score, true, reg.default_fresh_cost()};
}

PlanRegistry record_outcome(const PlanRegistry& reg, const Recommendation& rec,
                            double actual_cost) {
  PlanRegistry next = reg;
  next.record(rec, actual_cost);
  return next;
}

}  // namespace aqp
