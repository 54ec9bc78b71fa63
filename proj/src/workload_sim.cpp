#include "aqp/workload_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "aqp/rng.hpp"

namespace aqp {
namespace {

// Feature id layout: [0, G) are command-group features, then per relation-set
// two relation features and three attribute features. Relation sets are shared
// across groups, so drift (a group swap) moves only the group feature.
constexpr std::uint32_t kRelationsPerSet = 2;
constexpr std::uint32_t kAttrsPerSet = 3;

// Users settle into routines: the chance of drawing the personal dominant
// group ramps up linearly over the stream.
constexpr double kDominantGroupRateStart = 0.7;
constexpr double kDominantGroupRateEnd = 0.9;
constexpr double kFavoriteSetRate = 0.9;
constexpr double kRelationRepeatRate = 0.3;
constexpr double kAttrIncludeRate = 0.85;

struct Schema {
  std::uint32_t groups;
  std::uint32_t relsets;

  std::uint32_t relation_feature(std::uint32_t r, std::uint32_t j) const {
    return groups + r * kRelationsPerSet + j;
  }
  std::uint32_t attr_feature(std::uint32_t r, std::uint32_t a) const {
    return groups + relsets * kRelationsPerSet + r * kAttrsPerSet + a;
  }
};

Schema make_schema(const SimConfig& cfg) {
  if (cfg.num_groups == 0) throw std::invalid_argument("num_groups must be positive");
  if (cfg.num_templates == 0 || cfg.num_templates % cfg.num_groups != 0) {
    throw std::invalid_argument("num_templates must be a positive multiple of num_groups");
  }
  return Schema{cfg.num_groups, static_cast<std::uint32_t>(cfg.num_templates / cfg.num_groups)};
}

void validate_config(const SimConfig& cfg) {
  make_schema(cfg);
  if (cfg.num_users == 0) throw std::invalid_argument("num_users must be positive");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
    throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
  }
  if (cfg.drift_at && *cfg.drift_at > cfg.num_queries) {
    throw std::invalid_argument("drift_at exceeds stream length");
  }
}

std::vector<std::uint32_t> rotation_permutation(std::uint32_t groups) {
  std::vector<std::uint32_t> perm(groups);
  for (std::uint32_t g = 0; g < groups; ++g) perm[g] = (g + 1) % groups;
  return perm;
}

WorkloadEvent synthesize_event(std::uint64_t index, const SimConfig& cfg, const Schema& schema) {
  WorkloadEvent e;
  e.index = index;
  e.user_id = static_cast<std::uint32_t>(index % cfg.num_users);
  Rng rng = derive_rng(cfg.seed, index);

  const double progress =
      cfg.num_queries > 1 ? static_cast<double>(index) / static_cast<double>(cfg.num_queries - 1)
                          : 1.0;
  const double dominant_rate =
      kDominantGroupRateStart + (kDominantGroupRateEnd - kDominantGroupRateStart) * progress;

  std::uint32_t group;
  if (uniform_double(rng) < dominant_rate) {
    group = e.user_id % schema.groups;
  } else {
    group = static_cast<std::uint32_t>(uniform_index(rng, schema.groups));
  }
  std::uint32_t relset;
  if (uniform_double(rng) < kFavoriteSetRate) {
    relset = (e.user_id + group) % schema.relsets;
  } else {
    relset = static_cast<std::uint32_t>(uniform_index(rng, schema.relsets));
  }

  e.template_id = group * schema.relsets + relset;
  e.ground_truth_group = group;

  e.raw.counts[group] = 1;
  for (std::uint32_t j = 0; j < kRelationsPerSet; ++j) {
    std::uint64_t c = 1 + (uniform_double(rng) < kRelationRepeatRate ? 1 : 0);
    e.raw.counts[schema.relation_feature(relset, j)] = c;
  }
  for (std::uint32_t a = 0; a < kAttrsPerSet; ++a) {
    if (uniform_double(rng) < kAttrIncludeRate) {
      e.raw.counts[schema.attr_feature(relset, a)] = 1 + uniform_index(rng, 3);
    }
  }
  return e;
}

}  // namespace

double proficiency(const std::vector<bool>& window_outcomes) {
  if (window_outcomes.empty()) throw std::invalid_argument("proficiency of an empty window");
  std::uint64_t hits = 0;
  for (bool b : window_outcomes) hits += b ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(window_outcomes.size());
}

std::uint64_t resolved_window_size(const SimConfig& cfg, std::uint64_t num_events) {
  if (cfg.window_size > 0) return cfg.window_size;
  return std::max<std::uint64_t>(1, num_events / 20);
}

std::vector<WorkloadEvent> generate(const SimConfig& cfg) {
  validate_config(cfg);
  const Schema schema = make_schema(cfg);
  std::vector<WorkloadEvent> events;
  events.reserve(cfg.num_queries);
  for (std::uint64_t i = 0; i < cfg.num_queries; ++i) {
    events.push_back(synthesize_event(i, cfg, schema));
  }
  if (cfg.drift_at) {
    const auto perm =
        cfg.drift_permutation ? *cfg.drift_permutation : rotation_permutation(schema.groups);
    events = inject_drift(std::move(events), *cfg.drift_at, perm, cfg);
  }
  return events;
}

std::vector<WorkloadEvent> inject_drift(std::vector<WorkloadEvent> events, std::uint64_t at,
                                        const std::vector<std::uint32_t>& permutation,
                                        const SimConfig& cfg) {
  const Schema schema = make_schema(cfg);
  if (permutation.size() != schema.groups) {
    throw std::invalid_argument("permutation size does not match num_groups");
  }
  std::vector<bool> seen(schema.groups, false);
  for (std::uint32_t target : permutation) {
    if (target >= schema.groups || seen[target]) {
      throw std::invalid_argument("permutation is not a bijection on groups");
    }
    seen[target] = true;
  }
  if (at > events.size()) throw std::invalid_argument("drift point exceeds stream length");

  for (auto& e : events) {
    if (e.index < at) continue;
    if (e.ground_truth_group >= schema.groups ||
        e.template_id >= schema.groups * schema.relsets) {
      throw std::invalid_argument("event does not fit the configured schema");
    }
    const std::uint32_t group = e.template_id / schema.relsets;
    const std::uint32_t relset = e.template_id % schema.relsets;
    e.template_id = permutation[group] * schema.relsets + relset;
    e.ground_truth_group = permutation[e.ground_truth_group];
    std::map<FeatureId, std::uint64_t> remapped;
    for (const auto& [id, count] : e.raw.counts) {
      remapped[id < schema.groups ? permutation[id] : id] = count;
    }
    e.raw.counts = std::move(remapped);
  }
  return events;
}

SimOutput run(std::span<const WorkloadEvent> events, const SimConfig& cfg, bool adaptive) {
  validate_config(cfg);
  SimOutput out;
  out.state.registry = PlanRegistry(cfg.prepared_cost, cfg.fresh_cost);
  out.state.profiles.reserve(cfg.num_users);
  for (std::uint64_t u = 0; u < cfg.num_users; ++u) {
    out.state.profiles.push_back(UserProfile{static_cast<std::uint32_t>(u), {}});
  }

  const std::uint64_t n = events.size();
  const std::uint64_t window = resolved_window_size(cfg, n);
  std::uint32_t next_category = 0;
  std::uint32_t next_plan = 0;
  std::uint64_t total_hits = 0;

  std::vector<bool> window_proficient;
  std::vector<bool> window_hits;
  double window_cost = 0.0;
  window_proficient.reserve(window);

  auto flush_window = [&] {
    out.metrics.proficiency.push_back(adaptive ? proficiency(window_proficient) : 0.0);
    out.metrics.window_hit_rate.push_back(proficiency(window_hits));
    out.metrics.window_cost_adaptive.push_back(window_cost);
    out.metrics.window_cost_baseline.push_back(static_cast<double>(window_hits.size()) *
                                               cfg.fresh_cost);
    window_proficient.clear();
    window_hits.clear();
    window_cost = 0.0;
  };

  for (const auto& e : events) {
    if (e.user_id >= cfg.num_users) throw std::invalid_argument("event user outside num_users");
    bool hit = false;
    bool proficient = false;
    double cost = cfg.fresh_cost;

    if (adaptive) {
      std::vector<FeatureId> features;
      features.reserve(e.raw.counts.size());
      for (const auto& [id, count] : e.raw.counts) {
        if (count > 0) features.push_back(id);
      }
      out.state.corpus = observe(out.state.corpus, features);
      const QueryVector q = build_vector(e.raw, out.state.corpus);

      UserProfile& profile = out.state.profiles[e.user_id];
      const Recommendation rec =
          advise(q, profile, out.state.registry, cfg.advise_threshold);
      hit = !rec.fallback;
      cost = rec.estimated_cost;
      if (hit) {
        const auto* plan = out.state.registry.plan(*rec.plan_id);
        proficient = out.state.category_groups.at(plan->category_id) == e.ground_truth_group;
      }
      out.state.registry.record(rec, cost);

      LearnOptions opts;
      opts.new_category_id = next_category;
      opts.event_index = e.index;
      LearnResult learned = learn(profile, q, FeedbackType::positive, cfg.learn, opts);
      if (learned.created_id) {
        ++next_category;
        out.state.registry.register_plan(
            PlanCandidate{next_plan, *learned.created_id, cfg.prepared_cost, cfg.fresh_cost, 0});
        Category* cat = learned.profile.find_category(*learned.created_id);
        cat->linked_plan = next_plan;
        ++next_plan;
        ++out.metrics.categories_created;
        out.state.category_groups[*learned.created_id] = e.ground_truth_group;
      } else if (learned.updated_id) {
        out.state.category_groups[*learned.updated_id] = e.ground_truth_group;
      }
      profile = std::move(learned.profile);
    }

    total_hits += hit ? 1 : 0;
    out.metrics.total_cost_adaptive += cost;
    out.metrics.total_cost_baseline += cfg.fresh_cost;
    window_proficient.push_back(proficient);
    window_hits.push_back(hit);
    window_cost += cost;
    if (window_proficient.size() == window) flush_window();
  }
  if (!window_proficient.empty()) flush_window();

  out.metrics.plan_hit_rate = n == 0 ? 0.0 : static_cast<double>(total_hits) / static_cast<double>(n);

  if (adaptive && cfg.drift_at && *cfg.drift_at < n) {
    const std::uint64_t drift = *cfg.drift_at;
    double pre_sum = 0.0;
    std::uint64_t pre_count = 0;
    for (std::uint64_t w = 0; w < out.metrics.proficiency.size(); ++w) {
      if ((w + 1) * window <= drift) {
        pre_sum += out.metrics.proficiency[w];
        ++pre_count;
      }
    }
    if (pre_count > 0) {
      const double target = 0.9 * (pre_sum / static_cast<double>(pre_count));
      for (std::uint64_t w = 0; w < out.metrics.proficiency.size(); ++w) {
        if (w * window < drift) continue;
        if (out.metrics.proficiency[w] >= target) {
          const std::uint64_t end = std::min(n, (w + 1) * window);
          out.metrics.adaptation_latency = end - drift;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace aqp
