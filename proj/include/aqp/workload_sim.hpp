#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "aqp/plan_adviser.hpp"
#include "aqp/profile.hpp"
#include "aqp/vector_model.hpp"

namespace aqp {

// One simulated query arrival. index is the position in the stream; the
// ground-truth group is what the proficiency metric checks advised plans
// against.
struct WorkloadEvent {
  std::uint64_t index = 0;
  std::uint32_t user_id = 0;
  std::uint32_t template_id = 0;
  RawCounts raw;
  std::uint32_t ground_truth_group = 0;

  friend bool operator==(const WorkloadEvent&, const WorkloadEvent&) = default;
};

struct SimConfig {
  std::uint64_t num_users = 160;
  std::uint64_t num_queries = 8400;
  // Query templates are command-group x relation-set combinations;
  // num_templates must be a positive multiple of num_groups.
  std::uint64_t num_templates = 24;
  std::uint32_t num_groups = 4;
  // When set, events from this index on are remapped by drift_permutation
  // (default: rotation by one group).
  std::optional<std::uint64_t> drift_at;
  std::optional<std::vector<std::uint32_t>> drift_permutation;
  double warmup_fraction = 0.25;
  std::uint64_t window_size = 0;  // 0 = num_queries / 20, at least 1
  std::uint64_t seed = 42;
  LearnConfig learn;
  double advise_threshold = 0.3;
  double prepared_cost = 1.0;
  double fresh_cost = 10.0;
};

// Windowed and aggregate measurements of one run. The per-window vectors all
// have length ceil(events / window_size). In baseline mode the adaptive cost
// equals the baseline cost and every proficiency entry is zero.
struct Metrics {
  std::vector<double> proficiency;
  std::vector<double> window_hit_rate;
  std::vector<double> window_cost_adaptive;
  std::vector<double> window_cost_baseline;
  double plan_hit_rate = 0.0;
  double total_cost_adaptive = 0.0;
  double total_cost_baseline = 0.0;
  std::uint64_t categories_created = 0;
  // Events from drift until windowed proficiency first regains 90% of its
  // pre-drift mean; absent without drift or when never regained.
  std::optional<std::uint64_t> adaptation_latency;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// End state of an adaptive run. category_groups maps every created category
// to the ground-truth group of the last event that created or updated it;
// the proficiency metric compares advised categories through it.
struct SimState {
  CorpusStats corpus;
  std::vector<UserProfile> profiles;
  PlanRegistry registry;
  std::map<std::uint32_t, std::uint32_t> category_groups;
};

struct SimOutput {
  Metrics metrics;
  SimState state;
};

// Fraction of hits in one window. Throws std::invalid_argument when empty.
double proficiency(const std::vector<bool>& window_outcomes);

std::uint64_t resolved_window_size(const SimConfig& cfg, std::uint64_t num_events);

// Deterministic synthetic stream: users round-robin, each drawing a
// command group from a personal preference distribution and a relation-set
// template within it. Configured drift is applied via inject_drift.
std::vector<WorkloadEvent> generate(const SimConfig& cfg);

// Remaps ground-truth groups and group-dependent features of all events with
// index >= at through the permutation. The permutation must be a bijection
// on [0, num_groups).
std::vector<WorkloadEvent> inject_drift(std::vector<WorkloadEvent> events, std::uint64_t at,
                                        const std::vector<std::uint32_t>& permutation,
                                        const SimConfig& cfg);

// Replays the stream. Adaptive mode learns a profile per user and advises a
// plan per event; baseline mode freshly optimizes everything. An event counts
// as proficient when the advised plan's category is labeled with the event's
// ground-truth group.
SimOutput run(std::span<const WorkloadEvent> events, const SimConfig& cfg, bool adaptive);

}  // namespace aqp
