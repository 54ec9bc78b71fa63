#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aqp/vector_model.hpp"

namespace aqp {

// One interest cluster of a user profile: what it matches (desc_pos), what it
// rejects (desc_neg), how often it was used, and the execution plan bound to it.
struct Category {
  std::uint32_t id = 0;
  QueryVector desc_pos;
  QueryVector desc_neg;
  std::uint64_t usage_count = 1;
  std::optional<std::uint32_t> linked_plan;
  std::uint64_t created_at = 0;

  friend bool operator==(const Category&, const Category&) = default;
};

// Per-user profile. Categories are ordered by id, strictly increasing in
// creation order.
struct UserProfile {
  std::uint32_t user_id = 0;
  std::vector<Category> categories;

  const Category* find_category(std::uint32_t category_id) const;
  Category* find_category(std::uint32_t category_id);

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// Relevance-judged example collections for a feedback step. The two lists are
// expected to be disjoint.
struct FeedbackBatch {
  std::vector<QueryVector> relevant;
  std::vector<QueryVector> non_relevant;
};

enum class FeedbackType { positive, negative };

struct LearnConfig {
  double theta = 0.5;    // relevance threshold for updating vs. creating
  double gamma = 1.0;    // retention of the old vector
  double beta = 0.75;    // pull toward the relevant centroid
  double lambda = 0.15;  // push away from the non-relevant centroid
  double alpha = 1.0;    // per-update feedback rate
  bool clamp_negative = true;
};

// Relevance-feedback update:
//   gamma * q_old + (beta/|D_r|) * sum(D_r) - (lambda/|D_n|) * sum(D_n)
// A term with an empty collection is omitted. With cfg.clamp_negative the
// negative components of the result are dropped.
QueryVector rocchio(const QueryVector& q_old, const FeedbackBatch& batch, const LearnConfig& cfg);

// Similarity of a query to a category's positive descriptor.
double relevance(const Category& c, const QueryVector& q);

struct BestMatch {
  std::uint32_t category_id = 0;
  std::size_t index = 0;  // position in profile.categories
  double relevance = 0.0;
};

// Highest-relevance category, ties broken by lowest id; empty profile yields
// no match.
std::optional<BestMatch> best_category(const UserProfile& p, const QueryVector& q);

// Usage share of a category within its profile; uniform when all counts are
// zero. Throws std::invalid_argument when c does not belong to p.
double category_weight(const Category& c, const UserProfile& p);

struct LearnOptions {
  // When false the query is not a user-provided sample and forced_category
  // names the target category directly.
  bool sample_provided = true;
  std::optional<std::uint32_t> forced_category;
  // Id for a category created by this call; defaults to last id + 1.
  std::optional<std::uint32_t> new_category_id;
  // Recorded as created_at on a new category.
  std::uint64_t event_index = 0;
};

struct LearnResult {
  UserProfile profile;
  std::optional<std::uint32_t> created_id;
  std::optional<std::uint32_t> updated_id;
};

// One learning step. Resolves the best-matching category (or the forced one),
// updates it through rocchio when its relevance reaches cfg.theta, and
// otherwise creates a new category seeded with the query. A zero query cannot
// seed a category; when the decision lands on creation it is a no-op.
// Throws std::out_of_range for an unknown forced_category.
LearnResult learn(const UserProfile& p, const QueryVector& q, FeedbackType fb,
                  const LearnConfig& cfg, const LearnOptions& opts = {});

}  // namespace aqp
