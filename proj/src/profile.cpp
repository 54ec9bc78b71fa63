#include "aqp/profile.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aqp {

const Category* UserProfile::find_category(std::uint32_t category_id) const {
  const auto it = std::lower_bound(
      categories.begin(), categories.end(), category_id,
      [](const Category& c, std::uint32_t id) { return c.id < id; });
  return (it != categories.end() && it->id == category_id) ? &*it : nullptr;
}

Category* UserProfile::find_category(std::uint32_t category_id) {
  return const_cast<Category*>(std::as_const(*this).find_category(category_id));
}

QueryVector rocchio(const QueryVector& q_old, const FeedbackBatch& batch, const LearnConfig& cfg) {
  QueryVector result = q_old.scaled(cfg.gamma);
  if (!batch.relevant.empty()) {
    const double scale = cfg.beta / static_cast<double>(batch.relevant.size());
    for (const QueryVector& d : batch.relevant) {
      result.accumulate(d, scale);
    }
  }
  if (!batch.non_relevant.empty()) {
    const double scale = -cfg.lambda / static_cast<double>(batch.non_relevant.size());
    for (const QueryVector& d : batch.non_relevant) {
      result.accumulate(d, scale);
    }
  }
  if (cfg.clamp_negative) {
    result.clamp_nonnegative();
  }
  return result;
}

double relevance(const Category& c, const QueryVector& q) {
  return cosine(c.desc_pos, q);
}

std::optional<BestMatch> best_category(const UserProfile& p, const QueryVector& q) {
  std::optional<BestMatch> best;
  for (std::size_t i = 0; i < p.categories.size(); ++i) {
    const double rel = relevance(p.categories[i], q);
    // Category order is ascending by id, so strict > keeps the lowest id on ties.
    if (!best || rel > best->relevance) {
      best = BestMatch{p.categories[i].id, i, rel};
    }
  }
  return best;
}

double category_weight(const Category& c, const UserProfile& p) {
  const Category* member = p.find_category(c.id);
  if (member == nullptr || !(*member == c)) {
    throw std::invalid_argument("category_weight: category " + std::to_string(c.id) +
                                " does not belong to profile " + std::to_string(p.user_id));
  }
  std::uint64_t total = 0;
  for (const Category& other : p.categories) {
    total += other.usage_count;
  }
  if (total == 0) {
    return 1.0 / static_cast<double>(p.categories.size());
  }
  return static_cast<double>(c.usage_count) / static_cast<double>(total);
}

LearnResult learn(const UserProfile& p, const QueryVector& q, FeedbackType fb,
                  const LearnConfig& cfg, const LearnOptions& opts) {
  LearnResult out{p, {}, {}};

  std::optional<BestMatch> best;
  if (opts.sample_provided) {
    best = best_category(p, q);
  } else if (opts.forced_category) {
    const Category* forced = p.find_category(*opts.forced_category);
    if (forced == nullptr) {
      throw std::out_of_range("learn: unknown forced category " +
                              std::to_string(*opts.forced_category));
    }
    const std::size_t index = static_cast<std::size_t>(forced - p.categories.data());
    best = BestMatch{forced->id, index, relevance(*forced, q)};
  }

  if (best && best->relevance >= cfg.theta) {
    Category& target = out.profile.categories[best->index];
    LearnConfig step = cfg;
    if (fb == FeedbackType::positive) {
      step.beta = cfg.alpha * cfg.beta;
      target.desc_pos = rocchio(target.desc_pos, FeedbackBatch{{q}, {}}, step);
    } else {
      // Negative feedback pushes the positive descriptor away from the query
      // and pulls the negative descriptor toward it.
      step.lambda = cfg.alpha * cfg.lambda;
      target.desc_pos = rocchio(target.desc_pos, FeedbackBatch{{}, {q}}, step);
      LearnConfig neg_step = cfg;
      neg_step.beta = cfg.alpha * cfg.beta;
      target.desc_neg = rocchio(target.desc_neg, FeedbackBatch{{q}, {}}, neg_step);
    }
    target.usage_count += 1;
    out.updated_id = target.id;
    return out;
  }

  if (q.is_zero()) {
    return out;
  }
  Category created;
  created.id = opts.new_category_id.value_or(
      p.categories.empty() ? 0 : p.categories.back().id + 1);
  if (!p.categories.empty() && created.id <= p.categories.back().id) {
    throw std::invalid_argument("learn: new category id must exceed existing ids");
  }
  created.desc_pos = q;
  created.usage_count = 1;
  created.created_at = opts.event_index;
  out.profile.categories.push_back(std::move(created));
  out.created_id = out.profile.categories.back().id;
  return out;
}

}  // namespace aqp
