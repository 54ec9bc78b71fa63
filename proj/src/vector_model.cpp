#include "aqp/vector_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aqp {

namespace {

void require_finite(double w) {
  if (!std::isfinite(w)) {
    throw std::invalid_argument("query vector weight must be finite");
  }
}

}  // namespace

QueryVector::QueryVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
    if (entries_[i].first == entries_[i + 1].first) {
      throw std::invalid_argument("duplicate feature id " + std::to_string(entries_[i].first));
    }
  }
  for (const Entry& e : entries_) {
    require_finite(e.second);
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double QueryVector::weight(FeatureId id) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const Entry& e, FeatureId key) { return e.first < key; });
  return (it != entries_.end() && it->first == id) ? it->second : 0.0;
}

void QueryVector::set_weight(FeatureId id, double w) {
  require_finite(w);
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const Entry& e, FeatureId key) { return e.first < key; });
  if (it != entries_.end() && it->first == id) {
    if (w == 0.0) {
      entries_.erase(it);
    } else {
      it->second = w;
    }
  } else if (w != 0.0) {
    entries_.insert(it, {id, w});
  }
}

double QueryVector::norm() const {
  double sum = 0.0;
  for (const Entry& e : entries_) {
    sum += e.second * e.second;
  }
  return std::sqrt(sum);
}

QueryVector& QueryVector::accumulate(const QueryVector& other, double scale) {
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    double w;
    FeatureId id;
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      id = a->first;
      w = a->second;
      ++a;
    } else if (a == entries_.end() || b->first < a->first) {
      id = b->first;
      w = scale * b->second;
      ++b;
    } else {
      id = a->first;
      w = a->second + scale * b->second;
      ++a;
      ++b;
    }
    require_finite(w);
    if (w != 0.0) {
      merged.push_back({id, w});
    }
  }
  entries_ = std::move(merged);
  return *this;
}

QueryVector QueryVector::scaled(double scale) const {
  QueryVector out;
  out.accumulate(*this, scale);
  return out;
}

QueryVector& QueryVector::clamp_nonnegative() {
  std::erase_if(entries_, [](const Entry& e) { return e.second < 0.0; });
  return *this;
}

double dot(const QueryVector& a, const QueryVector& b) {
  double sum = 0.0;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

double cosine(const QueryVector& a, const QueryVector& b) {
  if (a.is_zero() || b.is_zero()) {
    return 0.0;
  }
  const double ratio = dot(a, b) / (a.norm() * b.norm());
  return std::clamp(ratio, -1.0, 1.0);
}

std::uint64_t RawCounts::max_freq() const {
  std::uint64_t max = 0;
  for (const auto& [id, freq] : counts) {
    max = std::max(max, freq);
  }
  return max;
}

std::uint64_t CorpusStats::feature_count(FeatureId id) const {
  const auto it = feature_query_count_.find(id);
  return it == feature_query_count_.end() ? 0 : it->second;
}

CorpusStats CorpusStats::from_parts(std::uint64_t total, std::map<FeatureId, std::uint64_t> counts) {
  for (const auto& [id, n] : counts) {
    if (n > total) {
      throw std::invalid_argument("feature " + std::to_string(id) +
                                  " appears in more queries than observed");
    }
  }
  CorpusStats stats;
  stats.total_queries_ = total;
  stats.feature_query_count_ = std::move(counts);
  return stats;
}

CorpusStats observe(const CorpusStats& stats, std::span<const FeatureId> features) {
  CorpusStats next = stats;
  next.total_queries_ += 1;
  std::vector<FeatureId> distinct(features.begin(), features.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (FeatureId id : distinct) {
    next.feature_query_count_[id] += 1;
  }
  return next;
}

double idf_weight(std::uint64_t freq, std::uint64_t max_freq, std::uint64_t total_queries,
                  std::uint64_t feature_queries) {
  if (max_freq < 1) {
    throw std::domain_error("idf_weight: max_freq must be >= 1");
  }
  if (total_queries < 1) {
    throw std::domain_error("idf_weight: total query count must be >= 1");
  }
  if (feature_queries < 1 || feature_queries > total_queries) {
    throw std::domain_error("idf_weight: feature query count must be in [1, N]");
  }
  if (freq > max_freq) {
    throw std::domain_error("idf_weight: freq exceeds max_freq");
  }
  if (freq == 0) {
    return 0.0;
  }
  return (static_cast<double>(freq) / static_cast<double>(max_freq)) *
         std::log(static_cast<double>(total_queries) / static_cast<double>(feature_queries));
}

QueryVector build_vector(const RawCounts& raw, const CorpusStats& stats) {
  const std::uint64_t max = raw.max_freq();
  if (max == 0) {
    return {};
  }
  std::vector<QueryVector::Entry> entries;
  entries.reserve(raw.counts.size());
  for (const auto& [id, freq] : raw.counts) {
    const std::uint64_t n_i = stats.feature_count(id);
    if (n_i == 0) {
      throw std::out_of_range("build_vector: feature " + std::to_string(id) +
                              " has no corpus statistics");
    }
    if (freq == 0) {
      continue;
    }
    const double w = idf_weight(freq, max, stats.total_queries(), n_i);
    if (w != 0.0) {
      entries.push_back({id, w});
    }
  }
  return QueryVector(std::move(entries));
}

}  // namespace aqp
