#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace aqp {

// Index into the query feature space (command group, relation, attribute, ...).
// Ids are dense from 0 and stable for the lifetime of a run.
using FeatureId = std::uint32_t;

// Sparse vector over the feature space, kept in canonical form: entries
// sorted by feature id, weights finite, exact zeros never stored. Weights may
// be negative (relevance feedback with clamping disabled produces them).
class QueryVector {
 public:
  using Entry = std::pair<FeatureId, double>;

  QueryVector() = default;
  // Entries may arrive unsorted; duplicate feature ids are rejected.
  explicit QueryVector(std::vector<Entry> entries);

  // Weight of a feature, 0 when absent.
  double weight(FeatureId id) const;
  // Inserts/replaces a component; a zero weight erases it.
  void set_weight(FeatureId id, double w);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  double norm() const;

  // this += scale * other, dropping components that cancel to exact zero.
  QueryVector& accumulate(const QueryVector& other, double scale);
  QueryVector scaled(double scale) const;
  // Sets negative components to zero and drops them.
  QueryVector& clamp_nonnegative();

  friend bool operator==(const QueryVector&, const QueryVector&) = default;

 private:
  std::vector<Entry> entries_;
};

double dot(const QueryVector& a, const QueryVector& b);

// Cosine similarity with Euclidean norms; 0 when either vector is zero (no
// angle exists, 0 is the neutral no-match score). Result clamped to [-1, 1]
// so downstream score bounds hold despite rounding.
double cosine(const QueryVector& a, const QueryVector& b);

// Raw per-query feature frequencies before weighting.
struct RawCounts {
  std::map<FeatureId, std::uint64_t> counts;

  // Maximum frequency over the query's features, 0 when empty.
  std::uint64_t max_freq() const;

  friend bool operator==(const RawCounts&, const RawCounts&) = default;
};

// Running corpus statistics: N queries observed, and for each feature the
// number of distinct queries it appeared in.
class CorpusStats {
 public:
  std::uint64_t total_queries() const { return total_queries_; }
  // n_i for a feature, 0 when never seen.
  std::uint64_t feature_count(FeatureId id) const;
  const std::map<FeatureId, std::uint64_t>& feature_query_counts() const { return feature_query_count_; }

  static CorpusStats from_parts(std::uint64_t total, std::map<FeatureId, std::uint64_t> counts);

  friend CorpusStats observe(const CorpusStats& stats, std::span<const FeatureId> features);
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

 private:
  std::uint64_t total_queries_ = 0;
  std::map<FeatureId, std::uint64_t> feature_query_count_;
};

// Returns a copy of stats with one more query counted; each distinct feature
// in the set has its query count incremented once (duplicates are ignored).
CorpusStats observe(const CorpusStats& stats, std::span<const FeatureId> features);

// Frequency-scaled inverse document weight:
//   (freq / max_freq) * ln(N / n_i)
// Throws std::domain_error when the arguments leave the valid domain
// (max_freq >= 1, N >= 1, 1 <= n_i <= N, freq <= max_freq).
double idf_weight(std::uint64_t freq, std::uint64_t max_freq, std::uint64_t total_queries,
                  std::uint64_t feature_queries);

// Weighs every raw feature against the corpus and drops zero components.
// Throws std::out_of_range for a feature with no corpus statistics.
QueryVector build_vector(const RawCounts& raw, const CorpusStats& stats);

}  // namespace aqp
