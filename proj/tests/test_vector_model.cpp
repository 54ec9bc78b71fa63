#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aqp/rng.hpp"
#include "aqp/vector_model.hpp"
#include "oracles.hpp"

using namespace aqp;

TEST_CASE("query vector keeps a canonical form") {
  QueryVector v({{7, 2.0}, {1, 1.0}, {3, 0.0}});
  REQUIRE(v.support_size() == 2);
  CHECK(v.entries()[0].first == 1);
  CHECK(v.entries()[1].first == 7);
  CHECK(v.weight(3) == 0.0);

  CHECK_THROWS_AS(QueryVector({{2, 1.0}, {2, 3.0}}), std::invalid_argument);
  CHECK_THROWS_AS(QueryVector({{0, std::nan("")}}), std::invalid_argument);
  CHECK_THROWS_AS(QueryVector({{0, HUGE_VAL}}), std::invalid_argument);
}

TEST_CASE("set_weight inserts, replaces, and erases") {
  QueryVector v;
  CHECK(v.is_zero());
  v.set_weight(4, 2.5);
  v.set_weight(1, 1.0);
  CHECK(v.support_size() == 2);
  CHECK(v.weight(4) == 2.5);
  v.set_weight(4, -1.0);
  CHECK(v.weight(4) == -1.0);
  v.set_weight(4, 0.0);
  CHECK(v.support_size() == 1);
  CHECK(v.weight(4) == 0.0);
  CHECK(v.weight(9) == 0.0);
}

TEST_CASE("accumulate merges supports and drops exact cancellations") {
  QueryVector a({{0, 1.0}, {2, 3.0}});
  QueryVector b({{1, 2.0}, {2, 3.0}});
  a.accumulate(b, 2.0);
  CHECK(a.weight(0) == 1.0);
  CHECK(a.weight(1) == 4.0);
  CHECK(a.weight(2) == 9.0);

  QueryVector c({{5, 2.0}});
  c.accumulate(QueryVector({{5, 1.0}}), -2.0);
  CHECK(c.is_zero());
}

TEST_CASE("scaled and clamp_nonnegative") {
  const QueryVector v({{0, 2.0}, {3, -4.0}});
  const QueryVector half = v.scaled(0.5);
  CHECK(half.weight(0) == 1.0);
  CHECK(half.weight(3) == -2.0);
  CHECK(v.scaled(0.0).is_zero());

  QueryVector w = v;
  w.clamp_nonnegative();
  CHECK(w.weight(0) == 2.0);
  CHECK(w.support_size() == 1);
}

TEST_CASE("norm and dot agree with dense arithmetic") {
  const QueryVector a({{0, 3.0}, {4, 4.0}});
  CHECK(a.norm() == doctest::Approx(5.0).epsilon(1e-12));
  const QueryVector b({{4, 2.0}, {9, 7.0}});
  CHECK(dot(a, b) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(dot(a, QueryVector({{1, 5.0}})) == 0.0);
}

TEST_CASE("cosine on fixed points") {
  const QueryVector v({{2, 1.0}, {5, 2.0}});
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-9));

  const QueryVector disjoint({{1, 4.0}, {7, 1.0}});
  CHECK(cosine(v, disjoint) == 0.0);

  const QueryVector a({{0, 1.0}, {1, 2.0}});
  const QueryVector b({{0, 2.0}, {1, 1.0}});
  CHECK(cosine(a, b) == doctest::Approx(0.8).epsilon(1e-9));

  CHECK(cosine(QueryVector(), v) == 0.0);
  CHECK(cosine(v, QueryVector()) == 0.0);
}

TEST_CASE("cosine stays within [-1, 1] even for antiparallel vectors") {
  const QueryVector v({{0, 1.0}, {1, 3.0}});
  const QueryVector neg = v.scaled(-1.0);
  const double c = cosine(v, neg);
  CHECK(c >= -1.0);
  CHECK(c == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cosine is symmetric and invariant under positive scaling") {
  Rng rng(101);
  for (int i = 0; i < 300; ++i) {
    const QueryVector a = oracle::random_vector(rng, 30, 8);
    const QueryVector b = oracle::random_vector(rng, 30, 8);
    const double ab = cosine(a, b);
    CHECK(ab == cosine(b, a));
    // Power-of-two scales are exact in floating point.
    CHECK(cosine(a.scaled(1024.0), b.scaled(0.5)) == ab);
    CHECK(std::fabs(cosine(a.scaled(3.7), b) - ab) < 1e-12);
  }
}

TEST_CASE("cosine matches the dense brute-force oracle") {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const QueryVector a = oracle::random_vector(rng, 40, 10, i % 3 == 0);
    const QueryVector b = oracle::random_vector(rng, 40, 10, i % 4 == 0);
    CHECK(std::fabs(cosine(a, b) - oracle::dense_cosine(a, b)) < 1e-12);
  }
}

TEST_CASE("idf weighting on fixed points") {
  CHECK(idf_weight(0, 5, 10, 2) == 0.0);
  CHECK(idf_weight(3, 3, 8, 8) == 0.0);
  CHECK(idf_weight(2, 4, 8, 2) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-9));
}

TEST_CASE("idf weighting rejects out-of-domain arguments") {
  CHECK_THROWS_AS(idf_weight(1, 0, 4, 1), std::domain_error);
  CHECK_THROWS_AS(idf_weight(1, 2, 0, 1), std::domain_error);
  CHECK_THROWS_AS(idf_weight(1, 2, 4, 0), std::domain_error);
  CHECK_THROWS_AS(idf_weight(1, 2, 4, 5), std::domain_error);
  CHECK_THROWS_AS(idf_weight(3, 2, 4, 1), std::domain_error);
}

TEST_CASE("idf weighting is monotone in freq and antitone in n_i") {
  Rng rng(55);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t total = 1 + uniform_index(rng, 50);
    const std::uint64_t n_i = 1 + uniform_index(rng, total);
    const std::uint64_t max_freq = 1 + uniform_index(rng, 9);
    const std::uint64_t freq = uniform_index(rng, max_freq + 1);
    const double w = idf_weight(freq, max_freq, total, n_i);
    CHECK(w >= 0.0);
    CHECK(w <= std::log(static_cast<double>(total)) + 1e-12);
    if (freq < max_freq) {
      CHECK(idf_weight(freq + 1, max_freq, total, n_i) >= w);
    }
    if (n_i < total) {
      CHECK(idf_weight(freq, max_freq, total, n_i + 1) <= w);
    }
  }
}

TEST_CASE("observe counts queries and distinct features") {
  CorpusStats stats;
  const std::vector<FeatureId> f1{1};
  stats = observe(stats, f1);
  CHECK(stats.total_queries() == 1);
  CHECK(stats.feature_count(1) == 1);

  stats = observe(stats, f1);
  CHECK(stats.total_queries() == 2);
  CHECK(stats.feature_count(1) == 2);

  CorpusStats enumerated;
  enumerated = observe(enumerated, std::vector<FeatureId>{1, 2});
  enumerated = observe(enumerated, std::vector<FeatureId>{1});
  enumerated = observe(enumerated, std::vector<FeatureId>{3});
  CHECK(enumerated.total_queries() == 3);
  CHECK(enumerated.feature_count(1) == 2);
  CHECK(enumerated.feature_count(2) == 1);
  CHECK(enumerated.feature_count(3) == 1);
  CHECK(enumerated.feature_count(9) == 0);

  CorpusStats dup;
  dup = observe(dup, std::vector<FeatureId>{4, 4, 4});
  CHECK(dup.total_queries() == 1);
  CHECK(dup.feature_count(4) == 1);
}

TEST_CASE("corpus stats reject counts above the query total") {
  CHECK_THROWS_AS(CorpusStats::from_parts(2, {{0, 3}}), std::invalid_argument);
  const CorpusStats ok = CorpusStats::from_parts(3, {{0, 3}, {5, 1}});
  CHECK(ok.feature_count(0) == 3);
}

TEST_CASE("build_vector weighs raw counts against the corpus") {
  const CorpusStats stats = CorpusStats::from_parts(8, {{1, 2}, {2, 4}, {3, 8}});

  CHECK(build_vector(RawCounts{}, stats).is_zero());

  RawCounts all_docs;
  all_docs.counts[3] = 3;
  CHECK(build_vector(all_docs, CorpusStats::from_parts(4, {{3, 4}})).is_zero());

  RawCounts raw;
  raw.counts[1] = 2;
  raw.counts[2] = 4;
  const QueryVector v = build_vector(raw, stats);
  CHECK(v.weight(1) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-9));
  CHECK(v.weight(2) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  RawCounts unknown;
  unknown.counts[9] = 1;
  CHECK_THROWS_AS(build_vector(unknown, stats), std::out_of_range);
}

TEST_CASE("build_vector weights stay within [0, ln N]") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const RawCounts raw = oracle::random_counts(rng, 25, 8);
    CorpusStats stats;
    const std::uint64_t extra = uniform_index(rng, 30);
    for (std::uint64_t k = 0; k < extra; ++k) {
      stats = observe(stats, std::vector<FeatureId>{static_cast<FeatureId>(uniform_index(rng, 26))});
    }
    std::vector<FeatureId> present;
    for (const auto& [id, c] : raw.counts) present.push_back(id);
    stats = observe(stats, present);

    const QueryVector v = build_vector(raw, stats);
    const double bound = std::log(static_cast<double>(stats.total_queries()));
    for (const auto& [id, w] : v.entries()) {
      CHECK(w >= 0.0);
      CHECK(w <= bound + 1e-12);
    }
  }
}
