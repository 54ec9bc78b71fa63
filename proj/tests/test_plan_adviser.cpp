#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "aqp/plan_adviser.hpp"
#include "aqp/rng.hpp"
#include "oracles.hpp"

using namespace aqp;

namespace {

UserProfile profile_with(std::vector<Category> cats) { return UserProfile{0, std::move(cats)}; }

}  // namespace

TEST_CASE("plan registration validates costs and uniqueness") {
  PlanRegistry reg(1.0, 10.0);
  reg.register_plan(PlanCandidate{0, 5, 1.0, 4.0, 0});
  CHECK(reg.plan(0) != nullptr);
  CHECK(reg.plan(1) == nullptr);
  CHECK(reg.plan_for_category(5)->plan_id == 0);
  CHECK(reg.plan_for_category(6) == nullptr);

  CHECK_THROWS_AS(reg.register_plan(PlanCandidate{0, 6, 1.0, 4.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reg.register_plan(PlanCandidate{1, 5, 1.0, 4.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reg.register_plan(PlanCandidate{1, 6, 5.0, 4.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reg.register_plan(PlanCandidate{1, 6, -1.0, 4.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reg.register_plan(PlanCandidate{1, 6, 1.0, HUGE_VAL, 0}), std::invalid_argument);
  CHECK_THROWS_AS(PlanRegistry(4.0, 2.0), std::invalid_argument);
}

TEST_CASE("score multiplies usage share and relevance") {
  const QueryVector q({{0, 2.0}, {1, 1.0}});

  UserProfile single = profile_with({Category{0, q, {}, 7, {}, 0}});
  CHECK(score(single.categories[0], q, single).score == doctest::Approx(1.0).epsilon(1e-9));

  UserProfile zero_rel = profile_with({Category{0, QueryVector({{9, 3.0}}), {}, 7, {}, 0}});
  CHECK(score(zero_rel.categories[0], q, zero_rel).score == 0.0);

  UserProfile weighted = profile_with({Category{0, QueryVector({{0, 1.0}, {1, 2.0}}), {}, 3, {}, 0},
                                       Category{1, QueryVector({{5, 1.0}}), {}, 1, {}, 0}});
  const ScoredCategory s = score(weighted.categories[0], q, weighted);
  CHECK(s.category_id == 0);
  CHECK(s.score == doctest::Approx(0.6).epsilon(1e-9));

  const Category foreign{9, q, {}, 1, {}, 0};
  CHECK_THROWS_AS(score(foreign, q, weighted), std::invalid_argument);
}

TEST_CASE("rank sorts by score, ascending id on ties") {
  const QueryVector q({{0, 1.0}});
  CHECK(rank(UserProfile{0, {}}, q).empty());

  // Equal usage counts; relevances 0.2 / 0.6 / 0.4 by descriptor angle.
  const double a = 0.2, b = 0.6, c = 0.4;
  const auto dir = [](double rel) {
    return QueryVector({{0, rel}, {1, std::sqrt(1.0 - rel * rel)}});
  };
  UserProfile p = profile_with({Category{0, dir(a), {}, 1, {}, 0},
                                Category{1, dir(b), {}, 1, {}, 0},
                                Category{2, dir(c), {}, 1, {}, 0}});
  const auto ranked = rank(p, q);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].category_id == 1);
  CHECK(ranked[1].category_id == 2);
  CHECK(ranked[2].category_id == 0);
  CHECK(ranked[0].score == doctest::Approx(b / 3.0).epsilon(1e-9));

  UserProfile ties = profile_with({Category{4, q, {}, 2, {}, 0}, Category{2, q, {}, 2, {}, 1},
                                   Category{7, q, {}, 2, {}, 2}});
  std::sort(ties.categories.begin(), ties.categories.end(),
            [](const Category& x, const Category& y) { return x.id < y.id; });
  const auto tied = rank(ties, q);
  REQUIRE(tied.size() == 3);
  CHECK(tied[0].category_id == 2);
  CHECK(tied[1].category_id == 4);
  CHECK(tied[2].category_id == 7);
}

TEST_CASE("rank output is a permutation with nonincreasing scores") {
  Rng rng(321);
  for (int i = 0; i < 200; ++i) {
    const UserProfile p = oracle::random_profile(rng, 0, 6, 16);
    const QueryVector q = oracle::random_vector(rng, 16, 5);
    const auto ranked = rank(p, q);
    REQUIRE(ranked.size() == p.categories.size());
    std::vector<std::uint32_t> ids;
    for (const auto& s : ranked) {
      ids.push_back(s.category_id);
      CHECK(s.score >= 0.0);
      CHECK(s.score <= 1.0 + 1e-12);
    }
    for (std::size_t k = 1; k < ranked.size(); ++k) {
      CHECK(ranked[k - 1].score >= ranked[k].score);
      if (ranked[k - 1].score == ranked[k].score) {
        CHECK(ranked[k - 1].category_id < ranked[k].category_id);
      }
    }
    std::sort(ids.begin(), ids.end());
    std::vector<std::uint32_t> expect;
    for (const Category& c : p.categories) expect.push_back(c.id);
    CHECK(ids == expect);
  }
}

TEST_CASE("advise selects the top plan or falls back") {
  PlanRegistry reg(1.0, 10.0);
  reg.register_plan(PlanCandidate{0, 0, 2.0, 8.0, 0});
  const QueryVector q({{0, 1.0}});

  const Recommendation empty = advise(q, UserProfile{0, {}}, reg, 0.3);
  CHECK(empty.fallback);
  CHECK(!empty.plan_id.has_value());
  CHECK(empty.score == 0.0);
  CHECK(empty.estimated_cost == 10.0);

  UserProfile p = profile_with({Category{0, QueryVector({{0, 1.0}, {1, 0.2}}), {}, 1, {}, 0}});
  const Recommendation hit = advise(q, p, reg, 0.3);
  CHECK(!hit.fallback);
  CHECK(hit.plan_id == 0);
  CHECK(hit.estimated_cost == 2.0);
  CHECK(hit.score == doctest::Approx(cosine(p.categories[0].desc_pos, q)).epsilon(1e-12));

  const Recommendation below = advise(q, p, reg, 0.999);
  CHECK(below.fallback);
  CHECK(below.estimated_cost == 10.0);

  UserProfile unregistered = profile_with({Category{3, QueryVector({{0, 1.0}}), {}, 1, {}, 0}});
  const Recommendation no_plan = advise(q, unregistered, reg, 0.3);
  CHECK(no_plan.fallback);
  CHECK(no_plan.score == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(advise(q, p, reg, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(advise(q, p, reg, 1.1), std::invalid_argument);
}

TEST_CASE("advise with threshold zero and full plan coverage never falls back") {
  Rng rng(52);
  for (int i = 0; i < 100; ++i) {
    const UserProfile p = oracle::random_profile(rng, 0, 5, 12);
    PlanRegistry reg(1.0, 10.0);
    std::uint32_t plan_id = 0;
    for (const Category& c : p.categories) {
      reg.register_plan(PlanCandidate{plan_id++, c.id, 1.0, 10.0, 0});
    }
    const QueryVector q = i % 5 == 0 ? QueryVector() : oracle::random_vector(rng, 12, 5);
    CHECK(!advise(q, p, reg, 0.0).fallback);
  }
}

TEST_CASE("record keeps hit and fallback accounting") {
  PlanRegistry reg(1.0, 10.0);
  reg.register_plan(PlanCandidate{3, 0, 2.0, 9.0, 0});

  const Recommendation fb{{}, 0.1, true, 10.0};
  const PlanRegistry after_fb = record_outcome(reg, fb, 10.0);
  CHECK(after_fb.fallback_count() == 1);
  CHECK(after_fb.fallback_cost_total() == 10.0);
  CHECK(after_fb.plan(3)->hit_count == 0);

  const Recommendation hit{3, 0.9, false, 2.0};
  PlanRegistry twice = record_outcome(record_outcome(reg, hit, 2.0), hit, 2.0);
  CHECK(twice.plan(3)->hit_count == 2);
  CHECK(twice.prepared_cost_total() == 4.0);
  CHECK(twice.fallback_count() == 0);

  const Recommendation unknown{8, 0.9, false, 2.0};
  CHECK_THROWS_AS(record_outcome(reg, unknown, 2.0), std::out_of_range);
}

TEST_CASE("advise agrees with the exhaustive oracle") {
  Rng rng(8181);
  for (int i = 0; i < 1000; ++i) {
    const oracle::AdviseFixture fx = oracle::random_advise_fixture(rng);
    const Recommendation got = advise(fx.query, fx.profile, fx.registry, fx.threshold);
    const oracle::AdviseScan want =
        oracle::exhaustive_advise(fx.query, fx.profile, fx.registry, fx.threshold);
    CHECK(got.fallback == want.fallback);
    CHECK(got.plan_id == want.plan_id);
    CHECK(got.estimated_cost == doctest::Approx(want.cost).epsilon(1e-12));
    CHECK(got.score == doctest::Approx(want.score).epsilon(1e-9));
  }
}

TEST_CASE("positive query rescaling changes nothing about the selection") {
  Rng rng(4242);
  for (int i = 0; i < 300; ++i) {
    const oracle::AdviseFixture fx = oracle::random_advise_fixture(rng);
    const auto base_rank = rank(fx.profile, fx.query);
    const Recommendation base = advise(fx.query, fx.profile, fx.registry, fx.threshold);

    for (const double scale : {0.5, 1024.0, 0.0009765625}) {
      const QueryVector scaled = fx.query.scaled(scale);
      CHECK(rank(fx.profile, scaled) == base_rank);
      const Recommendation r = advise(scaled, fx.profile, fx.registry, fx.threshold);
      CHECK(r.fallback == base.fallback);
      CHECK(r.plan_id == base.plan_id);
    }
  }
}
