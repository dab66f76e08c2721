#include <doctest.h>

#include <cmath>
#include <numbers>

#include "speclab/corpus.hpp"
#include "speclab/errors.hpp"
#include "speclab/harness.hpp"
#include "speclab/reference.hpp"

using namespace speclab;
constexpr double pi = std::numbers::pi;

TEST_CASE("estimate arithmetic propagates to first order") {
  const Estimate a{2.0, 0.1}, b{3.0, 0.2};
  CHECK((a + b).value == 5.0);
  CHECK((a + b).error == doctest::Approx(0.3));
  CHECK((a - b).error == doctest::Approx(0.3));
  CHECK((a * b).value == 6.0);
  CHECK((a * b).error == doctest::Approx(0.1 * 3 + 0.2 * 2));
  CHECK((a / b).error == doctest::Approx(0.1 / 3 + 2 * 0.2 / 9));
  CHECK((2.0 * a).error == doctest::Approx(0.2));
  const auto p = pow(Estimate{4.0, 0.0}, 0.5);
  CHECK(p.value == 2.0);
  CHECK(p.error == 0.0);
  // the power bound covers the interval image
  const auto q = pow(b, 0.5);
  CHECK(q.error >= std::sqrt(3.2) - std::sqrt(3.0) - 1e-15);
  CHECK(positive_part(Estimate{-1.0, 0.1}).value == 0.0);
  CHECK(abs(Estimate{-1.0, 0.1}).value == 1.0);
  CHECK(max(a, b).value == 3.0);
  CHECK(min(a, b).value == 2.0);
  const auto r = Estimate::richardson(10.0, 9.0);
  CHECK(r.value == 8.0);
  CHECK(r.error == 1.0);
}

TEST_CASE("known-constant verdicts") {
  SUBCASE("holds") {
    const auto r = known_record("FK", "x", 1, 0.1, {5.0, 0.01}, {6.0, 0.01}, 1.0);
    CHECK(r.verdict == Verdict::holds);
    CHECK(r.ratio == doctest::Approx(5.0 / 6.0));
    CHECK(r.error_budget == doctest::Approx(0.01));
  }
  SUBCASE("within budget") {
    const auto r = known_record("FK", "x", 1, 0.1, {6.05, 0.1}, {6.0, 0.1}, 1.0);
    CHECK(r.verdict == Verdict::holds_within_budget);
    CHECK(r.error_budget == doctest::Approx(0.2 / 6.05));
  }
  SUBCASE("violated") {
    const auto r = known_record("FK", "x", 1, 0.1, {7.0, 0.01}, {6.0, 0.01}, 1.0);
    CHECK(r.verdict == Verdict::violated);
    CHECK(is_known_constant_id(r.id));
  }
  SUBCASE("constant scales the right-hand side") {
    const auto r = known_record("torvol", "x", 0, 0.1, {0.6, 0.0}, {1.0, 0.0}, 0.625);
    CHECK(r.verdict == Verdict::holds);
    CHECK(*r.known_constant == 0.625);
  }
  SUBCASE("no ratio on a vanishing right-hand side") {
    const auto r = known_record("LemmaB-lower", "x", 1, 0.1, {-0.1, 0.0}, {0.0, 0.0}, 1.0);
    CHECK(std::isnan(r.ratio));
    CHECK(r.verdict == Verdict::holds);
  }
}

TEST_CASE("ratio records never carry a verdict") {
  const auto r = ratio_record("TH1", "x", 2, 0.1, {1.0, 0.0001}, {2.0, 0.0002});
  CHECK(r.verdict == Verdict::constant_unknown);
  CHECK(r.ratio == 0.5);
  CHECK(r.error_budget == doctest::Approx(0.01));
  CHECK_FALSE(is_known_constant_id("TH1"));
  CHECK(verdict_name(Verdict::holds_within_budget) == "holds-within-budget");
}

TEST_CASE("analytic references") {
  const auto ref = analytic_references(2, 6);
  CHECK(ref.theta_eig(1).value == doctest::Approx(2 * ref.ball_eig(1).value));
  CHECK(ref.torsion_ball.value == doctest::Approx(pi / 8));
  CHECK(ref.torsion_theta.value == doctest::Approx(pi / 16));
  CHECK(ref.sup_w_ball.value == doctest::Approx(0.25));
}

TEST_CASE("grid references agree with the analytic ones") {
  const auto g = grid_references(2, 3, 1.0 / 32);
  const auto a = analytic_references(2, 3);
  CHECK(g.source == ThetaSource::grid);
  for (int k = 1; k <= 3; ++k) {
    CHECK(g.ball_eig(k).value == doctest::Approx(a.ball_eig(k).value).epsilon(0.01));
    CHECK(g.theta_eig(k).value == doctest::Approx(a.theta_eig(k).value).epsilon(0.01));
  }
}

TEST_CASE("theorem checks refuse a lambda_2 below the two-ball value") {
  const auto ref = analytic_references(2, 3);
  SetQuantities q;
  q.lambda = {{5.0, 0.01}, {9.0, 0.01}, {14.0, 0.01}};
  CHECK_THROWS_AS(check_theorem1("low", 0.1, q, ref, 1), DiscretizationBiasError);
  CHECK_THROWS_AS(check_theorem2bis("low", 0.1, q, ref, 1), DiscretizationBiasError);
  // a lambda_2 inside the budget gives a record with no ratio
  q.lambda[1] = ref.theta_eig(2);
  const auto r = check_theorem1("at", 0.1, q, ref, 3);
  CHECK(std::isnan(r.ratio));
}

TEST_CASE("evaluating the disk") {
  HarnessOptions o;
  o.h = 1.0 / 16;
  o.k_max = 3;
  const DomainSpec disk{"disk", Shape::ball(2, {0, 0, 0}, 1.0)};
  const auto ev = evaluate(disk, o);
  const auto ref = analytic_references(2, 3);
  CHECK(ev.omega.eig(1).value == doctest::Approx(ref.ball_eig(1).value).epsilon(0.01));
  CHECK(ev.f1.value < 0.05);
  REQUIRE(ev.decomposition.has_value());
  CHECK(ev.decomposition->source == "nodal");
  std::vector<DomainFailure> failures;
  const auto recs = check_all(ev, ref, o, &failures);
  CHECK(failures.empty());
  bool has_fk = false;
  for (const auto& r : recs) {
    CHECK(r.verdict != Verdict::violated);
    has_fk |= r.id == "FK";
  }
  CHECK(has_fk);
  for (std::size_t i = 1; i < recs.size(); ++i)
    CHECK(std::make_pair(recs[i - 1].id, recs[i - 1].k) <= std::make_pair(recs[i].id, recs[i].k));
}

TEST_CASE("sweep output does not depend on the worker count") {
  HarnessOptions o;
  o.h = 1.0 / 16;
  o.k_max = 3;
  const std::vector<DomainSpec> corpus{{"disk", Shape::ball(2, {0, 0, 0}, 1.0)},
                                       {"theta", theta_shape(2, 0.3)},
                                       {"square", Shape::box(2, {-pi / 4, -pi / 4, 0}, {pi / 4, pi / 4, 0})
                                                      .normalized_to(pi)}};
  const auto a = sweep(corpus, o, 1), b = sweep(corpus, o, 3);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].domain == b.records[i].domain);
    const double x = a.records[i].ratio, y = b.records[i].ratio;
    CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
  }
  CHECK(a.violations() == 0);
  const auto* fk = a.aggregate("FK");
  REQUIRE(fk != nullptr);
  CHECK(fk->rows == 3);
  const auto stab = compare_stability(a, b, {"FK"});
  CHECK(stab[0].change == 0.0);
}

TEST_CASE("aggregation counts") {
  std::vector<InequalityRecord> rs;
  rs.push_back(ratio_record("X", "a", 1, 0.1, {1.0, 0}, {2.0, 0}));
  rs.push_back(ratio_record("X", "b", 1, 0.1, {3.0, 0}, {2.0, 0}));
  rs.push_back(ratio_record("X", "c", 1, 0.1, {1.0, 0}, {0.0, 0}));
  const auto ag = aggregate(rs);
  REQUIRE(ag.size() == 1);
  CHECK(ag[0].rows == 3);
  CHECK(ag[0].max_ratio == 1.5);
  CHECK(ag[0].argmax_domain == "b");
  CHECK(ag[0].infinite == 1);
}
