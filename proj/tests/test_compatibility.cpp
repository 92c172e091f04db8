#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "fairprice/joint_pmf.hpp"

using namespace fairprice;

namespace {

// Independent product distribution: Y, Yhat, S mutually independent.
JointPMF product_pmf(double py, double pyhat, double ps) {
  JointPMF j;
  for (int y = 0; y < 2; ++y)
    for (int yh = 0; yh < 2; ++yh)
      for (int s = 0; s < 2; ++s)
        j.p[y][yh][s] = (y ? py : 1 - py) * (yh ? pyhat : 1 - pyhat) *
                        (s ? ps : 1 - ps);
  return j;
}

}  // namespace

TEST_CASE("validate accepts a distribution and rejects defects") {
  JointPMF j = product_pmf(0.3, 0.4, 0.5);
  CHECK_NOTHROW(j.validate());
  j.p[0][0][0] += 0.5;
  CHECK_THROWS_AS(j.validate(), std::invalid_argument);
  j.p[0][0][0] -= 1.0;
  CHECK_THROWS_AS(j.validate(), std::invalid_argument);
}

TEST_CASE("conditional accessors match direct cell arithmetic") {
  JointPMF j;
  // arbitrary valid pmf
  double v[8] = {0.05, 0.10, 0.15, 0.05, 0.20, 0.10, 0.25, 0.10};
  int k = 0;
  for (int y = 0; y < 2; ++y)
    for (int yh = 0; yh < 2; ++yh)
      for (int s = 0; s < 2; ++s) j.p[y][yh][s] = v[k++];
  j.validate();

  const double ps1 = 0.10 + 0.05 + 0.10 + 0.10;
  CHECK(j.p_s(1) == doctest::Approx(ps1));
  CHECK(j.p_s(0) == doctest::Approx(1 - ps1));
  CHECK(j.p_y(1) == doctest::Approx(0.20 + 0.10 + 0.25 + 0.10));
  // P(Yhat=1|S=1) = (p[0][1][1]+p[1][1][1]) / P(S=1)
  CHECK(j.p_yhat1_given_s(1) == doctest::Approx((0.05 + 0.10) / ps1));
  // P(Y=1|S=1)
  CHECK(j.p_y1_given_s(1) == doctest::Approx((0.10 + 0.10) / ps1));
  // TPR in group 0: p[1][1][0] / (p[1][0][0]+p[1][1][0])
  CHECK(j.p_yhat1_given_ys(1, 0) == doctest::Approx(0.25 / (0.20 + 0.25)));
  // PPV in group 0: p[1][1][0] / (p[0][1][0]+p[1][1][0])
  CHECK(j.p_y_given_yhat_s(1, 1, 0) == doctest::Approx(0.25 / (0.15 + 0.25)));
}

TEST_CASE("product distribution satisfies every criterion") {
  const JointPMF j = product_pmf(0.3, 0.45, 0.6);
  const CriteriaFlags f = criteria_satisfied(j, 1e-9);
  CHECK(f.sp == CriterionStatus::Holds);
  CHECK(f.eo == CriterionStatus::Holds);
  CHECK(f.pp == CriterionStatus::Holds);
  CHECK(f.pp_ppv_only == CriterionStatus::Holds);
  CHECK(j.base_rate_gap() == doctest::Approx(0.0));
}

TEST_CASE("perfect predictor with unequal base rates: EO holds, SP fails") {
  JointPMF j{};
  // Yhat = Y; base rates 0.3 (s=0) and 0.6 (s=1), P(S=1)=0.5
  j.p[1][1][0] = 0.5 * 0.3;
  j.p[0][0][0] = 0.5 * 0.7;
  j.p[1][1][1] = 0.5 * 0.6;
  j.p[0][0][1] = 0.5 * 0.4;
  j.validate();
  const CriteriaFlags f = criteria_satisfied(j, 1e-9);
  CHECK(f.eo == CriterionStatus::Holds);
  CHECK(f.sp == CriterionStatus::Fails);
  CHECK(f.pp == CriterionStatus::Holds);  // PPV=NPV=1 in both groups
  CHECK(j.base_rate_gap() == doctest::Approx(0.3));
}

TEST_CASE("criteria are invariant under swapping the group labels") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    JointPMF j;
    double sum = 0;
    for (int y = 0; y < 2; ++y)
      for (int yh = 0; yh < 2; ++yh)
        for (int s = 0; s < 2; ++s) sum += (j.p[y][yh][s] = unif(rng));
    for (auto& row : j.p)
      for (auto& col : row)
        for (auto& c : col) c /= sum;
    JointPMF swapped;
    for (int y = 0; y < 2; ++y)
      for (int yh = 0; yh < 2; ++yh)
        for (int s = 0; s < 2; ++s) swapped.p[y][yh][s] = j.p[y][yh][1 - s];
    const auto a = criteria_satisfied(j, 1e-9);
    const auto b = criteria_satisfied(swapped, 1e-9);
    CHECK(a.sp == b.sp);
    CHECK(a.eo == b.eo);
    CHECK(a.pp == b.pp);
    CHECK(a.pp_ppv_only == b.pp_ppv_only);
    CHECK(j.base_rate_gap() == doctest::Approx(swapped.base_rate_gap()));
  }
}

TEST_CASE("base rate identity recovers the base rate from (tpr, fpr, ppv)") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    // draw per-group (base rate, tpr, fpr) and derive ppv, then invert
    std::array<double, 2> b, tpr, fpr, ppv;
    for (int s = 0; s < 2; ++s) {
      b[s] = unif(rng);
      tpr[s] = unif(rng);
      fpr[s] = unif(rng);
      ppv[s] = b[s] * tpr[s] / (b[s] * tpr[s] + (1 - b[s]) * fpr[s]);
    }
    const auto ids = base_rate_identities(tpr, fpr, ppv);
    for (int s = 0; s < 2; ++s) {
      REQUIRE(ids[s].implied_base_rate.has_value());
      CHECK(*ids[s].implied_base_rate == doctest::Approx(b[s]).epsilon(1e-10));
    }
  }
}

TEST_CASE("base rate identity is indeterminate under perfect prediction") {
  // tpr=1, fpr=0, ppv=1 gives 0/0
  const auto ids = base_rate_identities({1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0});
  CHECK(!ids[0].implied_base_rate.has_value());
  CHECK(!ids[1].implied_base_rate.has_value());
}

TEST_CASE("constructed SP+PPV witness passes the criteria checker") {
  const JointPMF j = construct_sp_pp_witness(0.5, 0.25, 0.4, 0.8);
  j.validate();
  const auto f = criteria_satisfied(j, 1e-9);
  CHECK(f.sp == CriterionStatus::Holds);
  CHECK(f.pp_ppv_only == CriterionStatus::Holds);
  CHECK(j.base_rate_gap() == doctest::Approx(0.25));
  // the construction fixes the TPR ratio at the reciprocal base-rate ratio
  CHECK(j.p_yhat1_given_ys(1, 0) ==
        doctest::Approx(0.8 * 0.25 / 0.5).epsilon(1e-9));
}

TEST_CASE("witness search: SP+EO with gap found, TPR=FPR forced") {
  WitnessSearchOptions opts;
  opts.grid_step = 0.1;
  opts.threads = 2;
  const WitnessResult r =
      impossibility_witness_search(CriterionPair::SP_EO, 0.1, opts);
  REQUIRE(r.witness.has_value());
  const JointPMF& j = *r.witness;
  const auto f = criteria_satisfied(j, opts.tol);
  CHECK(f.sp == CriterionStatus::Holds);
  CHECK(f.eo == CriterionStatus::Holds);
  CHECK(j.base_rate_gap() >= 0.1 - 1e-12);
  // any SP+EO witness with unequal base rates must have TPR == FPR
  CHECK(std::abs(j.p_yhat1_given_ys(1, 0) - j.p_yhat1_given_ys(0, 0)) < 1e-9);
}

TEST_CASE("witness search: SP+EO with separated rates is certified empty") {
  WitnessSearchOptions opts;
  opts.grid_step = 0.1;
  opts.min_tpr_fpr_gap = 0.05;
  opts.threads = 2;
  const WitnessResult r =
      impossibility_witness_search(CriterionPair::SP_EO, 0.1, opts);
  CHECK(!r.witness.has_value());
  CHECK(r.examined > 0);
  CHECK(!r.note.empty());
}

TEST_CASE("witness search: EO+PP has no unequal-base-rate witness") {
  WitnessSearchOptions opts;
  opts.grid_step = 0.1;
  opts.threads = 2;
  const WitnessResult r =
      impossibility_witness_search(CriterionPair::EO_PP, 0.1, opts);
  CHECK(!r.witness.has_value());
  CHECK(r.examined > 0);
}

TEST_CASE("witness search: SP+PP (ppv-only) witness exists and is sound") {
  WitnessSearchOptions opts;
  opts.grid_step = 0.1;
  opts.threads = 2;
  const WitnessResult r =
      impossibility_witness_search(CriterionPair::SP_PP, 0.1, opts);
  REQUIRE(r.witness.has_value());
  const JointPMF& j = *r.witness;
  const auto f = criteria_satisfied(j, opts.tol);
  CHECK(f.sp == CriterionStatus::Holds);
  CHECK(f.pp_ppv_only == CriterionStatus::Holds);
  CHECK(j.base_rate_gap() >= 0.1 - 1e-12);
  // non-degenerate: both labels occur in both groups
  for (int s = 0; s < 2; ++s) {
    CHECK(j.p_y1_given_s(s) > 0.0);
    CHECK(j.p_y1_given_s(s) < 1.0);
  }
}

TEST_CASE("witness search merges deterministically across thread counts") {
  WitnessSearchOptions one, four;
  one.grid_step = four.grid_step = 0.1;
  one.threads = 1;
  four.threads = 4;
  const auto a = impossibility_witness_search(CriterionPair::SP_PP, 0.1, one);
  const auto b = impossibility_witness_search(CriterionPair::SP_PP, 0.1, four);
  REQUIRE(a.witness.has_value());
  REQUIRE(b.witness.has_value());
  CHECK(a.examined == b.examined);
  for (int y = 0; y < 2; ++y)
    for (int yh = 0; yh < 2; ++yh)
      for (int s = 0; s < 2; ++s)
        CHECK(a.witness->p[y][yh][s] == b.witness->p[y][yh][s]);
}
