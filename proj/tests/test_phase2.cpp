#include <doctest.h>

#include "irsce/phase2.hpp"
#include "test_util.hpp"

using namespace irsce;

namespace {

ChannelRealization desk_realization(int m, int rows, int cols, int k, std::uint64_t seed) {
  SystemGeometry g = testutil::desk_geometry(rows, cols, k);
  PathLossModel model;
  Rng rng(seed);
  return draw_realization(g, model, m, rng);
}

EstimateSet run_noiseless(const ChannelRealization& ch, Phase1Mode mode, double p) {
  const int n = static_cast<int>(ch.num_elements());
  const int m = static_cast<int>(ch.num_bs_antennas());
  const int k = static_cast<int>(ch.num_users());
  Phase1Plans plans = (mode == Phase1Mode::kLos) ? plan_phase1_los(n) : plan_phase1(n);
  Phase1Estimate phase1 = run_phase1(ch, plans, p, nullptr, nullptr);
  Phase2Plan plan2 = plan_phase2(m, n, k, make_grouping(k, m, n));
  return run_phase2(ch, phase1, plan2, p, nullptr, nullptr);
}

// Random diagonal of +/-1 entries.
CVec random_signs(Eigen::Index n, Rng& rng) {
  CVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = (rng.uniform() < 0.5) ? Complex(1, 0) : Complex(-1, 0);
  }
  return s;
}

}  // namespace

TEST_CASE("estimate_direct") {
  SUBCASE("noiseless slot returns the channel") {
    Rng rng(1);
    CVec h = testutil::random_vector(4, rng);
    const double p = 4.0;
    CHECK((estimate_direct(std::sqrt(p) * h, p) - h).norm() < 1e-15);
  }
  SUBCASE("p = 4, y = 2h recovers h") {
    CVec h(2);
    h << Complex(1, -1), Complex(0.5, 2);
    CHECK((estimate_direct(2.0 * h, 4.0) - h).norm() == 0.0);
  }
  SUBCASE("nonpositive power is rejected") {
    CHECK_THROWS_AS(estimate_direct(CVec::Ones(2), 0.0), std::invalid_argument);
  }
  SUBCASE("noisy error variance is sigma^2 / p") {
    Rng rng(2);
    const double p = 2.0, sigma2 = 0.09;
    const int trials = 10000, m = 4;
    CVec h = testutil::random_vector(m, rng);
    double sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      CVec y = std::sqrt(p) * h;
      for (int i = 0; i < m; ++i) y(i) += rng.cgaussian(sigma2);
      sum_sq += (estimate_direct(y, p) - h).squaredNorm();
    }
    double per_entry = sum_sq / (trials * m);
    CHECK(per_entry == doctest::Approx(sigma2 / p).epsilon(0.05));
  }
}

TEST_CASE("remove_direct") {
  Rng rng(3);
  const double p = 2.5;
  SUBCASE("no active users leaves the observation untouched") {
    CVec y = testutil::random_vector(3, rng);
    CHECK((remove_direct(y, {}, {}, p) - y).norm() == 0.0);
  }
  SUBCASE("perfect estimates cancel the direct path exactly") {
    ChannelRealization ch = desk_realization(3, 2, 2, 1, 4);
    CVec ones = CVec::Ones(4);
    CVec y = synthesize_rx(ch, ones, {{SenderId::user(0), Complex(1, 0)}}, p, nullptr,
                           nullptr);
    CVec ybar = remove_direct(y, {{0, Complex(1, 0)}}, {ch.h_bu[0]}, p);
    CVec expected = std::sqrt(p) * ch.H_bs * ch.h_su[0];  // Phi = I
    CHECK((ybar - expected).norm() / expected.norm() < 1e-12);
  }
  SUBCASE("imperfect estimates leave the algebraic residual") {
    ChannelRealization ch = desk_realization(3, 2, 2, 1, 5);
    CVec ones = CVec::Ones(4);
    const Complex x(0.8, -0.6);
    CVec y = synthesize_rx(ch, ones, {{SenderId::user(0), x}}, p, nullptr, nullptr);
    CVec h_bu_hat = ch.h_bu[0] + 0.01 * testutil::random_vector(3, rng);
    CVec ybar = remove_direct(y, {{0, x}}, {h_bu_hat}, p);
    CVec expected = std::sqrt(p) * (ch.cascaded_bsu[0] * ones * x +
                                    (ch.h_bu[0] - h_bu_hat) * x);
    CHECK((ybar - expected).norm() / expected.norm() < 1e-12);
  }
  SUBCASE("missing estimate is rejected") {
    CVec y = CVec::Ones(2);
    CHECK_THROWS_AS(remove_direct(y, {{1, Complex(1, 0)}}, {CVec::Ones(2)}, p),
                    std::invalid_argument);
  }
}

TEST_CASE("estimate_case1") {
  SUBCASE("scalar solve") {
    CMat w(1, 1);
    w(0, 0) = Complex(2, 0);
    const double p = 9.0;
    CVec ybar(1);
    ybar(0) = std::sqrt(p) * Complex(6, 0);
    CVec h = estimate_case1(w, ybar, p);
    CHECK(std::abs(h(0) - Complex(3, 0)) < 1e-14);
  }
  SUBCASE("noiseless solve through the phase-1 surrogate is exact") {
    ChannelRealization ch = desk_realization(6, 2, 2, 1, 6);
    const double p = 2.0;
    Phase1Estimate phase1 =
        run_phase1(ch, plan_phase1(4), p, nullptr, nullptr);
    CVec ybar = std::sqrt(p) * ch.H_bs * ch.h_su[0];
    CVec h_su_hat = estimate_case1(phase1.W, ybar, p);
    CMat recovered = recover_cascaded(phase1.W, h_su_hat);
    CHECK(testutil::rel_error(recovered, ch.cascaded_bsu[0]) < 1e-9);
  }
  SUBCASE("column sign flips do not change the cascade") {
    Rng rng(7);
    const int m = 5, n = 3;
    CMat w = testutil::random_matrix(m, n, rng);
    CVec ybar = testutil::random_vector(m, rng);  // includes 'noise'
    const double p = 1.7;
    CMat direct = recover_cascaded(w, estimate_case1(w, ybar, p));
    for (int i = 0; i < 10; ++i) {
      CVec s = random_signs(n, rng);
      CMat w_flipped = w * s.asDiagonal();
      CMat flipped = recover_cascaded(w_flipped, estimate_case1(w_flipped, ybar, p));
      CHECK((flipped - direct).norm() / direct.norm() < 1e-12);
    }
  }
  SUBCASE("rank-deficient surrogate is rejected") {
    CMat w(2, 2);
    w << Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(1, 0);
    CHECK_THROWS_AS(estimate_case1(w, CVec::Ones(2), 1.0), ConditioningError);
  }
  SUBCASE("wide systems are rejected") {
    CHECK_THROWS_AS(estimate_case1(CMat::Ones(2, 3), CVec::Ones(2), 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("estimate_case2") {
  SUBCASE("single-user group with unit pilots matches the stacked direct solve") {
    Rng rng(8);
    const int m = 2, n = 2;
    CMat w = testutil::random_matrix(m, n, rng);
    const double p = 3.0;
    // one user, N1 = ceil(1*2/2) = 1 slot of all-ones reflection
    CMat v = CMat::Ones(1, n);
    CMat x = CMat::Ones(1, 1);
    CMat b = build_B(w, v, x);
    CVec ybar = testutil::random_vector(m, rng);
    CVec via_case2 = estimate_case2(w, ybar, b, p);
    CVec via_case1 = estimate_case1(w, ybar, p);
    CHECK((via_case2 - via_case1).norm() / via_case1.norm() < 1e-12);
  }
  SUBCASE("noiseless full group is exact") {
    ChannelRealization ch = desk_realization(2, 2, 2, 2, 9);  // M=2 < N=4, one group
    EstimateSet est = run_noiseless(ch, Phase1Mode::kTwoAnchor, 2.0);
    CHECK(est.scheme_tag == SchemeTag::kProposedCase2);
    for (int u = 0; u < 2; ++u) {
      CHECK(testutil::rel_error(est.H_bsu_hat[u], ch.cascaded_bsu[u]) < 1e-9);
    }
  }
  SUBCASE("noiseless tail group (M1 < M) is exact") {
    // M=2, N=4, K=3: L1=2, M1=1, N1=2, B is 4x4 for the tail
    GroupingPlan grouping = make_grouping(3, 2, 4);
    CHECK(grouping.M1 == 1);
    CHECK(grouping.N1 == 2);
    ChannelRealization ch = desk_realization(2, 2, 2, 3, 10);
    EstimateSet est = run_noiseless(ch, Phase1Mode::kTwoAnchor, 1.0);
    for (int u = 0; u < 3; ++u) {
      CHECK(testutil::rel_error(est.H_bsu_hat[u], ch.cascaded_bsu[u]) < 1e-9);
    }
  }
}

TEST_CASE("recover_cascaded") {
  Rng rng(11);
  CMat w = testutil::random_matrix(3, 4, rng);
  SUBCASE("all-ones surface channel returns W") {
    CHECK((recover_cascaded(w, CVec::Ones(4)) - w).norm() == 0.0);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(recover_cascaded(w, CVec::Ones(3)), std::invalid_argument);
  }
  SUBCASE("matches the ground-truth cascade on the noiseless pipeline") {
    ChannelRealization ch = desk_realization(5, 2, 2, 2, 12);
    EstimateSet est = run_noiseless(ch, Phase1Mode::kTwoAnchor, 1.0);
    for (int u = 0; u < 2; ++u) {
      CHECK(testutil::rel_error(est.H_bsu_hat[u], ch.cascaded_bsu[u]) < 1e-9);
    }
  }
}

TEST_CASE("run_phase2: noiseless exactness in both cases and modes") {
  // 100 random shapes with M, N <= 16 and K <= 8, covering M >= N, full
  // groups, and tail groups, in both anchor modes.
  Rng shape_rng(99);
  for (int draw = 0; draw < 100; ++draw) {
    int rows = 1 + static_cast<int>(shape_rng.uniform() * 4);   // 1..4
    int cols = 1 + static_cast<int>(shape_rng.uniform() * 4);   // 1..4
    int m = 1 + static_cast<int>(shape_rng.uniform() * 16);     // 1..16
    int k = 1 + static_cast<int>(shape_rng.uniform() * 8);      // 1..8
    Phase1Mode mode = (draw % 2 == 0) ? Phase1Mode::kTwoAnchor : Phase1Mode::kLos;
    ChannelRealization ch = desk_realization(m, rows, cols, k, 500 + draw);
    EstimateSet est = run_noiseless(ch, mode, 1.0);
    for (int u = 0; u < k; ++u) {
      CHECK(testutil::rel_error(est.H_bsu_hat[u], ch.cascaded_bsu[u]) < 1e-9);
      CHECK(testutil::rel_error(est.h_bu_hat[u], ch.h_bu[u]) < 1e-12);
    }
  }
}

TEST_CASE("run_phase2: slot usage equals K + max(K, ceil(KN/M))") {
  auto slots = [](int m, int n, int k) {
    return plan_phase2(m, n, k, make_grouping(k, m, n)).total_slots();
  };
  CHECK(slots(8, 6, 4) == 4 + 4);
  CHECK(slots(10, 60, 20) == 20 + 120);
  CHECK(slots(3, 7, 5) == 5 + 12);  // ceil(35/3) = 12
}

TEST_CASE("run_phase2: genie direct channels remove the direct-error term") {
  ChannelRealization ch = desk_realization(4, 2, 2, 2, 13);
  const int n = 4, m = 4, k = 2;
  Phase1Plans plans = plan_phase1(n);
  NoiseModel noise{-105.0, 0};
  const double p = dbm_to_mw(20.0);

  Rng rng_a(77);
  Phase1Estimate phase1_a = run_phase1(ch, plans, dbm_to_mw(40.0), &noise, &rng_a);
  Phase2Plan plan2 = plan_phase2(m, n, k, make_grouping(k, m, n));
  EstimateSet genie = run_phase2(ch, phase1_a, plan2, p, &noise, &rng_a, true);
  for (int u = 0; u < k; ++u) {
    CHECK((genie.h_bu_hat[u] - ch.h_bu[u]).norm() == 0.0);
  }
}

TEST_CASE("sign invariance holds as a linear map, noisy observations included") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4);
    const int m = n + static_cast<int>(rng.uniform() * 4);
    CMat w = testutil::random_matrix(m, n, rng);
    CVec s = random_signs(n, rng);
    CMat w_flipped = w * s.asDiagonal();
    CVec ybar = testutil::random_vector(m, rng);
    const double p = 2.0;
    CMat a = recover_cascaded(w, estimate_case1(w, ybar, p));
    CMat b = recover_cascaded(w_flipped, estimate_case1(w_flipped, ybar, p));
    CHECK((a - b).norm() / a.norm() < 1e-12);
  }
}

TEST_CASE("LS consistency: estimating a synthesized surface channel is exact") {
  Rng rng(15);
  const int m = 7, n = 4;
  CMat w = testutil::random_matrix(m, n, rng);
  CVec h_su = testutil::random_vector(n, rng);
  const double p = 5.0;
  CVec ybar = std::sqrt(p) * w * h_su;
  CHECK((estimate_case1(w, ybar, p) - h_su).norm() / h_su.norm() < 1e-12);
}

TEST_CASE("case-2 machinery agrees with case 1 when M >= N") {
  // Single group scheduled through the grouped solver must match the
  // per-user path on noiseless data.
  ChannelRealization ch = desk_realization(4, 2, 2, 2, 16);  // M = N = 4
  const double p = 1.0;
  Phase1Estimate phase1 = run_phase1(ch, plan_phase1(4), p, nullptr, nullptr);

  // case-1 route
  EstimateSet case1 = run_noiseless(ch, Phase1Mode::kTwoAnchor, p);

  // grouped route: K=2 users in one tail group, N1 = ceil(2*4/4) = 2 slots
  GroupingPlan grouping = make_grouping(2, 4, 4);
  const double theta = 2.0 * kPi / 4;
  CMat x = theta_grid(grouping.N1, 2, theta);
  CMat v = theta_grid(4, grouping.N1, theta);
  CMat b = build_B(phase1.W, v.transpose(), x);
  CVec stack(4 * grouping.N1);
  for (int i = 0; i < grouping.N1; ++i) {
    CVec y = CVec::Zero(4);
    for (int u = 0; u < 2; ++u) {
      y += std::sqrt(p) * ch.cascaded_bsu[u] * CVec(v.col(i)) * x(i, u);
    }
    stack.segment(4 * i, 4) = y;
  }
  CVec stacked = estimate_case2(phase1.W, stack, b, p);
  for (int u = 0; u < 2; ++u) {
    CMat recovered = recover_cascaded(phase1.W, stacked.segment(4 * u, 4));
    CHECK(testutil::rel_error(recovered, case1.H_bsu_hat[u]) < 1e-10);
  }
}
