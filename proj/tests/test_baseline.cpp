#include <doctest.h>

#include "irsce/baseline.hpp"
#include "irsce/harness.hpp"
#include "test_util.hpp"

using namespace irsce;

namespace {

ChannelRealization desk_realization(int m, int rows, int cols, int k, std::uint64_t seed) {
  SystemGeometry g = testutil::desk_geometry(rows, cols, k);
  PathLossModel model;
  Rng rng(seed);
  return draw_realization(g, model, m, rng);
}

}  // namespace

TEST_CASE("run_benchmark: noiseless estimates are exact") {
  ChannelRealization ch = desk_realization(3, 2, 3, 2, 1);
  BenchmarkEstimate est = run_benchmark(ch, 2.0, nullptr, nullptr);
  for (int u = 0; u < 2; ++u) {
    CHECK(testutil::rel_error(est.h_bu_hat[u], ch.h_bu[u]) < 1e-10);
    CHECK(testutil::rel_error(est.H_bsu_hat[u], ch.cascaded_bsu[u]) < 1e-10);
  }
}

TEST_CASE("benchmark slot counts") {
  CHECK(plan_benchmark(60, 1).slot_count() == 61);
  CHECK(plan_benchmark(6, 4).slot_count() == 4 * 7);
  CHECK(plan_benchmark(60, 20).slot_count() ==
        training_overhead(10, 60, 20, SchemeId::kBenchmark));
}

TEST_CASE("run_benchmark: per-entry error variance does not depend on M") {
  // Each antenna row solves its own (N+1)-slot system, so the per-entry error
  // variance sigma^2 / (p (N+1)) is the same whatever M is.
  const double p = 1.0;
  NoiseModel noise{-10.0, 0};  // 0.1 mW
  const double expected = noise.linear_power() / (p * 5.0);  // N = 4
  const int trials = 4000;
  for (int m : {1, 4, 16}) {
    Rng noise_rng(900 + m);
    ChannelRealization ch = desk_realization(m, 2, 2, 1, 7);
    double sum_sq = 0.0;
    long long entries = 0;
    for (int t = 0; t < trials; ++t) {
      BenchmarkEstimate est = run_benchmark(ch, p, &noise, &noise_rng);
      sum_sq += (est.H_bsu_hat[0] - ch.cascaded_bsu[0]).squaredNorm() +
                (est.h_bu_hat[0] - ch.h_bu[0]).squaredNorm();
      entries += m * 5;
    }
    CHECK(sum_sq / entries == doctest::Approx(expected).epsilon(0.06));
  }
}

TEST_CASE("run_benchmark: users train in disjoint slots") {
  // Changing user 1's channels must not move user 0's estimate, noise
  // included, because their training blocks do not overlap.
  ChannelRealization ch = desk_realization(2, 2, 2, 2, 11);
  ChannelRealization modified = ch;
  Rng perturb(3);
  modified.h_bu[1] = testutil::random_vector(2, perturb);
  modified.h_su[1] = testutil::random_vector(4, perturb);
  modified.cascaded_bsu[1] = cascade(modified.H_bs, modified.h_su[1]);

  NoiseModel noise{-50.0, 0};
  Rng rng_a(42), rng_b(42);
  BenchmarkEstimate est_a = run_benchmark(ch, 1.0, &noise, &rng_a);
  BenchmarkEstimate est_b = run_benchmark(modified, 1.0, &noise, &rng_b);
  CHECK(est_a.h_bu_hat[0] == est_b.h_bu_hat[0]);
  CHECK(est_a.H_bsu_hat[0] == est_b.H_bsu_hat[0]);
  CHECK(est_a.H_bsu_hat[1] != est_b.H_bsu_hat[1]);
}
