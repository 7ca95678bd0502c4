#include "irsce/baseline.hpp"

#include "irsce/phase1.hpp"

namespace irsce {

BenchmarkEstimate run_benchmark(const ChannelRealization& channels, double power_mw,
                                const NoiseModel* noise, Rng* rng) {
  const Eigen::Index n = channels.num_elements();
  const int k = static_cast<int>(channels.num_users());
  const PilotPlan plan = plan_benchmark(static_cast<int>(n), k);
  const CMat vtilde = dft_reflection_matrix(static_cast<int>(n));

  BenchmarkEstimate est;
  est.h_bu_hat.resize(k);
  est.H_bsu_hat.resize(k);
  CMat y(channels.num_bs_antennas(), n + 1);
  for (int u = 0; u < k; ++u) {
    for (Eigen::Index i = 0; i < n + 1; ++i) {
      const PilotSlot& slot = plan.slots[u * (n + 1) + i];
      y.col(i) = synthesize_rx(channels, slot.reflection, slot.tx, power_mw, noise, rng);
    }
    CMat combined = ls_estimate_anchor(y, vtilde, power_mw);
    est.h_bu_hat[u] = combined.col(0);
    est.H_bsu_hat[u] = combined.rightCols(n);
  }
  return est;
}

}  // namespace irsce
