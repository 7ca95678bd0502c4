#include "irsce/phase2.hpp"

#include <cmath>

namespace irsce {

CVec estimate_direct(const CVec& y, double power_mw) {
  if (!(power_mw > 0.0)) throw std::invalid_argument("pilot power must be positive");
  return y / std::sqrt(power_mw);
}

CVec remove_direct(const CVec& y_slot,
                   const std::vector<std::pair<int, Complex>>& active_pilots,
                   const std::vector<CVec>& h_bu_hat, double power_mw) {
  CVec ybar = y_slot;
  const double amp = std::sqrt(power_mw);
  for (const auto& [user, symbol] : active_pilots) {
    if (user < 0 || user >= static_cast<int>(h_bu_hat.size())) {
      throw std::invalid_argument("no direct-channel estimate for user " + std::to_string(user));
    }
    ybar -= amp * symbol * h_bu_hat[user];
  }
  return ybar;
}

CVec estimate_case1(const CMat& w, const CVec& ybar, double power_mw) {
  if (!(power_mw > 0.0)) throw std::invalid_argument("pilot power must be positive");
  if (w.rows() < w.cols()) {
    throw std::invalid_argument("per-user solve needs at least as many antennas as elements");
  }
  GatedLeastSquares solver(w);
  return solver.solve(ybar) / std::sqrt(power_mw);
}

CVec estimate_case2(const CMat& w, const CVec& ybar_stack, const CMat& b, double power_mw) {
  if (!(power_mw > 0.0)) throw std::invalid_argument("pilot power must be positive");
  if (b.cols() % w.cols() != 0) {
    throw std::invalid_argument("grouped system width is not a multiple of the element count");
  }
  if (ybar_stack.size() != b.rows()) {
    throw std::invalid_argument("stacked observation length does not match the grouped system");
  }
  GatedLeastSquares solver(b);
  return solver.solve(ybar_stack) / std::sqrt(power_mw);
}

CMat recover_cascaded(const CMat& w, const CVec& h_su_hat) {
  if (w.cols() != h_su_hat.size()) {
    throw std::invalid_argument("surrogate and surface-channel dimensions disagree");
  }
  return w * h_su_hat.asDiagonal();
}

EstimateSet run_phase2(const ChannelRealization& channels, const Phase1Estimate& phase1,
                       const Phase2Plan& plan, double p_online_mw, const NoiseModel* noise,
                       Rng* rng, bool genie_direct) {
  const Eigen::Index m = channels.num_bs_antennas();
  const Eigen::Index n = channels.num_elements();
  const int k = static_cast<int>(channels.num_users());
  if (plan.direct.slot_count() != k) {
    throw std::invalid_argument("phase-2 plan direct slot count does not match user count");
  }
  if (phase1.W.rows() != m || phase1.W.cols() != n) {
    throw std::invalid_argument("phase-1 surrogate has the wrong dimensions");
  }

  EstimateSet est;
  if (phase1.mode == Phase1Mode::kLos) {
    est.scheme_tag = SchemeTag::kProposedLos;
  } else {
    est.scheme_tag = (m >= n) ? SchemeTag::kProposedCase1 : SchemeTag::kProposedCase2;
  }

  // Step 1: direct channels, one surface-off slot per user.
  est.h_bu_hat.resize(k);
  for (int i = 0; i < k; ++i) {
    const PilotSlot& slot = plan.direct.slots[i];
    CVec y = synthesize_rx(channels, slot.reflection, slot.tx, p_online_mw, noise, rng);
    const int user = slot.tx.at(0).first.user_index;
    est.h_bu_hat[user] = genie_direct ? channels.h_bu[user] : estimate_direct(y, p_online_mw);
  }

  // Step 2: cascaded-phase observations with the direct paths removed.
  std::vector<CVec> ybar(plan.cascaded.slot_count());
  for (int i = 0; i < plan.cascaded.slot_count(); ++i) {
    const PilotSlot& slot = plan.cascaded.slots[i];
    CVec y = synthesize_rx(channels, slot.reflection, slot.tx, p_online_mw, noise, rng);
    std::vector<std::pair<int, Complex>> active;
    active.reserve(slot.tx.size());
    for (const auto& [sender, symbol] : slot.tx) {
      active.emplace_back(sender.user_index, symbol);
    }
    ybar[i] = remove_direct(y, active, est.h_bu_hat, p_online_mw);
  }

  est.h_su_hat.resize(k);
  if (m >= n) {
    GatedLeastSquares solver(phase1.W);
    const double amp = std::sqrt(p_online_mw);
    for (int i = 0; i < plan.cascaded.slot_count(); ++i) {
      const int user = plan.cascaded.slots[i].tx.at(0).first.user_index;
      est.h_su_hat[user] = solver.solve(ybar[i]) / amp;
    }
  } else {
    int slot_base = 0;
    for (const auto& members : plan.grouping.groups) {
      const int group_size = static_cast<int>(members.size());
      const int slots = (group_size == m) ? static_cast<int>(n) : plan.grouping.N1;
      CVec stack(static_cast<Eigen::Index>(slots) * m);
      CMat slot_reflections(slots, n);
      CMat pilot_grid(slots, group_size);
      for (int i = 0; i < slots; ++i) {
        const PilotSlot& slot = plan.cascaded.slots[slot_base + i];
        stack.segment(static_cast<Eigen::Index>(i) * m, m) = ybar[slot_base + i];
        slot_reflections.row(i) = slot.reflection->transpose();
        for (int pos = 0; pos < group_size; ++pos) {
          pilot_grid(i, pos) = slot.tx.at(pos).second;
        }
      }
      CMat b = build_B(phase1.W, slot_reflections, pilot_grid);
      CVec stacked = estimate_case2(phase1.W, stack, b, p_online_mw);
      for (int pos = 0; pos < group_size; ++pos) {
        est.h_su_hat[members[pos]] = stacked.segment(static_cast<Eigen::Index>(pos) * n, n);
      }
      slot_base += slots;
    }
  }

  est.H_bsu_hat.resize(k);
  for (int u = 0; u < k; ++u) {
    est.H_bsu_hat[u] = recover_cascaded(phase1.W, est.h_su_hat[u]);
  }
  return est;
}

}  // namespace irsce
