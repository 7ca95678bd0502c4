#include "irsce/phase1.hpp"

#include <cmath>

namespace irsce {

CMat ls_estimate_anchor(const CMat& y, const CMat& vtilde, double power_mw) {
  if (!(power_mw > 0.0)) throw std::invalid_argument("pilot power must be positive");
  if (y.cols() != vtilde.rows() || vtilde.rows() != vtilde.cols()) {
    throw std::invalid_argument("observation/pilot matrix dimensions disagree");
  }
  // Y * V~^{-1} as a solve on the transposed system.
  CMat estimate = vtilde.transpose().partialPivLu().solve(y.transpose()).transpose();
  estimate /= std::sqrt(power_mw);
  return estimate;
}

CRowVec ls_estimate_a2(const CRowVec& y2, const CMat& vtilde, double power_mw) {
  return ls_estimate_anchor(y2, vtilde, power_mw);
}

CMat hadamard_recover(const CMat& h_bsa1_hat, const CMat& h_bsa2_hat,
                      const CRowVec& h_a1sa2_hat) {
  if (h_bsa1_hat.rows() != h_bsa2_hat.rows() || h_bsa1_hat.cols() != h_bsa2_hat.cols() ||
      h_a1sa2_hat.size() != h_bsa1_hat.cols()) {
    throw std::invalid_argument("cascade estimate dimensions disagree");
  }
  const double floor = kDivisorFloor * h_a1sa2_hat.cwiseAbs().maxCoeff();
  for (Eigen::Index n = 0; n < h_a1sa2_hat.size(); ++n) {
    if (std::abs(h_a1sa2_hat(n)) <= floor) {
      throw DegenerateChannelError(
          "anchor-anchor cascade is numerically zero at element " + std::to_string(n), n);
    }
  }
  CMat g = h_bsa1_hat.cwiseProduct(h_bsa2_hat);
  g *= h_a1sa2_hat.cwiseInverse().asDiagonal();
  return g;
}

CMat principal_sqrt(const CMat& g_squared) {
  CMat g(g_squared.rows(), g_squared.cols());
  for (Eigen::Index c = 0; c < g_squared.cols(); ++c) {
    for (Eigen::Index r = 0; r < g_squared.rows(); ++r) {
      const Complex value = g_squared(r, c);
      g(r, c) = std::polar(std::sqrt(std::abs(value)), std::arg(value) / 2.0);
    }
  }
  return g;
}

CMat build_W(const CMat& g, const CMat& h_bsa1_hat, bool strict_reference_row) {
  if (g.rows() != h_bsa1_hat.rows() || g.cols() != h_bsa1_hat.cols()) {
    throw std::invalid_argument("square-root and cascade estimate dimensions disagree");
  }
  const Eigen::Index m = g.rows();
  const Eigen::Index n = g.cols();
  const double floor = kDivisorFloor * h_bsa1_hat.cwiseAbs().maxCoeff();
  CMat w(m, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index ref = 0;
    if (!strict_reference_row) {
      h_bsa1_hat.col(col).cwiseAbs().maxCoeff(&ref);
    }
    const Complex ref_entry = h_bsa1_hat(ref, col);
    if (std::abs(ref_entry) <= floor) {
      throw DegenerateChannelError(
          "reference entry of the anchor cascade is numerically zero in column " +
              std::to_string(col),
          col);
    }
    for (Eigen::Index row = 0; row < m; ++row) {
      w(row, col) = (row == ref)
                        ? g(ref, col)
                        : h_bsa1_hat(row, col) / ref_entry * g(ref, col);
    }
  }
  return w;
}

CMat los_recover_Hbs(const CMat& h_bsa_hat, const CVec& h_ra) {
  if (h_bsa_hat.cols() != h_ra.size()) {
    throw std::invalid_argument("cascade estimate and LoS vector dimensions disagree");
  }
  const double floor = kDivisorFloor * h_ra.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < h_ra.size(); ++i) {
    if (std::abs(h_ra(i)) <= floor) {
      throw DegenerateChannelError(
          "LoS surface-anchor channel is numerically zero at element " + std::to_string(i), i);
    }
  }
  return h_bsa_hat * h_ra.cwiseInverse().asDiagonal();
}

namespace {

// BS observations for one anchor's N+1 training slots, one column per slot.
CMat receive_anchor_block(const ChannelRealization& channels, const PilotPlan& plan,
                          double power_mw, const NoiseModel* noise, Rng* rng,
                          CRowVec* a2_trace) {
  CMat y(channels.num_bs_antennas(), plan.slot_count());
  if (a2_trace != nullptr) a2_trace->resize(plan.slot_count());
  for (int i = 0; i < plan.slot_count(); ++i) {
    const PilotSlot& slot = plan.slots[i];
    y.col(i) = synthesize_rx(channels, slot.reflection, slot.tx, power_mw, noise, rng);
    if (a2_trace != nullptr) {
      (*a2_trace)(i) = synthesize_rx_a2(channels, slot.reflection, slot.tx, power_mw, noise, rng);
    }
  }
  return y;
}

}  // namespace

Phase1Estimate run_phase1(const ChannelRealization& channels, const Phase1Plans& plans,
                          double p_offline_mw, const NoiseModel* noise, Rng* rng,
                          bool strict_reference_row) {
  const Eigen::Index n = channels.num_elements();
  if (plans.anchor1.slot_count() != n + 1) {
    throw std::invalid_argument("phase-1 plan has the wrong slot count for this surface");
  }
  const CMat vtilde = dft_reflection_matrix(static_cast<int>(n));

  Phase1Estimate est;
  est.mode = plans.mode;

  if (plans.mode == Phase1Mode::kLos) {
    CMat y = receive_anchor_block(channels, plans.anchor1, p_offline_mw, noise, rng, nullptr);
    CMat combined = ls_estimate_anchor(y, vtilde, p_offline_mw);
    est.h_ba1_hat = combined.col(0);
    est.H_bsa1_hat = combined.rightCols(n);
    // The surface-anchor channel is known a priori from the deployment.
    est.W = los_recover_Hbs(est.H_bsa1_hat, channels.h_ra_los);
    return est;
  }

  CRowVec y2;
  CMat y_a1 = receive_anchor_block(channels, plans.anchor1, p_offline_mw, noise, rng, &y2);
  CMat y_a2 = receive_anchor_block(channels, plans.anchor2, p_offline_mw, noise, rng, nullptr);

  CMat combined1 = ls_estimate_anchor(y_a1, vtilde, p_offline_mw);
  est.h_ba1_hat = combined1.col(0);
  est.H_bsa1_hat = combined1.rightCols(n);

  CMat combined2 = ls_estimate_anchor(y_a2, vtilde, p_offline_mw);
  est.h_ba2_hat = combined2.col(0);
  est.H_bsa2_hat = combined2.rightCols(n);

  CRowVec a1a2 = ls_estimate_a2(y2, vtilde, p_offline_mw);
  est.h_a1a2_hat = a1a2(0);
  est.h_a1sa2_hat = a1a2.tail(n);

  est.G = hadamard_recover(est.H_bsa1_hat, est.H_bsa2_hat, est.h_a1sa2_hat);
  est.g = principal_sqrt(est.G);
  est.W = build_W(est.g, est.H_bsa1_hat, strict_reference_row);
  return est;
}

}  // namespace irsce
