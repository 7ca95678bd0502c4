#pragma once

#include "irsce/pilots.hpp"

namespace irsce {

// Everything the off-line phase hands to the on-line phase. In LoS mode the
// anchor-1 fields hold the single anchor's estimates and G/g stay empty; W is
// then the directly recovered BS-surface channel (no sign ambiguity).
struct Phase1Estimate {
  CMat H_bsa1_hat, H_bsa2_hat;  // M x N cascaded anchor channels
  CVec h_ba1_hat, h_ba2_hat;    // length M direct anchor channels
  CRowVec h_a1sa2_hat;          // length N
  Complex h_a1a2_hat{0.0, 0.0};
  CMat G;  // elementwise squares of the BS-surface channel
  CMat g;  // principal square roots of G
  CMat W;  // surrogate for the BS-surface channel (column signs unresolved)
  Phase1Mode mode = Phase1Mode::kTwoAnchor;
};

// LS inversion of Y = sqrt(p) * [h | H] * V~ + Z. Returns the M x (N+1)
// estimate whose first column is the direct channel and whose remaining
// columns are the cascade.
CMat ls_estimate_anchor(const CMat& y, const CMat& vtilde, double power_mw);

// Scalar-receiver analogue for the A2 observations.
CRowVec ls_estimate_a2(const CRowVec& y2, const CMat& vtilde, double power_mw);

// G(m, n) = H_bsa1_hat(m, n) * H_bsa2_hat(m, n) / h_a1sa2_hat(n); equals the
// elementwise square of the BS-surface channel when the inputs are exact.
CMat hadamard_recover(const CMat& h_bsa1_hat, const CMat& h_bsa2_hat,
                      const CRowVec& h_a1sa2_hat);

// Elementwise principal square root: sqrt(|G|) * exp(j*arg(G)/2), arg in
// (-pi, pi].
CMat principal_sqrt(const CMat& g_squared);

// Surrogate for the BS-surface channel via the per-column row ratios of the
// anchor-1 cascade. The default picks, per column, the largest-magnitude
// entry as the reference; strict_reference_row forces row 1.
CMat build_W(const CMat& g, const CMat& h_bsa1_hat, bool strict_reference_row = false);

// LoS shortcut: the surface-anchor channel is known from geometry, so the
// BS-surface channel is recovered column by column without ambiguity.
CMat los_recover_Hbs(const CMat& h_bsa_hat, const CVec& h_ra);

// Runs the whole off-line phase: pilot synthesis, LS estimation, and
// construction of W. A2's feedback of its estimate to the BS is modeled
// error-free.
Phase1Estimate run_phase1(const ChannelRealization& channels, const Phase1Plans& plans,
                          double p_offline_mw, const NoiseModel* noise, Rng* rng,
                          bool strict_reference_row = false);

}  // namespace irsce
