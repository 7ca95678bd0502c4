#pragma once

#include "irsce/phase1.hpp"

namespace irsce {

enum class SchemeTag { kProposedCase1, kProposedCase2, kProposedLos, kBenchmark };

// Per-user outputs of the on-line phase. h_su_hat carries the per-column sign
// ambiguity inherited from W and is kept for diagnostics only; the cascades
// are the unambiguous deliverable.
struct EstimateSet {
  std::vector<CVec> h_bu_hat;   // length M each
  std::vector<CVec> h_su_hat;   // length N each (sign-ambiguous)
  std::vector<CMat> H_bsu_hat;  // M x N each
  SchemeTag scheme_tag = SchemeTag::kProposedCase1;
};

// Direct-channel estimate from a single surface-off slot with unit pilot.
CVec estimate_direct(const CVec& y, double power_mw);

// Subtracts the direct-path contribution of every active user from a
// cascaded-phase observation.
CVec remove_direct(const CVec& y_slot,
                   const std::vector<std::pair<int, Complex>>& active_pilots,
                   const std::vector<CVec>& h_bu_hat, double power_mw);

// M >= N per-user solve through the phase-1 surrogate W.
CVec estimate_case1(const CMat& w, const CVec& ybar, double power_mw);

// M < N grouped solve: returns the stacked per-user surface channels for one
// group (group_size * N entries, order matching the pilot grid columns).
CVec estimate_case2(const CMat& w, const CVec& ybar_stack, const CMat& b, double power_mw);

// W * diag(h_su_hat); invariant under any column-sign flip of W applied
// consistently to both arguments.
CMat recover_cascaded(const CMat& w, const CVec& h_su_hat);

// Runs the whole on-line phase against a phase-1 estimate. genie_direct
// substitutes the true direct channels (debug aid for isolating
// cascaded-estimation error).
EstimateSet run_phase2(const ChannelRealization& channels, const Phase1Estimate& phase1,
                       const Phase2Plan& plan, double p_online_mw, const NoiseModel* noise,
                       Rng* rng, bool genie_direct = false);

}  // namespace irsce
