#pragma once

#include <optional>
#include <vector>

#include "irsce/model.hpp"

namespace irsce {

enum class PhaseTag { kPhaseIA1, kPhaseIA2, kPhaseIIDirect, kPhaseIICascaded, kBenchmark };

enum class Phase1Mode { kTwoAnchor, kLos };

struct PilotSlot {
  std::optional<CVec> reflection;  // nullopt = surface off (absorbing)
  TxSymbols tx;
};

struct PilotPlan {
  PhaseTag tag = PhaseTag::kPhaseIA1;
  std::vector<PilotSlot> slots;

  int slot_count() const { return static_cast<int>(slots.size()); }
};

// User-to-group assignment for the M < N schedule. The first L1-1 groups hold
// exactly M users, the last holds M1 <= M; the tail group trains over N1
// slots instead of N.
struct GroupingPlan {
  std::vector<std::vector<int>> groups;
  int L1 = 0;
  int M1 = 0;
  int N1 = 0;
};

// (N+1) x (N+1) DFT matrix: entry (r, c) = exp(-j 2 pi r c / (N+1)) with
// zero-based indices. First row and column are all ones and
// V~ * V~^H = (N+1) I, so the inverse is V~^H / (N+1).
CMat dft_reflection_matrix(int n_elements);

// rows x cols grid of exp(-j r c theta), zero-based indices. With
// theta = 2 pi / rows this is (the leading columns of) the rows-point DFT.
CMat theta_grid(int rows, int cols, double theta);

GroupingPlan make_grouping(int num_users, int num_bs_antennas, int num_elements);

// Stacked block matrix for a grouped solve: block row i, block column k is
// basis * diag(slot_reflections.row(i)) * pilot_grid(i, k). slot_reflections
// is slots x N, pilot_grid is slots x group_size; the result is
// (M*slots) x (group_size*N). Throws ConditioningError when the result is too
// ill-conditioned to invert; a different theta usually fixes that.
CMat build_B(const CMat& basis, const CMat& slot_reflections, const CMat& pilot_grid);

struct Phase1Plans {
  PilotPlan anchor1;  // tag kPhaseIA1
  PilotPlan anchor2;  // tag kPhaseIA2; empty in LoS mode
  Phase1Mode mode = Phase1Mode::kTwoAnchor;

  int total_slots() const { return anchor1.slot_count() + anchor2.slot_count(); }
};

// N+1 slots per anchor, unit pilot symbols, reflections taken from the DFT
// matrix columns (rows 2..N+1; the first row is the direct path's constant).
Phase1Plans plan_phase1(int n_elements);

// Single-anchor variant for a line-of-sight surface-anchor deployment.
Phase1Plans plan_phase1_los(int n_elements);

struct Phase2Plan {
  PilotPlan direct;     // K slots: one user at a time, surface off
  PilotPlan cascaded;   // K identity-pattern slots (M >= N) or grouped schedules
  GroupingPlan grouping;
  double theta = 0.0;   // grid parameter actually used (0 for the M >= N case)

  int total_slots() const { return direct.slot_count() + cascaded.slot_count(); }
};

// theta = 0 selects the default 2 pi / N.
Phase2Plan plan_phase2(int num_bs_antennas, int n_elements, int num_users,
                       const GroupingPlan& grouping, double theta = 0.0);

// Conventional per-user training: K consecutive blocks of N+1 DFT-patterned
// slots, one user active per block.
PilotPlan plan_benchmark(int n_elements, int num_users);

}  // namespace irsce
