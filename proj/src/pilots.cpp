#include "irsce/pilots.hpp"

#include <cmath>

namespace irsce {

CMat dft_reflection_matrix(int n_elements) {
  if (n_elements < 1) throw std::invalid_argument("need at least one reflecting element");
  const int size = n_elements + 1;
  CMat v(size, size);
  for (int c = 0; c < size; ++c) {
    for (int r = 0; r < size; ++r) {
      // Reduce r*c mod (N+1) before forming the angle to keep it in [0, 2pi).
      long long phase_index = (static_cast<long long>(r) * c) % size;
      v(r, c) = std::polar(1.0, -2.0 * kPi * static_cast<double>(phase_index) /
                                    static_cast<double>(size));
    }
  }
  return v;
}

CMat theta_grid(int rows, int cols, double theta) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("theta_grid needs positive dimensions");
  if (theta == 0.0) throw std::invalid_argument("theta must be nonzero");
  CMat grid(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      grid(r, c) = std::polar(1.0, -static_cast<double>(r) * static_cast<double>(c) * theta);
    }
  }
  return grid;
}

GroupingPlan make_grouping(int num_users, int num_bs_antennas, int num_elements) {
  if (num_users < 1 || num_bs_antennas < 1 || num_elements < 1) {
    throw std::invalid_argument("make_grouping needs positive K, M, N");
  }
  const int k = num_users, m = num_bs_antennas, n = num_elements;
  GroupingPlan plan;
  plan.L1 = (k + m - 1) / m;
  plan.M1 = k - (plan.L1 - 1) * m;
  plan.N1 = (plan.M1 < m)
                ? static_cast<int>((static_cast<long long>(plan.M1) * n + m - 1) / m)
                : n;
  plan.groups.resize(plan.L1);
  int user = 0;
  for (int g = 0; g < plan.L1; ++g) {
    const int size = (g + 1 < plan.L1) ? m : plan.M1;
    plan.groups[g].reserve(size);
    for (int i = 0; i < size; ++i) plan.groups[g].push_back(user++);
  }
  return plan;
}

CMat build_B(const CMat& basis, const CMat& slot_reflections, const CMat& pilot_grid) {
  const Eigen::Index m = basis.rows();
  const Eigen::Index n = basis.cols();
  const Eigen::Index slots = slot_reflections.rows();
  const Eigen::Index group_size = pilot_grid.cols();
  if (slot_reflections.cols() != n) {
    throw std::invalid_argument("slot reflections must have one column per element");
  }
  if (pilot_grid.rows() != slots) {
    throw std::invalid_argument("pilot grid and reflections disagree on slot count");
  }

  CMat b(m * slots, group_size * n);
  for (Eigen::Index i = 0; i < slots; ++i) {
    CMat scaled = basis * slot_reflections.row(i).asDiagonal();
    for (Eigen::Index k = 0; k < group_size; ++k) {
      b.block(i * m, k * n, m, n) = scaled * pilot_grid(i, k);
    }
  }

  double cond = condition_number(b);
  if (!(cond <= kMaxCondition)) {
    throw ConditioningError(
        "grouped pilot matrix condition number " + std::to_string(cond) +
            " exceeds gate; choose a different theta",
        cond);
  }
  return b;
}

namespace {

PilotPlan anchor_training_plan(int n_elements, PhaseTag tag, SenderId sender) {
  const CMat vtilde = dft_reflection_matrix(n_elements);
  PilotPlan plan;
  plan.tag = tag;
  plan.slots.reserve(n_elements + 1);
  for (int i = 0; i < n_elements + 1; ++i) {
    PilotSlot slot;
    slot.reflection = vtilde.col(i).tail(n_elements);  // row 1 is the direct path's 1
    slot.tx = {{sender, Complex(1.0, 0.0)}};
    plan.slots.push_back(std::move(slot));
  }
  return plan;
}

}  // namespace

Phase1Plans plan_phase1(int n_elements) {
  Phase1Plans plans;
  plans.mode = Phase1Mode::kTwoAnchor;
  plans.anchor1 = anchor_training_plan(n_elements, PhaseTag::kPhaseIA1, SenderId::anchor1());
  plans.anchor2 = anchor_training_plan(n_elements, PhaseTag::kPhaseIA2, SenderId::anchor2());
  return plans;
}

Phase1Plans plan_phase1_los(int n_elements) {
  Phase1Plans plans;
  plans.mode = Phase1Mode::kLos;
  plans.anchor1 = anchor_training_plan(n_elements, PhaseTag::kPhaseIA1, SenderId::anchor_los());
  plans.anchor2.tag = PhaseTag::kPhaseIA2;
  return plans;
}

Phase2Plan plan_phase2(int num_bs_antennas, int n_elements, int num_users,
                       const GroupingPlan& grouping, double theta) {
  const int m = num_bs_antennas, n = n_elements, k = num_users;
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("plan_phase2 needs positive M, N, K");
  {
    int total = 0;
    for (const auto& g : grouping.groups) total += static_cast<int>(g.size());
    if (total != k) throw std::invalid_argument("grouping does not cover exactly K users");
  }

  Phase2Plan plan;
  plan.grouping = grouping;

  plan.direct.tag = PhaseTag::kPhaseIIDirect;
  plan.direct.slots.reserve(k);
  for (int u = 0; u < k; ++u) {
    PilotSlot slot;
    slot.reflection = std::nullopt;  // surface off while the direct link trains
    slot.tx = {{SenderId::user(u), Complex(1.0, 0.0)}};
    plan.direct.slots.push_back(std::move(slot));
  }

  plan.cascaded.tag = PhaseTag::kPhaseIICascaded;
  if (m >= n) {
    // One slot per user with the all-ones pattern.
    plan.theta = 0.0;
    plan.cascaded.slots.reserve(k);
    for (int u = 0; u < k; ++u) {
      PilotSlot slot;
      slot.reflection = CVec::Ones(n);
      slot.tx = {{SenderId::user(u), Complex(1.0, 0.0)}};
      plan.cascaded.slots.push_back(std::move(slot));
    }
    return plan;
  }

  plan.theta = (theta == 0.0) ? 2.0 * kPi / n : theta;
  for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
    const auto& members = grouping.groups[g];
    const int group_size = static_cast<int>(members.size());
    const int slots = (group_size == m) ? n : grouping.N1;
    const CMat x = theta_grid(slots, group_size, plan.theta);
    const CMat v = theta_grid(n, slots, plan.theta);
    for (int i = 0; i < slots; ++i) {
      PilotSlot slot;
      slot.reflection = v.col(i);
      slot.tx.reserve(group_size);
      for (int pos = 0; pos < group_size; ++pos) {
        slot.tx.emplace_back(SenderId::user(members[pos]), x(i, pos));
      }
      plan.cascaded.slots.push_back(std::move(slot));
    }
  }
  return plan;
}

PilotPlan plan_benchmark(int n_elements, int num_users) {
  const CMat vtilde = dft_reflection_matrix(n_elements);
  PilotPlan plan;
  plan.tag = PhaseTag::kBenchmark;
  plan.slots.reserve(static_cast<std::size_t>(num_users) * (n_elements + 1));
  for (int u = 0; u < num_users; ++u) {
    for (int i = 0; i < n_elements + 1; ++i) {
      PilotSlot slot;
      slot.reflection = vtilde.col(i).tail(n_elements);
      slot.tx = {{SenderId::user(u), Complex(1.0, 0.0)}};
      plan.slots.push_back(std::move(slot));
    }
  }
  return plan;
}

}  // namespace irsce
