#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "irsce/linalg.hpp"

namespace irsce {

// Distance-power-law path loss anchored at a reference distance. The
// reference gain is stored in dB as a (negative) gain, e.g. -30 dB <-> 1e-3.
struct PathLossModel {
  double reference_gain_db = -30.0;
  double reference_distance = 1.0;  // meters
  double exponent_nlos = 3.0;
  double exponent_los = 2.0;
  double carrier_wavelength = 0.4;  // meters

  double reference_gain_linear() const { return db_to_linear(reference_gain_db); }
};

// Node placement for one deployment. The reflecting surface is a uniform
// planar array of irs_rows x irs_cols elements centered at irs_center.
struct SystemGeometry {
  Vec3 bs_position{50.0, 0.0, 20.0};
  Vec3 irs_center{0.0, 100.0, 2.0};
  int irs_rows = 6;
  int irs_cols = 10;
  double element_spacing = 0.15;  // meters
  Vec3 anchor1_position{2.0, 99.0, 0.0};
  Vec3 anchor2_position{2.0, 101.0, 0.0};
  Vec3 anchor_los_position{2.0, 100.0, 0.0};
  std::vector<Vec3> user_positions;

  int num_elements() const { return irs_rows * irs_cols; }

  // Element positions on a centered grid in the plane through irs_center
  // perpendicular to the horizontal projection of the surface->BS direction.
  // Columns run along the horizontal in-plane axis, rows along the vertical.
  std::vector<Vec3> irs_element_positions() const;

  void validate() const;
};

struct NoiseModel {
  double noise_power_dbm = -105.0;
  std::uint64_t rng_seed = 0;

  double linear_power() const { return dbm_to_mw(noise_power_dbm); }
};

// One draw of every true channel in the system plus the derived cascades.
// Serves as ground truth when scoring estimators.
struct ChannelRealization {
  CMat H_bs;               // M x N, BS <-> surface
  std::vector<CVec> h_bu;  // per user, length M, BS <-> user direct
  std::vector<CVec> h_su;  // per user, length N, surface <-> user
  CVec h_ba1, h_ba2;       // length M, BS <-> anchors
  CVec h_sa1, h_sa2;       // length N, surface <-> anchors
  Complex h_a1a2{0.0, 0.0};
  CVec h_ba_los;  // length M, BS <-> LoS-deployed anchor (fading)
  CVec h_ra_los;  // length N, surface <-> LoS-deployed anchor (deterministic)

  std::vector<CMat> cascaded_bsu;  // per user, M x N
  CMat cascaded_bsa1, cascaded_bsa2, cascaded_bsa_los;
  CRowVec cascaded_a1sa2;  // length N

  Eigen::Index num_bs_antennas() const { return H_bs.rows(); }
  Eigen::Index num_elements() const { return H_bs.cols(); }
  Eigen::Index num_users() const { return static_cast<Eigen::Index>(h_bu.size()); }
};

// Identifies who is transmitting in a pilot slot.
struct SenderId {
  enum class Kind { kUser, kAnchor1, kAnchor2, kAnchorLos };
  Kind kind = Kind::kUser;
  int user_index = -1;

  static SenderId user(int k) { return {Kind::kUser, k}; }
  static SenderId anchor1() { return {Kind::kAnchor1, -1}; }
  static SenderId anchor2() { return {Kind::kAnchor2, -1}; }
  static SenderId anchor_los() { return {Kind::kAnchorLos, -1}; }
};

using TxSymbols = std::vector<std::pair<SenderId, Complex>>;

// Linear power gain at the given distance; throws std::domain_error below the
// reference distance where the model is invalid.
double path_loss_gain(double distance, double exponent, const PathLossModel& model);

// rows x cols matrix of i.i.d. CN(0, gain) entries.
CMat draw_rayleigh_channel(Eigen::Index rows, Eigen::Index cols, double gain, Rng& rng);

// Deterministic spherical-wavefront line-of-sight channel from every surface
// element to the given anchor: sqrt(L0) / d_n * exp(-j 2 pi d_n / lambda).
CVec los_channel(const SystemGeometry& geometry, const Vec3& anchor_position,
                 const PathLossModel& model);

// H * diag(h): column n of H scaled by h[n].
CMat cascade(const CMat& H, const CVec& h);

// Received vector at the BS for one pilot slot. reflection == nullopt means
// the surface absorbs (no reflected path). noise == nullptr disables noise.
CVec synthesize_rx(const ChannelRealization& channels,
                   const std::optional<CVec>& reflection, const TxSymbols& tx,
                   double power_mw, const NoiseModel* noise, Rng* rng);

// Scalar received sample at anchor A2 (only A1 has a defined channel to A2).
Complex synthesize_rx_a2(const ChannelRealization& channels,
                         const std::optional<CVec>& reflection, const TxSymbols& tx,
                         double power_mw, const NoiseModel* noise, Rng* rng);

// Draws all fading channels for one coherence block and fills in the
// cascades. num_bs_antennas sets M (the BS array is colocated at
// bs_position). Deterministic given the rng state; the LoS anchor channel is
// computed from geometry alone.
ChannelRealization draw_realization(const SystemGeometry& geometry,
                                    const PathLossModel& model,
                                    int num_bs_antennas, Rng& rng);

}  // namespace irsce
