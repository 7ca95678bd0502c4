#include "irsce/model.hpp"

#include <cmath>

namespace irsce {

std::vector<Vec3> SystemGeometry::irs_element_positions() const {
  // Horizontal projection of the surface->BS direction fixes the facing.
  Vec3 to_bs = bs_position - irs_center;
  Vec3 normal(to_bs.x(), to_bs.y(), 0.0);
  double norm = normal.norm();
  if (norm <= 0.0) {
    throw std::invalid_argument("BS sits directly above the surface center; facing undefined");
  }
  normal /= norm;

  const Vec3 vertical(0.0, 0.0, 1.0);
  const Vec3 horizontal = vertical.cross(normal).normalized();

  std::vector<Vec3> positions;
  positions.reserve(static_cast<std::size_t>(irs_rows) * irs_cols);
  const double row_offset = 0.5 * (irs_rows - 1);
  const double col_offset = 0.5 * (irs_cols - 1);
  for (int r = 0; r < irs_rows; ++r) {
    for (int c = 0; c < irs_cols; ++c) {
      positions.push_back(irs_center +
                          element_spacing * (c - col_offset) * horizontal +
                          element_spacing * (r - row_offset) * vertical);
    }
  }
  return positions;
}

void SystemGeometry::validate() const {
  if (irs_rows < 1 || irs_cols < 1) {
    throw ConfigError("surface grid must have at least one row and column");
  }
  if (!(element_spacing > 0.0)) {
    throw ConfigError("element_spacing must be positive");
  }
  auto finite = [](const Vec3& v) { return v.allFinite(); };
  if (!finite(bs_position) || !finite(irs_center) || !finite(anchor1_position) ||
      !finite(anchor2_position) || !finite(anchor_los_position)) {
    throw ConfigError("geometry positions must be finite");
  }
  for (const Vec3& u : user_positions) {
    if (!finite(u)) throw ConfigError("user positions must be finite");
  }
}

double path_loss_gain(double distance, double exponent, const PathLossModel& model) {
  if (distance < model.reference_distance) {
    throw std::domain_error("path loss model invalid below the reference distance");
  }
  return model.reference_gain_linear() *
         std::pow(distance / model.reference_distance, -exponent);
}

CMat draw_rayleigh_channel(Eigen::Index rows, Eigen::Index cols, double gain, Rng& rng) {
  if (gain < 0.0) throw std::invalid_argument("channel gain must be nonnegative");
  CMat h(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      h(r, c) = rng.cgaussian(gain);
    }
  }
  return h;
}

CVec los_channel(const SystemGeometry& geometry, const Vec3& anchor_position,
                 const PathLossModel& model) {
  const auto elements = geometry.irs_element_positions();
  const double l0 = model.reference_gain_linear();
  CVec h(static_cast<Eigen::Index>(elements.size()));
  for (std::size_t n = 0; n < elements.size(); ++n) {
    double d = (anchor_position - elements[n]).norm();
    if (d <= 0.0) {
      throw std::invalid_argument("anchor coincides with a surface element");
    }
    double amplitude = std::sqrt(l0 * std::pow(d, -model.exponent_los));
    h(static_cast<Eigen::Index>(n)) =
        std::polar(amplitude, -2.0 * kPi * d / model.carrier_wavelength);
  }
  return h;
}

CMat cascade(const CMat& H, const CVec& h) {
  if (H.cols() != h.size()) {
    throw std::invalid_argument("cascade: matrix has " + std::to_string(H.cols()) +
                                " columns but vector has " + std::to_string(h.size()) +
                                " entries");
  }
  return H * h.asDiagonal();
}

namespace {

// Direct and surface-side channels seen at the BS for a given sender.
std::pair<const CVec*, const CVec*> bs_channels_for(const ChannelRealization& ch,
                                                    const SenderId& sender) {
  switch (sender.kind) {
    case SenderId::Kind::kUser: {
      if (sender.user_index < 0 ||
          sender.user_index >= static_cast<int>(ch.h_bu.size())) {
        throw std::invalid_argument("unknown sender: user index " +
                                    std::to_string(sender.user_index));
      }
      return {&ch.h_bu[sender.user_index], &ch.h_su[sender.user_index]};
    }
    case SenderId::Kind::kAnchor1:
      return {&ch.h_ba1, &ch.h_sa1};
    case SenderId::Kind::kAnchor2:
      return {&ch.h_ba2, &ch.h_sa2};
    case SenderId::Kind::kAnchorLos:
      return {&ch.h_ba_los, &ch.h_ra_los};
  }
  throw std::invalid_argument("unknown sender kind");
}

}  // namespace

CVec synthesize_rx(const ChannelRealization& channels,
                   const std::optional<CVec>& reflection, const TxSymbols& tx,
                   double power_mw, const NoiseModel* noise, Rng* rng) {
  const Eigen::Index m = channels.num_bs_antennas();
  if (reflection && reflection->size() != channels.num_elements()) {
    throw std::invalid_argument("reflection vector length does not match surface size");
  }
  CVec y = CVec::Zero(m);
  const double amp = std::sqrt(power_mw);
  for (const auto& [sender, symbol] : tx) {
    auto [direct, surface_side] = bs_channels_for(channels, sender);
    CVec path = *direct;
    if (reflection) {
      path += channels.H_bs * reflection->cwiseProduct(*surface_side);
    }
    y += amp * symbol * path;
  }
  if (noise != nullptr) {
    if (rng == nullptr) throw std::invalid_argument("noise enabled but no rng supplied");
    const double sigma2 = noise->linear_power();
    for (Eigen::Index i = 0; i < m; ++i) {
      y(i) += rng->cgaussian(sigma2);
    }
  }
  return y;
}

Complex synthesize_rx_a2(const ChannelRealization& channels,
                         const std::optional<CVec>& reflection, const TxSymbols& tx,
                         double power_mw, const NoiseModel* noise, Rng* rng) {
  if (reflection && reflection->size() != channels.num_elements()) {
    throw std::invalid_argument("reflection vector length does not match surface size");
  }
  Complex y(0.0, 0.0);
  const double amp = std::sqrt(power_mw);
  for (const auto& [sender, symbol] : tx) {
    if (sender.kind != SenderId::Kind::kAnchor1) {
      throw std::invalid_argument("A2 receiver only defines a channel from A1");
    }
    Complex path = channels.h_a1a2;
    if (reflection) {
      path += (channels.cascaded_a1sa2 * (*reflection)).value();
    }
    y += amp * symbol * path;
  }
  if (noise != nullptr) {
    if (rng == nullptr) throw std::invalid_argument("noise enabled but no rng supplied");
    y += rng->cgaussian(noise->linear_power());
  }
  return y;
}

ChannelRealization draw_realization(const SystemGeometry& geometry,
                                    const PathLossModel& model,
                                    int num_bs_antennas, Rng& rng) {
  geometry.validate();
  if (num_bs_antennas < 1) throw std::invalid_argument("need at least one BS antenna");
  const Eigen::Index m = num_bs_antennas;
  const Eigen::Index n = geometry.num_elements();
  const Eigen::Index k = static_cast<Eigen::Index>(geometry.user_positions.size());

  auto nlos_gain = [&](const Vec3& a, const Vec3& b) {
    return path_loss_gain((a - b).norm(), model.exponent_nlos, model);
  };

  ChannelRealization ch;
  ch.H_bs = draw_rayleigh_channel(m, n, nlos_gain(geometry.bs_position, geometry.irs_center), rng);
  ch.h_ba1 = draw_rayleigh_channel(m, 1, nlos_gain(geometry.bs_position, geometry.anchor1_position), rng);
  ch.h_ba2 = draw_rayleigh_channel(m, 1, nlos_gain(geometry.bs_position, geometry.anchor2_position), rng);
  ch.h_sa1 = draw_rayleigh_channel(n, 1, nlos_gain(geometry.irs_center, geometry.anchor1_position), rng);
  ch.h_sa2 = draw_rayleigh_channel(n, 1, nlos_gain(geometry.irs_center, geometry.anchor2_position), rng);
  ch.h_a1a2 = draw_rayleigh_channel(
      1, 1, nlos_gain(geometry.anchor1_position, geometry.anchor2_position), rng)(0, 0);
  ch.h_ba_los = draw_rayleigh_channel(
      m, 1, nlos_gain(geometry.bs_position, geometry.anchor_los_position), rng);
  ch.h_ra_los = los_channel(geometry, geometry.anchor_los_position, model);

  ch.h_bu.reserve(k);
  ch.h_su.reserve(k);
  for (Eigen::Index u = 0; u < k; ++u) {
    const Vec3& pos = geometry.user_positions[u];
    ch.h_bu.push_back(draw_rayleigh_channel(m, 1, nlos_gain(geometry.bs_position, pos), rng));
    ch.h_su.push_back(draw_rayleigh_channel(n, 1, nlos_gain(geometry.irs_center, pos), rng));
  }

  ch.cascaded_bsa1 = cascade(ch.H_bs, ch.h_sa1);
  ch.cascaded_bsa2 = cascade(ch.H_bs, ch.h_sa2);
  ch.cascaded_bsa_los = cascade(ch.H_bs, ch.h_ra_los);
  ch.cascaded_a1sa2 = ch.h_sa2.cwiseProduct(ch.h_sa1).transpose();
  ch.cascaded_bsu.reserve(k);
  for (Eigen::Index u = 0; u < k; ++u) {
    ch.cascaded_bsu.push_back(cascade(ch.H_bs, ch.h_su[u]));
  }
  return ch;
}

}  // namespace irsce
