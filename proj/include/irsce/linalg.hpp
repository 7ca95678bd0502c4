#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace irsce {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRowVec = Eigen::RowVectorXcd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

// Any solve whose system matrix exceeds this condition number is rejected
// instead of silently amplifying noise.
inline constexpr double kMaxCondition = 1e6;

// Relative floor for elementwise divisions by estimated channel coefficients.
inline constexpr double kDivisorFloor = 1e-12;

// dB/dBm conversions live here and nowhere else; configs carry dB(m) values,
// everything internal is linear (mW for powers, dimensionless for gains).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class DegenerateChannelError : public std::runtime_error {
 public:
  DegenerateChannelError(const std::string& what, Eigen::Index index)
      : std::runtime_error(what), index_(index) {}
  Eigen::Index index() const { return index_; }

 private:
  Eigen::Index index_;
};

// Derives an independent substream seed from a master seed and up to three
// counters (trial index, scheme index, stream purpose). SplitMix64-style
// mixing; collisions between distinct tuples are negligible.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a + 0x243f6a8885a308d3ull));
  s = mix64(s ^ mix64(b + 0x13198a2e03707344ull));
  s = mix64(s ^ mix64(c + 0xa4093822299f31d0ull));
  return s;
}

// Deterministic Gaussian stream. Box-Muller on top of mt19937_64 so the draw
// sequence does not depend on the standard library's normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // standard normal N(0, 1)
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // (0, 1] for the log argument
    double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  // circularly-symmetric complex Gaussian CN(0, variance):
  // independent real/imaginary parts, each of variance variance/2.
  Complex cgaussian(double variance) {
    double s = std::sqrt(variance / 2.0);
    double re = s * gaussian();
    double im = s * gaussian();
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

double condition_number(const CMat& a);

// QR-backed least-squares solver with a condition gate. Throws
// ConditioningError at construction when cond(A) > max_condition.
class GatedLeastSquares {
 public:
  explicit GatedLeastSquares(const CMat& a, double max_condition = kMaxCondition);

  CVec solve(const CVec& rhs) const;
  double condition() const { return condition_; }

 private:
  Eigen::ColPivHouseholderQR<CMat> qr_;
  double condition_;
};

}  // namespace irsce
