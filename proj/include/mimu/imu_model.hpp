#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "mimu/lie.hpp"
#include "mimu/rng.hpp"

namespace mimu {

/// Per-IMU intrinsic parameters: scale/misalignment correction matrices,
/// noise densities and bias-walk parameters.
///
/// C_g and C_a are lower triangular with positive diagonal; the corrected
/// rates are C_g * w_meas - b_g (and likewise for the accelerometer).
struct ImuIntrinsics {
  Mat3 C_g = Mat3::Identity();
  Mat3 C_a = Mat3::Identity();

  double gyro_noise_density = 0.0;   // rad/s/sqrt(Hz)
  double accel_noise_density = 0.0;  // m/s^2/sqrt(Hz)
  double gyro_bias_walk = 0.0;       // rad/s^2/sqrt(Hz)
  double accel_bias_walk = 0.0;      // m/s^3/sqrt(Hz)

  double tau_g = 300.0;  // bias correlation times, s
  double tau_a = 300.0;

  // Discrete bias-decay coefficients. Correlation times of hundreds of
  // seconds make these negligible, so they are ignored by default.
  double gamma_g = 0.0;
  double gamma_a = 0.0;
  bool ignore_bias_decay = true;

  double effective_gamma_g() const { return ignore_bias_decay ? 0.0 : gamma_g; }
  double effective_gamma_a() const { return ignore_bias_decay ? 0.0 : gamma_a; }

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!(C_g(i, i) > 0.0) || !(C_a(i, i) > 0.0)) {
        throw std::invalid_argument("ImuIntrinsics: C diagonal entries must be positive");
      }
      for (int j = i + 1; j < 3; ++j) {
        if (C_g(i, j) != 0.0 || C_a(i, j) != 0.0) {
          throw std::invalid_argument("ImuIntrinsics: C matrices must be lower triangular");
        }
      }
    }
    if (!(tau_g > 0.0) || !(tau_a > 0.0)) {
      throw std::invalid_argument("ImuIntrinsics: correlation times must be positive");
    }
    if (gyro_noise_density < 0.0 || accel_noise_density < 0.0 || gyro_bias_walk < 0.0 ||
        accel_bias_walk < 0.0) {
      throw std::invalid_argument("ImuIntrinsics: noise densities must be nonnegative");
    }
  }
};

/// Slowly varying additive sensor offsets.
struct BiasState {
  Vec3 b_g = Vec3::Zero();  // rad/s
  Vec3 b_a = Vec3::Zero();  // m/s^2
};

/// One timestamped measurement of one IMU.
struct ImuSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();  // measured angular rate, rad/s
  Vec3 accel = Vec3::Zero();  // measured specific force, m/s^2
  int imu_index = 0;
};

/// Sensor error injected additively after the C matrices, so it is
/// invisible to the calibration model: per-axis scale offsets (applied to
/// the true signal), constant offsets, slow sinusoidal drifts, optionally
/// gated by an activation schedule over track time.
struct SystematicErrorSpec {
  struct AxisDrift {
    double amplitude = 0.0;
    double period = 0.0;  // s; must be positive when amplitude != 0
    double phase = 0.0;
  };

  Vec3 gyro_scale_offset = Vec3::Zero();   // additive to 1
  Vec3 accel_scale_offset = Vec3::Zero();
  Vec3 gyro_bias_offset = Vec3::Zero();    // rad/s
  Vec3 accel_bias_offset = Vec3::Zero();   // m/s^2
  std::array<AxisDrift, 3> gyro_drift{};
  std::array<AxisDrift, 3> accel_drift{};

  /// Activation windows (start, end) in seconds; empty means always active.
  std::vector<std::pair<double, double>> schedule;

  bool active_at(double t) const {
    if (schedule.empty()) return true;
    for (const auto& [lo, hi] : schedule) {
      if (t >= lo && t < hi) return true;
    }
    return false;
  }

  void validate() const {
    for (const auto& d : gyro_drift) {
      if (d.amplitude != 0.0 && !(d.period > 0.0)) {
        throw std::invalid_argument("SystematicErrorSpec: drift period must be positive");
      }
    }
    for (const auto& d : accel_drift) {
      if (d.amplitude != 0.0 && !(d.period > 0.0)) {
        throw std::invalid_argument("SystematicErrorSpec: drift period must be positive");
      }
    }
  }

  Vec3 gyro_term(double t, const Vec3& true_omega) const {
    if (!active_at(t)) return Vec3::Zero();
    Vec3 s = gyro_scale_offset.cwiseProduct(true_omega) + gyro_bias_offset;
    for (int i = 0; i < 3; ++i) {
      const auto& d = gyro_drift[i];
      if (d.amplitude != 0.0) s[i] += d.amplitude * std::sin(2.0 * M_PI * t / d.period + d.phase);
    }
    return s;
  }

  Vec3 accel_term(double t, const Vec3& true_force) const {
    if (!active_at(t)) return Vec3::Zero();
    Vec3 s = accel_scale_offset.cwiseProduct(true_force) + accel_bias_offset;
    for (int i = 0; i < 3; ++i) {
      const auto& d = accel_drift[i];
      if (d.amplitude != 0.0) s[i] += d.amplitude * std::sin(2.0 * M_PI * t / d.period + d.phase);
    }
    return s;
  }
};

/// Random streams of one simulated IMU, one per (sensor, axis, purpose),
/// keyed so output does not depend on evaluation order.
struct ImuRngBank {
  std::array<RngStream, 3> gyro_noise, accel_noise, gyro_walk, accel_walk;

  static ImuRngBank keyed(std::uint64_t seed, int imu_index) {
    ImuRngBank bank;
    const auto u = static_cast<std::uint64_t>(imu_index);
    for (std::uint64_t a = 0; a < 3; ++a) {
      bank.gyro_noise[a] = RngStream::keyed(seed, {u, 0, a, 0});
      bank.accel_noise[a] = RngStream::keyed(seed, {u, 1, a, 0});
      bank.gyro_walk[a] = RngStream::keyed(seed, {u, 0, a, 1});
      bank.accel_walk[a] = RngStream::keyed(seed, {u, 1, a, 1});
    }
    return bank;
  }
};

/// Invert the measurement model: corrected body-frame angular rate and
/// gravity-compensated body-frame acceleration.
///
///   w = C_g w_meas - b_g
///   a = C_a a_meas - b_a + R_IW g
///
/// `gravity` is the World-frame gravity vector, (0,0,-9.81) by convention;
/// the measured specific force contains -R_IW g, so adding R_IW g back
/// yields the coordinate acceleration used by the kinematic model.
inline std::pair<Vec3, Vec3> correct(const ImuSample& sample, const ImuIntrinsics& intrinsics,
                                     const BiasState& bias, const Rotation& R_IW,
                                     const Vec3& gravity) {
  intrinsics.validate();
  const Vec3 omega = intrinsics.C_g * sample.omega - bias.b_g;
  const Vec3 accel = intrinsics.C_a * sample.accel - bias.b_a + R_IW * gravity;
  return {omega, accel};
}

/// Forward measurement model. `true_accel_world` is the World-frame
/// coordinate acceleration of this IMU's origin; the sensed specific force
/// is R_IW (a_world - g). Scale/misalignment enters through C^-1 so that
/// correct() with the true parameters is the exact inverse; systematic
/// error enters after C, additively.
inline ImuSample simulate_measurement(const Vec3& true_omega, const Vec3& true_accel_world,
                                      const Rotation& R_WI, const ImuIntrinsics& intrinsics,
                                      const BiasState& bias, const SystematicErrorSpec& sys_err,
                                      const Vec3& gravity, double t, double dt, ImuRngBank& rng,
                                      int imu_index = 0) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_measurement: dt must be positive");
  intrinsics.validate();

  const Rotation R_IW = R_WI.transposed();
  const Vec3 specific_force = R_IW * (true_accel_world - gravity);

  const double gyro_sigma = intrinsics.gyro_noise_density / std::sqrt(dt);
  const double accel_sigma = intrinsics.accel_noise_density / std::sqrt(dt);
  Vec3 n_g, n_a;
  for (int i = 0; i < 3; ++i) {
    n_g[i] = gyro_sigma * rng.gyro_noise[i].gaussian();
    n_a[i] = accel_sigma * rng.accel_noise[i].gaussian();
  }

  const Vec3 gyro_signal =
      true_omega + bias.b_g + n_g + sys_err.gyro_term(t, true_omega);
  const Vec3 accel_signal =
      specific_force + bias.b_a + n_a + sys_err.accel_term(t, specific_force);

  ImuSample out;
  out.t = t;
  out.imu_index = imu_index;
  out.omega = intrinsics.C_g.triangularView<Eigen::Lower>().solve(gyro_signal);
  out.accel = intrinsics.C_a.triangularView<Eigen::Lower>().solve(accel_signal);
  return out;
}

/// One step of the discrete bias walk: b' = b - gamma b + eps with
/// eps ~ N(0, walk_density^2 dt I).
inline BiasState propagate_bias(const BiasState& bias, const ImuIntrinsics& intrinsics, double dt,
                                ImuRngBank& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate_bias: dt must be positive");
  const double g_sigma = intrinsics.gyro_bias_walk * std::sqrt(dt);
  const double a_sigma = intrinsics.accel_bias_walk * std::sqrt(dt);
  BiasState out;
  for (int i = 0; i < 3; ++i) {
    out.b_g[i] = bias.b_g[i] - intrinsics.effective_gamma_g() * bias.b_g[i] +
                 g_sigma * rng.gyro_walk[i].gaussian();
    out.b_a[i] = bias.b_a[i] - intrinsics.effective_gamma_a() * bias.b_a[i] +
                 a_sigma * rng.accel_walk[i].gaussian();
  }
  return out;
}

}  // namespace mimu
