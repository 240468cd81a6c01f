#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "mimu/errors.hpp"
#include "mimu/imu_model.hpp"
#include "mimu/kinematics.hpp"
#include "mimu/rng.hpp"
#include "mimu/spline.hpp"

namespace mimu {

/// Shape of a synthetic rig trajectory: spline control points at a fixed
/// cadence with seeded per-axis excitation amplitudes.
struct TrajectorySpec {
  double duration = 60.0;              // s
  double control_cadence = 1.5;        // s between control points
  double orientation_amplitude = 0.5;  // rad, per axis
  double translation_amplitude = 0.3;  // m, per axis
  std::uint64_t seed = 0;

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("TrajectorySpec: duration must be positive");
    if (!(control_cadence > 0.0)) {
      throw std::invalid_argument("TrajectorySpec: control cadence must be positive");
    }
    if (orientation_amplitude < 0.0 || translation_amplitude < 0.0) {
      throw std::invalid_argument("TrajectorySpec: amplitudes must be nonnegative");
    }
  }
};

/// Continuous ground-truth motion of the Master frame: C2 cubic-spline
/// position and C1 orientation (rotation-vector spline). Angular velocity
/// and acceleration are derived analytically from the splines, so the
/// ground truth is self-consistent.
class GroundTruthTrajectory {
 public:
  GroundTruthTrajectory(CubicSpline3 theta_spline, CubicSpline3 position_spline, double duration)
      : theta_(std::move(theta_spline)), position_(std::move(position_spline)),
        duration_(duration) {}

  double duration() const { return duration_; }

  Rotation rotation(double t) const { return exp_so3(theta_.value(t)); }

  /// Body-frame (Master-frame) angular velocity: w = Jr(theta) * theta_dot.
  Vec3 omega_body(double t) const {
    return right_jacobian(theta_.value(t)) * theta_.derivative(t);
  }

  Vec3 position(double t) const { return position_.value(t); }
  Vec3 velocity(double t) const { return position_.derivative(t); }
  Vec3 acceleration_world(double t) const { return position_.second_derivative(t); }

  Pose pose(double t) const {
    Pose out;
    out.R = rotation(t);
    out.v = velocity(t);
    out.p = position(t);
    out.t = t;
    return out;
  }

 private:
  CubicSpline3 theta_;
  CubicSpline3 position_;
  double duration_;
};

/// Seeded smooth trajectory through uniformly drawn control points. Control
/// point 0 is pinned to identity/origin so runs start from rest reference.
inline GroundTruthTrajectory generate_trajectory(const TrajectorySpec& spec) {
  spec.validate();
  const int knots = std::max(2, static_cast<int>(std::ceil(spec.duration / spec.control_cadence)) + 1);
  std::vector<double> ts(static_cast<std::size_t>(knots));
  std::vector<Vec3> thetas(ts.size()), positions(ts.size());
  RngStream rot_rng = RngStream::keyed(spec.seed, {0xA11, 0});
  RngStream pos_rng = RngStream::keyed(spec.seed, {0xA11, 1});
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ts[i] = spec.duration * static_cast<double>(i) / static_cast<double>(knots - 1);
    if (i == 0) {
      thetas[i] = Vec3::Zero();
      positions[i] = Vec3::Zero();
      continue;
    }
    for (int ax = 0; ax < 3; ++ax) {
      thetas[i][ax] = rot_rng.uniform(-spec.orientation_amplitude, spec.orientation_amplitude);
      positions[i][ax] = pos_rng.uniform(-spec.translation_amplitude, spec.translation_amplitude);
    }
  }
  CubicSpline3 theta_spline(ts, std::move(thetas));
  CubicSpline3 position_spline(std::move(ts), std::move(positions));
  return GroundTruthTrajectory(std::move(theta_spline), std::move(position_spline), spec.duration);
}

/// One IMU's mounting and error configuration on the rig.
struct ImuRigEntry {
  ImuExtrinsics extrinsics;
  ImuIntrinsics intrinsics;
  SystematicErrorSpec systematic;
  BiasState initial_bias;
};

struct RigConfig {
  std::vector<ImuRigEntry> imus;
  double imu_rate = 342.0;     // Hz
  double master_rate = 30.0;   // Hz
  double master_orientation_noise = 0.2 * M_PI / 180.0;  // rad
  double master_position_noise = 0.002;                  // m
  Vec3 gravity = Vec3(0, 0, -9.81);

  void validate() const {
    if (imus.empty()) throw std::invalid_argument("RigConfig: need at least one IMU");
    if (!(imu_rate > 0.0) || !(master_rate > 0.0)) {
      throw std::invalid_argument("RigConfig: rates must be positive");
    }
    if (master_rate > imu_rate) {
      throw std::invalid_argument("RigConfig: master rate must not exceed IMU rate");
    }
    for (const auto& imu : imus) {
      imu.intrinsics.validate();
      imu.systematic.validate();
    }
  }
};

/// Timestamped reference pose from the exteroceptive Master sensor.
struct MasterObservation {
  double t = 0.0;
  Rotation R;  // R_WM
  Vec3 p = Vec3::Zero();
};

struct GroundTruthSample {
  double t = 0.0;
  Rotation R;  // R_WM
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// A complete synthetic dataset: per-IMU measurement streams, noisy Master
/// observations, and the withheld ground truth on the IMU grid. True bias
/// tracks are kept for test oracles; they are not part of the serialized
/// dataset.
struct Dataset {
  RigConfig rig;
  std::uint64_t seed = 0;
  double duration = 0.0;  // coverage, s
  std::vector<std::vector<ImuSample>> imu_streams;        // [imu][k]
  std::vector<MasterObservation> master;                  // master-rate grid
  std::vector<GroundTruthSample> ground_truth;            // IMU-rate grid
  std::vector<std::vector<BiasState>> true_biases;        // [imu][k], oracle only

  std::size_t imu_count() const { return imu_streams.size(); }
  double imu_dt() const { return 1.0 / rig.imu_rate; }
};

/// Sample the trajectory through every IMU's forward model. The lever-arm
/// term of each IMU's true acceleration uses the same backward-difference
/// angular acceleration the estimation side uses, so a zero-noise dataset
/// is exactly consistent under the discrete kinematic model.
inline Dataset simulate_rig(const GroundTruthTrajectory& traj, const RigConfig& rig,
                            std::uint64_t seed) {
  rig.validate();
  Dataset out;
  out.rig = rig;
  out.seed = seed;

  const double dt = 1.0 / rig.imu_rate;
  const auto sample_count = static_cast<std::size_t>(std::floor(traj.duration() * rig.imu_rate + 1e-9));
  if (sample_count == 0) throw std::invalid_argument("simulate_rig: trajectory too short");
  out.duration = static_cast<double>(sample_count) * dt;

  out.ground_truth.reserve(sample_count);
  for (std::size_t k = 0; k < sample_count; ++k) {
    const double t = static_cast<double>(k) * dt;
    GroundTruthSample g;
    g.t = t;
    g.R = traj.rotation(t);
    g.p = traj.position(t);
    g.v = traj.velocity(t);
    out.ground_truth.push_back(g);
  }

  // Master observations: ground truth pose plus seeded noise.
  const auto master_count = static_cast<std::size_t>(std::floor(traj.duration() * rig.master_rate + 1e-9));
  RngStream master_rot = RngStream::keyed(seed, {0xBEEF, 0});
  RngStream master_pos = RngStream::keyed(seed, {0xBEEF, 1});
  out.master.reserve(master_count);
  for (std::size_t j = 0; j < master_count; ++j) {
    const double t = static_cast<double>(j) / rig.master_rate;
    MasterObservation obs;
    obs.t = t;
    obs.R = traj.rotation(t) * exp_so3(rig.master_orientation_noise * master_rot.gaussian3());
    obs.p = traj.position(t) + rig.master_position_noise * master_pos.gaussian3();
    out.master.push_back(obs);
  }

  out.imu_streams.resize(rig.imus.size());
  out.true_biases.resize(rig.imus.size());
  for (std::size_t i = 0; i < rig.imus.size(); ++i) {
    const ImuRigEntry& entry = rig.imus[i];
    const Rotation R_IM = entry.extrinsics.R_MI.transposed();
    ImuRngBank bank = ImuRngBank::keyed(seed, static_cast<int>(i));
    BiasState bias = entry.initial_bias;

    auto& stream = out.imu_streams[i];
    auto& bias_track = out.true_biases[i];
    stream.reserve(sample_count);
    bias_track.reserve(sample_count);

    Vec3 omega_prev = Vec3::Zero();
    for (std::size_t k = 0; k < sample_count; ++k) {
      const double t = static_cast<double>(k) * dt;
      const Rotation R_WM = out.ground_truth[k].R;
      const Rotation R_WI = R_WM * entry.extrinsics.R_MI;

      const Vec3 omega_M = traj.omega_body(t);
      const Vec3 omega_I = R_IM * omega_M;
      const Vec3 omega_dot_I =
          (k == 0) ? Vec3::Zero().eval() : ((omega_I - omega_prev) / dt).eval();
      omega_prev = omega_I;

      const Vec3 accel_M = R_WM.transposed() * traj.acceleration_world(t);
      const Vec3 accel_I =
          R_IM * accel_M - inertial_acceleration(omega_I, omega_dot_I, entry.extrinsics.p_IM);
      const Vec3 accel_world_I = R_WI * accel_I;

      stream.push_back(simulate_measurement(omega_I, accel_world_I, R_WI, entry.intrinsics, bias,
                                            entry.systematic, rig.gravity, t, dt, bank,
                                            static_cast<int>(i)));
      bias_track.push_back(bias);
      bias = propagate_bias(bias, entry.intrinsics, dt, bank);
    }
  }
  return out;
}

/// One evaluation track: a closed-loop (Master-aided) window followed by an
/// open-loop window.
struct TrackSegment {
  int index = 0;
  double t_begin = 0.0;
  double t_split = 0.0;  // closed-loop/open-loop boundary
  double t_end = 0.0;
};

/// Maximal list of non-overlapping (closed + open) tracks covering the
/// dataset. Throws when the dataset is shorter than one track.
inline std::vector<TrackSegment> segment_tracks(const Dataset& dataset, double closed_s,
                                                double open_s) {
  if (!(closed_s > 0.0) || !(open_s > 0.0)) {
    throw std::invalid_argument("segment_tracks: window lengths must be positive");
  }
  const double track_len = closed_s + open_s;
  const auto count = static_cast<int>(std::floor(dataset.duration / track_len + 1e-9));
  if (count == 0) {
    throw DataError("segment_tracks: dataset shorter than one track");
  }
  std::vector<TrackSegment> tracks;
  tracks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    TrackSegment seg;
    seg.index = i;
    seg.t_begin = static_cast<double>(i) * track_len;
    seg.t_split = seg.t_begin + closed_s;
    seg.t_end = seg.t_begin + track_len;
    tracks.push_back(seg);
  }
  return tracks;
}

}  // namespace mimu
