#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "mimu/lie.hpp"
#include "mimu/spline.hpp"

namespace mimu {

/// Rigid state: orientation (frame-to-World), velocity and position in the
/// World frame, and the sample time.
struct Pose {
  Rotation R;
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  double t = 0.0;
};

/// Rigid mounting of one IMU relative to the Master frame: R_MI maps IMU
/// coordinates to Master coordinates; p_IM is the Master origin expressed
/// in the IMU frame (time-invariant).
struct ImuExtrinsics {
  Rotation R_MI;
  Vec3 p_IM = Vec3::Zero();
};

/// One strapdown step with piecewise-constant inputs:
///   R' = R Exp(w dt),  v' = v + R a dt,  p' = p + v dt + 1/2 R a dt^2.
/// `accel` must already be gravity-compensated body-frame acceleration.
/// Position uses the pre-update R and v.
inline Pose integrate_step(const Pose& state, const Vec3& omega, const Vec3& accel, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  Pose out;
  const Vec3 world_accel = state.R * accel;
  out.R = state.R * exp_so3(omega * dt);
  out.v = state.v + world_accel * dt;
  out.p = state.p + state.v * dt + 0.5 * world_accel * dt * dt;
  out.t = state.t + dt;
  return out;
}

/// Backward-difference angular acceleration. At the first sample of a
/// stream there is no previous value; callers pass zero there.
inline Vec3 angular_acceleration(const Vec3& omega, const Vec3& omega_prev, double dt_prev) {
  if (!(dt_prev > 0.0)) throw std::invalid_argument("angular_acceleration: dt must be positive");
  return (omega - omega_prev) / dt_prev;
}

/// Centrifugal + Euler pseudo-acceleration at a point offset by `p_IM`
/// within a frame rotating at `omega` (all in that frame's coordinates).
inline Vec3 inertial_acceleration(const Vec3& omega, const Vec3& omega_dot, const Vec3& p_IM) {
  const Mat3 w = hat(omega);
  return (w * w + hat(omega_dot)) * p_IM;
}

/// Angular velocity seen from the Master frame: w_M = R_MI w_I.
inline Vec3 transfer_gyro(const Vec3& omega_I, const ImuExtrinsics& ext) {
  return ext.R_MI * omega_I;
}

/// Acceleration of the Master origin from an IMU's own acceleration plus
/// its inertial term: a_M = R_MI (a_I + a_inertial).
inline Vec3 transfer_accel(const Vec3& a_I, const Vec3& a_inertial_I, const ImuExtrinsics& ext) {
  return ext.R_MI * (a_I + a_inertial_I);
}

struct TimedImuInput {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// Time-indexed sequence of states. Queries between samples interpolate:
/// cubic spline for position (derivative-consistent velocity between the
/// stored samples is approximated linearly) and spherical-linear
/// interpolation for orientation. Immutable after construction.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Pose> states) : states_(std::move(states)) {
    if (states_.empty()) throw std::invalid_argument("Trajectory: empty state list");
    std::vector<double> ts(states_.size());
    std::vector<Vec3> ps(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (i > 0 && !(states_[i].t > states_[i - 1].t)) {
        throw std::invalid_argument("Trajectory: nonmonotonic timestamps");
      }
      ts[i] = states_[i].t;
      ps[i] = states_[i].p;
    }
    if (states_.size() > 1) p_spline_ = CubicSpline3(std::move(ts), std::move(ps));
  }

  const std::vector<Pose>& states() const { return states_; }
  const Pose& front() const { return states_.front(); }
  const Pose& back() const { return states_.back(); }
  std::size_t size() const { return states_.size(); }

  Pose at(double t) const {
    Pose out;
    out.t = t;
    if (states_.size() == 1) {
      out = states_.front();
      out.t = t;
      return out;
    }
    const std::size_t i = segment_index(t);
    const Pose& s0 = states_[i];
    const Pose& s1 = states_[i + 1];
    const double u = std::clamp((t - s0.t) / (s1.t - s0.t), 0.0, 1.0);
    out.R = s0.R * exp_so3(u * log_so3(s0.R.transposed() * s1.R));
    out.p = p_spline_.value(t);
    out.v = (1.0 - u) * s0.v + u * s1.v;
    return out;
  }

 private:
  std::size_t segment_index(double t) const {
    std::size_t lo = 0, hi = states_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (states_[mid].t <= t) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::vector<Pose> states_;
  CubicSpline3 p_spline_;
};

/// Fold of integrate_step over a stream of (t, w, a) inputs. The input at
/// t_k applies over [t_k, t_{k+1}); the last input reuses the preceding
/// step length (t_0 - initial.t when there is a single input). Orientation
/// is renormalized every 1000 steps to bound drift.
inline Trajectory integrate_trajectory(const Pose& initial, std::span<const TimedImuInput> stream) {
  std::vector<Pose> states;
  states.reserve(stream.size() + 1);
  states.push_back(initial);
  for (std::size_t k = 0; k < stream.size(); ++k) {
    if (k > 0 && !(stream[k].t > stream[k - 1].t)) {
      throw std::invalid_argument("integrate_trajectory: nonmonotonic timestamps");
    }
  }
  Pose state = initial;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    double dt;
    if (k + 1 < stream.size()) {
      dt = stream[k + 1].t - stream[k].t;
    } else if (stream.size() >= 2) {
      dt = stream[k].t - stream[k - 1].t;
    } else {
      dt = stream[k].t - initial.t;
    }
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_trajectory: cannot infer positive dt");
    state = integrate_step(state, stream[k].omega, stream[k].accel, dt);
    if ((k + 1) % 1000 == 0) state.R = state.R.renormalized();
    states.push_back(state);
  }
  return Trajectory(std::move(states));
}

}  // namespace mimu
