#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mimu {

/// Natural cubic spline through (t_i, y_i) with y in R^3. Value, first and
/// second derivatives are analytic per segment. Queries outside the knot
/// range evaluate the boundary segment polynomial.
class CubicSpline3 {
 public:
  CubicSpline3() = default;

  CubicSpline3(std::vector<double> ts, std::vector<Eigen::Vector3d> ys)
      : t_(std::move(ts)), y_(std::move(ys)) {
    const std::size_t n = t_.size();
    if (n != y_.size() || n == 0) {
      throw std::invalid_argument("CubicSpline3: size mismatch or empty input");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(t_[i] > t_[i - 1])) {
        throw std::invalid_argument("CubicSpline3: knots must be strictly increasing");
      }
    }
    m_.assign(n, Eigen::Vector3d::Zero());
    if (n < 3) return;  // natural spline degenerates to a line

    // Thomas algorithm for the interior second derivatives M_1..M_{n-2};
    // natural boundary M_0 = M_{n-1} = 0.
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t_[i + 1] - t_[i];

    const std::size_t m = n - 2;  // interior unknowns
    std::vector<double> cp(m, 0.0);
    std::vector<Eigen::Vector3d> dp(m, Eigen::Vector3d::Zero());
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double mu = h[i - 1] / (h[i - 1] + h[i]);
      const double lambda = h[i] / (h[i - 1] + h[i]);
      const Eigen::Vector3d d = 6.0 / (h[i - 1] + h[i]) *
                                ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
      if (k == 0) {
        cp[k] = lambda / 2.0;
        dp[k] = d / 2.0;
      } else {
        const double denom = 2.0 - mu * cp[k - 1];
        cp[k] = lambda / denom;
        dp[k] = (d - mu * dp[k - 1]) / denom;
      }
    }
    for (std::size_t k = m; k-- > 0;) {
      m_[k + 1] = dp[k] - ((k + 1 < m) ? cp[k] * m_[k + 2] : Eigen::Vector3d::Zero().eval());
    }
  }

  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }

  Eigen::Vector3d value(double t) const {
    if (t_.size() == 1) return y_[0];
    const auto [i, h, a, b] = locate(t);
    return m_[i] * (h * h / 6.0) * (a * a * a - a) +
           m_[i + 1] * (h * h / 6.0) * (b * b * b - b) + a * y_[i] + b * y_[i + 1];
  }

  Eigen::Vector3d derivative(double t) const {
    if (t_.size() == 1) return Eigen::Vector3d::Zero();
    const auto [i, h, a, b] = locate(t);
    return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * (h / 6.0) * m_[i] +
           (3.0 * b * b - 1.0) * (h / 6.0) * m_[i + 1];
  }

  Eigen::Vector3d second_derivative(double t) const {
    if (t_.size() == 1) return Eigen::Vector3d::Zero();
    const auto [i, h, a, b] = locate(t);
    return a * m_[i] + b * m_[i + 1];
  }

 private:
  struct Segment {
    std::size_t i;
    double h, a, b;  // a = (t_{i+1}-t)/h, b = (t-t_i)/h
  };

  Segment locate(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = (it == t_.begin()) ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    i = std::min(i, t_.size() - 2);
    const double h = t_[i + 1] - t_[i];
    const double b = (t - t_[i]) / h;
    return {i, h, 1.0 - b, b};
  }

  std::vector<double> t_;
  std::vector<Eigen::Vector3d> y_;
  std::vector<Eigen::Vector3d> m_;  // second derivatives at knots
};

}  // namespace mimu
