#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mimu {

/// splitmix64 finalizer, used to derive independent stream seeds from
/// (master seed, tag...) tuples.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A self-contained random stream. Streams derived from the same master
/// seed but different tags are statistically independent, so simulation
/// output does not depend on evaluation order across IMUs/sensors/axes.
class RngStream {
 public:
  RngStream() : engine_(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Derive a substream keyed by (seed, tags...).
  static RngStream keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(seed);
    for (std::uint64_t t : tags) s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return RngStream(s);
  }

  double gaussian() { return normal_(engine_); }

  double uniform() { return uniform_(engine_); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Eigen::Vector3d gaussian3() {
    return {normal_(engine_), normal_(engine_), normal_(engine_)};
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mimu
