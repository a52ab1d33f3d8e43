#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace niclab {

// Charts are 3- or 4-dimensional; fixed-capacity dense types avoid heap traffic.
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 4, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
// Operators on 2-forms: 3x3 (dim 3) or 6x6 (dim 4).
template <typename Scalar>
using OpX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StencilOutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FrameNotOrthonormal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeComponent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveU : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BoundViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Self-contained counter RNG. Randomized searches draw from streams keyed by
// (seed, index) so results are independent of evaluation order and platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds
    next_u64();
    next_u64();
  }
  Rng(std::uint64_t seed, std::uint64_t index)
      : Rng(seed ^ (0x9e3779b97f4a7c15ull * (index + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (no libm distribution dependence)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Kahan-Babuska-Neumaier compensated accumulator; keeps sums stable against
// reordering to ~1e-13 relative.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = Scalar(0);
  Scalar comp_ = Scalar(0);
};

template <typename Scalar>
Scalar compensated_sum(const std::vector<Scalar>& xs) {
  CompensatedSum<Scalar> acc;
  for (const Scalar& x : xs) acc.add(x);
  return acc.value();
}

// Least-squares slope of y against x.
template <typename Scalar>
Scalar fitted_slope(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fitted_slope: need two or more paired samples");
  }
  const auto n = static_cast<Scalar>(x.size());
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Scalar sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

template <typename Scalar>
Scalar relative_gap(Scalar a, Scalar b) {
  const Scalar scale = std::max(std::abs(a), std::abs(b));
  if (scale == Scalar(0)) return Scalar(0);
  return std::abs(a - b) / scale;
}

}  // namespace niclab
