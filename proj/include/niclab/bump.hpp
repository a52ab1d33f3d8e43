#pragma once

#include "niclab/core.hpp"

namespace niclab {

// Smooth cutoff phi(t) = h(1/2 - t) / (h(1/2 - t) + h(t)) with
// h(x) = e^{-1/x} for x > 0 and 0 otherwise. phi = 1 for t <= 0, phi = 0 for
// t >= 1/2, monotone non-increasing in between. The plateaus return exact
// constants so the glued warp is bitwise flat outside the transition.
template <typename Scalar>
struct BumpFunction {
  static Scalar h(Scalar x) { return x > Scalar(0) ? std::exp(Scalar(-1) / x) : Scalar(0); }
  static Scalar dh(Scalar x) {
    return x > Scalar(0) ? std::exp(Scalar(-1) / x) / (x * x) : Scalar(0);
  }
  static Scalar ddh(Scalar x) {
    return x > Scalar(0)
               ? std::exp(Scalar(-1) / x) * (Scalar(1) - Scalar(2) * x) / (x * x * x * x)
               : Scalar(0);
  }

  Scalar value(Scalar t) const {
    if (t <= Scalar(0)) return Scalar(1);
    if (t >= Scalar(0.5)) return Scalar(0);
    const Scalar n = h(Scalar(0.5) - t);
    return n / (n + h(t));
  }

  Scalar d1(Scalar t) const {
    if (t <= Scalar(0) || t >= Scalar(0.5)) return Scalar(0);
    const Scalar n = h(Scalar(0.5) - t);
    const Scalar np = -dh(Scalar(0.5) - t);
    const Scalar d = n + h(t);
    const Scalar dp = np + dh(t);
    return (np * d - n * dp) / (d * d);
  }

  Scalar d2(Scalar t) const {
    if (t <= Scalar(0) || t >= Scalar(0.5)) return Scalar(0);
    const Scalar n = h(Scalar(0.5) - t);
    const Scalar np = -dh(Scalar(0.5) - t);
    const Scalar npp = ddh(Scalar(0.5) - t);
    const Scalar d = n + h(t);
    const Scalar dp = np + dh(t);
    const Scalar dpp = npp + ddh(t);
    return npp / d - Scalar(2) * np * dp / (d * d) - n * dpp / (d * d) +
           Scalar(2) * n * dp * dp / (d * d * d);
  }

  Scalar operator()(Scalar t) const { return value(t); }
};

}  // namespace niclab
