#pragma once

#include "niclab/metric.hpp"

namespace niclab {

// Named analytic metrics used across the tools and tests. All carry analytic
// derivative callbacks; strip_analytic_derivatives() removes them when the
// difference-stencil path should be exercised instead.

template <typename Scalar>
MetricField<Scalar> strip_analytic_derivatives(MetricField<Scalar> m) {
  m.first_derivs = nullptr;
  m.second_derivs = nullptr;
  return m;
}

template <typename Scalar>
MetricField<Scalar> euclidean_metric(int dim, double half_width = 2.0) {
  std::vector<Axis> axes;
  const char* names[4] = {"x1", "x2", "x3", "x4"};
  for (int k = 0; k < dim; ++k) axes.push_back(Axis::interval(names[k], -half_width, half_width));
  return constant_metric<Scalar>(Chart(std::move(axes)), MatX<Scalar>::Identity(dim, dim));
}

template <typename Scalar>
MetricField<Scalar> flat_torus_metric(int dim, double period = 1.0) {
  std::vector<Axis> axes;
  const char* names[4] = {"x1", "x2", "x3", "x4"};
  for (int k = 0; k < dim; ++k) axes.push_back(Axis::circle(names[k], period));
  return constant_metric<Scalar>(Chart(std::move(axes)), MatX<Scalar>::Identity(dim, dim));
}

// Round sphere of the given radius in a stereographic chart:
// g = 4 r^4 / (r^2 + |x|^2)^2 * delta. Unit radius has s = 12 and sectional
// curvature +1.
template <typename Scalar>
MetricField<Scalar> sphere_metric(Scalar radius = Scalar(1), double half_width = 0.9) {
  std::vector<Axis> axes;
  const char* names[4] = {"x1", "x2", "x3", "x4"};
  for (int k = 0; k < 4; ++k) axes.push_back(Axis::interval(names[k], -half_width, half_width));
  const Scalar r2 = radius * radius;
  const Scalar r4 = r2 * r2;
  auto m = MetricField<Scalar>::analytic(Chart(std::move(axes)), [r4, r2](const VecX<Scalar>& x) {
    const Scalar d = r2 + x.squaredNorm();
    return (Scalar(4) * r4 / (d * d) * MatX<Scalar>::Identity(4, 4)).eval();
  });
  m.first_derivs = [r4, r2](const VecX<Scalar>& x) {
    const Scalar d = r2 + x.squaredNorm();
    std::vector<MatX<Scalar>> out(4);
    for (int k = 0; k < 4; ++k) {
      const Scalar dpsi = Scalar(-16) * r4 * x[k] / (d * d * d);
      out[static_cast<std::size_t>(k)] = dpsi * MatX<Scalar>::Identity(4, 4);
    }
    return out;
  };
  m.second_derivs = [r4, r2](const VecX<Scalar>& x) {
    const Scalar d = r2 + x.squaredNorm();
    const Scalar d3 = d * d * d;
    const Scalar d4 = d3 * d;
    std::vector<std::vector<MatX<Scalar>>> out(4, std::vector<MatX<Scalar>>(4));
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        const Scalar ddpsi =
            Scalar(-16) * r4 * ((k == l ? Scalar(1) : Scalar(0)) / d3 - Scalar(6) * x[k] * x[l] / d4);
        out[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
            ddpsi * MatX<Scalar>::Identity(4, 4);
      }
    }
    return out;
  };
  return m;
}

// Rescaled cusp dt^2 + c^2 e^{-2t/c} g_e on [0, t_max] x T^2; c = 1 is the
// hyperbolic cusp model itself. fiber_scale is the flat-torus cell area.
template <typename Scalar>
MetricField<Scalar> cusp_metric(Scalar c = Scalar(1), Scalar fiber_scale = Scalar(1),
                                double t_max = 60.0) {
  return warped_product_metric<Scalar>(WarpProfile<Scalar>::exp_warp(c, t_max), fiber_scale,
                                       /*with_circle=*/false);
}

// The same cusp crossed with a circle of length circle_len; c = 1 gives the
// conformally flat H^3 x S^1 model.
template <typename Scalar>
MetricField<Scalar> cusp_circle_metric(Scalar c = Scalar(1), Scalar fiber_scale = Scalar(1),
                                       double circle_len = 1.0, double t_max = 60.0) {
  return warped_product_metric<Scalar>(WarpProfile<Scalar>::exp_warp(c, t_max), fiber_scale,
                                       /*with_circle=*/true, circle_len);
}

// Product of two curvature -1 half-plane factors (a Kaehler surface):
// chart (x1, y1, x2, y2), g = diag(1/y1^2, 1/y1^2, 1/y2^2, 1/y2^2).
template <typename Scalar>
MetricField<Scalar> hyperbolic_product_metric(double y_lo = 0.5, double y_hi = 3.0) {
  std::vector<Axis> axes;
  axes.push_back(Axis::interval("x1", -2.0, 2.0));
  axes.push_back(Axis::interval("y1", y_lo, y_hi));
  axes.push_back(Axis::interval("x2", -2.0, 2.0));
  axes.push_back(Axis::interval("y2", y_lo, y_hi));
  auto m = MetricField<Scalar>::analytic(Chart(std::move(axes)), [](const VecX<Scalar>& x) {
    MatX<Scalar> g = MatX<Scalar>::Zero(4, 4);
    const Scalar a = Scalar(1) / (x[1] * x[1]);
    const Scalar b = Scalar(1) / (x[3] * x[3]);
    g(0, 0) = g(1, 1) = a;
    g(2, 2) = g(3, 3) = b;
    return g;
  });
  m.first_derivs = [](const VecX<Scalar>& x) {
    std::vector<MatX<Scalar>> d(4, MatX<Scalar>::Zero(4, 4));
    d[1](0, 0) = d[1](1, 1) = Scalar(-2) / std::pow(x[1], Scalar(3));
    d[3](2, 2) = d[3](3, 3) = Scalar(-2) / std::pow(x[3], Scalar(3));
    return d;
  };
  m.second_derivs = [](const VecX<Scalar>& x) {
    std::vector<std::vector<MatX<Scalar>>> dd(4,
                                              std::vector<MatX<Scalar>>(4, MatX<Scalar>::Zero(4, 4)));
    dd[1][1](0, 0) = dd[1][1](1, 1) = Scalar(6) / std::pow(x[1], Scalar(4));
    dd[3][3](2, 2) = dd[3][3](3, 3) = Scalar(6) / std::pow(x[3], Scalar(4));
    return dd;
  };
  return m;
}

// Generic warped four-torus dt^2 + f^2 (dx^2 + dy^2) + dtheta^2 with
// f = base + amp sin(2 pi t / period); not conformally flat for generic
// parameters.
template <typename Scalar>
MetricField<Scalar> warped_torus_metric(Scalar base = Scalar(1), Scalar amp = Scalar(0.3),
                                        double period = 1.0, Scalar fiber_scale = Scalar(1),
                                        double circle_len = 1.0) {
  if (!(base > std::abs(amp))) throw InvalidArgument("warp must stay positive");
  const Scalar omega = static_cast<Scalar>(2.0 * 3.14159265358979323846 / period);
  auto profile = WarpProfile<Scalar>::analytic_periodic(
      [base, amp, omega](Scalar t) { return base + amp * std::sin(omega * t); },
      [amp, omega](Scalar t) { return amp * omega * std::cos(omega * t); },
      [amp, omega](Scalar t) { return -amp * omega * omega * std::sin(omega * t); }, period);
  return warped_product_metric<Scalar>(profile, fiber_scale, /*with_circle=*/true, circle_len);
}

}  // namespace niclab
