#pragma once

#include "niclab/metric.hpp"

namespace niclab {

// Product region: one closed sub-interval per axis and an even Simpson
// interval count per axis. Full periodic axes use [0, period].
struct Region {
  std::vector<std::array<double, 2>> bounds;
  std::vector<int> intervals;

  static Region full(const Chart& chart, const std::vector<int>& intervals) {
    Region r;
    r.intervals = intervals;
    for (int k = 0; k < chart.dim(); ++k) {
      const Axis& a = chart.axis(k);
      if (a.periodic) {
        r.bounds.push_back({0.0, a.period});
      } else {
        r.bounds.push_back({a.lo, a.hi});
      }
    }
    return r;
  }
};

namespace detail {

inline void check_region(const Region& region, int dim) {
  if (static_cast<int>(region.bounds.size()) != dim ||
      static_cast<int>(region.intervals.size()) != dim) {
    throw InvalidArgument("region must list every axis once");
  }
  for (int k = 0; k < dim; ++k) {
    if (region.intervals[static_cast<std::size_t>(k)] < 2 ||
        region.intervals[static_cast<std::size_t>(k)] % 2 != 0) {
      throw InvalidArgument("Simpson interval counts must be even and >= 2");
    }
    if (!(region.bounds[static_cast<std::size_t>(k)][0] <
          region.bounds[static_cast<std::size_t>(k)][1])) {
      throw InvalidArgument("region bounds must be increasing");
    }
  }
}

inline double simpson_weight(int i, int n_intervals) {
  if (i == 0 || i == n_intervals) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

}  // namespace detail

// Composite tensor-product Simpson rule for point integrands; evaluation
// order is fixed row-major and accumulation is compensated, so results do
// not depend on how the work would be partitioned.
template <typename Scalar, typename F>
Scalar integrate(F&& fn, const Region& region) {
  const int dim = static_cast<int>(region.bounds.size());
  std::vector<Scalar> h(static_cast<std::size_t>(dim));
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) {
    h[static_cast<std::size_t>(k)] =
        static_cast<Scalar>((region.bounds[static_cast<std::size_t>(k)][1] -
                             region.bounds[static_cast<std::size_t>(k)][0]) /
                            region.intervals[static_cast<std::size_t>(k)]);
    total *= static_cast<std::size_t>(region.intervals[static_cast<std::size_t>(k)] + 1);
  }
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  CompensatedSum<Scalar> acc;
  for (std::size_t count = 0; count < total; ++count) {
    VecX<Scalar> x(dim);
    Scalar w = Scalar(1);
    for (int k = 0; k < dim; ++k) {
      const int i = idx[static_cast<std::size_t>(k)];
      x[k] = static_cast<Scalar>(region.bounds[static_cast<std::size_t>(k)][0]) +
             h[static_cast<std::size_t>(k)] * static_cast<Scalar>(i);
      w *= static_cast<Scalar>(
               detail::simpson_weight(i, region.intervals[static_cast<std::size_t>(k)])) *
           h[static_cast<std::size_t>(k)] / Scalar(3);
    }
    acc.add(w * fn(x));
    for (int k = dim - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] <=
          region.intervals[static_cast<std::size_t>(k)]) {
        break;
      }
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return acc.value();
}

// Integral of phi against the Riemannian volume density sqrt(det g).
template <typename Scalar, typename F>
Scalar integrate_density(const MetricField<Scalar>& m, F&& phi, const Region& region) {
  detail::check_region(region, m.chart.dim());
  for (int k = 0; k < m.chart.dim(); ++k) {
    const Axis& a = m.chart.axis(k);
    if (!a.periodic) {
      if (region.bounds[static_cast<std::size_t>(k)][0] < a.lo - 1e-12 ||
          region.bounds[static_cast<std::size_t>(k)][1] > a.hi + 1e-12) {
        throw OutOfDomain("integration region leaves the chart");
      }
    }
  }
  return integrate<Scalar>(
      [&](const VecX<Scalar>& x) {
        const MatX<Scalar> g = metric_at(m, x);
        return phi(x) * std::sqrt(g.determinant());
      },
      region);
}

template <typename Scalar>
Scalar volume(const MetricField<Scalar>& m, const Region& region) {
  return integrate_density(
      m, [](const VecX<Scalar>&) { return Scalar(1); }, region);
}

// Warped-region shortcut: dV = f(t)^fiber_dim dt x (fiber area) [x circle].
template <typename Scalar, typename F>
Scalar integrate_warped(const WarpProfile<Scalar>& w, F&& phi, double lo, double hi,
                        int fiber_dim, Scalar fiber_area, Scalar circle_len, int intervals) {
  Region r;
  r.bounds = {{lo, hi}};
  r.intervals = {intervals};
  const Scalar line = integrate<Scalar>(
      [&](const VecX<Scalar>& x) {
        const Scalar t = x[0];
        return phi(t) * std::pow(w.f(t), static_cast<Scalar>(fiber_dim));
      },
      r);
  return line * fiber_area * circle_len;
}

}  // namespace niclab
