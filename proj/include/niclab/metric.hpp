#pragma once

#include <functional>
#include <utility>

#include "niclab/chart.hpp"
#include "niclab/core.hpp"

namespace niclab {

// Difference-stencil controls. `order` is the stencil order (2 or 4);
// Richardson extrapolation combines two step sizes for one extra order pair.
struct DiffOptions {
  int order = 2;
  double step = 1e-3;
  bool richardson = false;
};

template <typename Scalar>
struct MetricDerivs {
  std::vector<MatX<Scalar>> first;                // first[k](i,j) = d_k g_ij
  std::vector<std::vector<MatX<Scalar>>> second;  // second[k][l](i,j) = d_k d_l g_ij
};

template <typename Scalar>
struct SampledGrid {
  std::vector<int> nodes;       // per-axis node count
  std::vector<double> origin;   // coordinate of node 0 per axis
  std::vector<double> spacing;  // per-axis grid step
  std::vector<MatX<Scalar>> values;  // row-major over the node lattice

  std::size_t flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      f = f * static_cast<std::size_t>(nodes[k]) + static_cast<std::size_t>(idx[k]);
    }
    return f;
  }
};

// A metric on a chart: analytic component functions (with optional analytic
// derivative callbacks) or a sampled lattice of symmetric matrices.
template <typename Scalar>
struct MetricField {
  enum class Kind { Analytic, Sampled };

  Chart chart;
  Kind kind = Kind::Analytic;

  std::function<MatX<Scalar>(const VecX<Scalar>&)> components;
  std::function<std::vector<MatX<Scalar>>(const VecX<Scalar>&)> first_derivs;
  std::function<std::vector<std::vector<MatX<Scalar>>>(const VecX<Scalar>&)> second_derivs;

  SampledGrid<Scalar> grid;

  static MetricField analytic(Chart chart,
                              std::function<MatX<Scalar>(const VecX<Scalar>&)> g) {
    MetricField m{std::move(chart)};
    m.kind = Kind::Analytic;
    m.components = std::move(g);
    return m;
  }

  explicit MetricField(Chart c) : chart(std::move(c)) {}
};

template <typename Scalar>
MetricField<Scalar> constant_metric(Chart chart, const MatX<Scalar>& g0) {
  const int n = chart.dim();
  if (g0.rows() != n || g0.cols() != n) {
    throw InvalidArgument("constant metric dimension mismatch");
  }
  auto m = MetricField<Scalar>::analytic(std::move(chart),
                                         [g0](const VecX<Scalar>&) { return g0; });
  m.first_derivs = [n, g0](const VecX<Scalar>&) {
    return std::vector<MatX<Scalar>>(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n));
  };
  m.second_derivs = [n, g0](const VecX<Scalar>&) {
    return std::vector<std::vector<MatX<Scalar>>>(
        static_cast<std::size_t>(n),
        std::vector<MatX<Scalar>>(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n)));
  };
  return m;
}

namespace detail {

template <typename Scalar>
bool positive_definite(const MatX<Scalar>& g) {
  Eigen::LLT<MatX<Scalar>> llt(g);
  return llt.info() == Eigen::Success;
}

// Multilinear interpolation over the 2^dim cell corners.
template <typename Scalar>
MatX<Scalar> interpolate(const Chart& chart, const SampledGrid<Scalar>& grid,
                         const VecX<Scalar>& x) {
  const int n = chart.dim();
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Axis& a = chart.axis(k);
    const double u = (static_cast<double>(x[k]) - grid.origin[k]) / grid.spacing[k];
    int i0 = static_cast<int>(std::floor(u));
    double fr = u - i0;
    if (!a.periodic) {
      if (i0 < 0) {
        i0 = 0;
        fr = 0.0;
      }
      if (i0 >= grid.nodes[k] - 1) {
        i0 = grid.nodes[k] - 2;
        fr = u - i0;
      }
    }
    base[static_cast<std::size_t>(k)] = i0;
    frac[static_cast<std::size_t>(k)] = fr;
  }
  MatX<Scalar> out = MatX<Scalar>::Zero(n, n);
  const int corners = 1 << n;
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const int bit = (c >> k) & 1;
      w *= bit ? frac[static_cast<std::size_t>(k)] : 1.0 - frac[static_cast<std::size_t>(k)];
      int i = base[static_cast<std::size_t>(k)] + bit;
      if (chart.axis(k).periodic) i = ((i % grid.nodes[k]) + grid.nodes[k]) % grid.nodes[k];
      idx[static_cast<std::size_t>(k)] = i;
    }
    if (w == 0.0) continue;
    out += static_cast<Scalar>(w) * grid.values[grid.flat_index(idx)];
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
MatX<Scalar> metric_at(const MetricField<Scalar>& m, const VecX<Scalar>& x_in) {
  const VecX<Scalar> x = m.chart.template wrap<Scalar>(x_in);
  if (m.kind == MetricField<Scalar>::Kind::Analytic) {
    return m.components(x);
  }
  MatX<Scalar> g = detail::interpolate(m.chart, m.grid, x);
  if (!detail::positive_definite(g)) {
    throw NotPositiveDefinite("interpolated metric is not positive definite (grid too coarse)");
  }
  return g;
}

namespace detail {

// First-derivative stencil coefficients as (offset, weight/h) pairs.
inline const std::vector<std::pair<int, double>>& d1_stencil(int order) {
  static const std::vector<std::pair<int, double>> o2 = {{-1, -0.5}, {1, 0.5}};
  static const std::vector<std::pair<int, double>> o4 = {
      {-2, 1.0 / 12.0}, {-1, -8.0 / 12.0}, {1, 8.0 / 12.0}, {2, -1.0 / 12.0}};
  if (order == 2) return o2;
  if (order == 4) return o4;
  throw InvalidArgument("stencil order must be 2 or 4");
}

// Pure second-derivative stencil, weights/h^2.
inline const std::vector<std::pair<int, double>>& d2_stencil(int order) {
  static const std::vector<std::pair<int, double>> o2 = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<std::pair<int, double>> o4 = {{-2, -1.0 / 12.0},
                                                         {-1, 16.0 / 12.0},
                                                         {0, -30.0 / 12.0},
                                                         {1, 16.0 / 12.0},
                                                         {2, -1.0 / 12.0}};
  if (order == 2) return o2;
  if (order == 4) return o4;
  throw InvalidArgument("stencil order must be 2 or 4");
}

template <typename Scalar, typename Eval>
MatX<Scalar> fd_first(const Eval& eval, const VecX<Scalar>& x, int axis, Scalar h, int order) {
  MatX<Scalar> acc;
  bool started = false;
  for (const auto& [off, w] : d1_stencil(order)) {
    VecX<Scalar> xs = x;
    xs[axis] += static_cast<Scalar>(off) * h;
    const MatX<Scalar> v = static_cast<Scalar>(w) * eval(xs);
    if (!started) {
      acc = v;
      started = true;
    } else {
      acc += v;
    }
  }
  return acc / h;
}

template <typename Scalar, typename Eval>
MatX<Scalar> fd_second_pure(const Eval& eval, const VecX<Scalar>& x, int axis, Scalar h,
                            int order) {
  MatX<Scalar> acc;
  bool started = false;
  for (const auto& [off, w] : d2_stencil(order)) {
    VecX<Scalar> xs = x;
    xs[axis] += static_cast<Scalar>(off) * h;
    const MatX<Scalar> v = static_cast<Scalar>(w) * eval(xs);
    if (!started) {
      acc = v;
      started = true;
    } else {
      acc += v;
    }
  }
  return acc / (h * h);
}

template <typename Scalar, typename Eval>
MatX<Scalar> fd_second_mixed(const Eval& eval, const VecX<Scalar>& x, int ka, int kb, Scalar ha,
                             Scalar hb, int order) {
  MatX<Scalar> acc;
  bool started = false;
  for (const auto& [oa, wa] : d1_stencil(order)) {
    for (const auto& [ob, wb] : d1_stencil(order)) {
      VecX<Scalar> xs = x;
      xs[ka] += static_cast<Scalar>(oa) * ha;
      xs[kb] += static_cast<Scalar>(ob) * hb;
      const MatX<Scalar> v = static_cast<Scalar>(wa * wb) * eval(xs);
      if (!started) {
        acc = v;
        started = true;
      } else {
        acc += v;
      }
    }
  }
  return acc / (ha * hb);
}

template <typename Scalar>
int stencil_reach(int order) {
  return order == 2 ? 1 : 2;
}

}  // namespace detail

// First (and optionally second) coordinate derivatives of the metric
// components. Analytic callbacks win when present; otherwise central
// differences on the components themselves (never on Christoffels).
template <typename Scalar>
MetricDerivs<Scalar> metric_derivatives(const MetricField<Scalar>& m, const VecX<Scalar>& x_in,
                                        int deriv_order, const DiffOptions& opt = {}) {
  if (deriv_order != 1 && deriv_order != 2) {
    throw InvalidArgument("derivative order must be 1 or 2");
  }
  const int n = m.chart.dim();
  const VecX<Scalar> x = m.chart.template wrap<Scalar>(x_in);
  MetricDerivs<Scalar> out;

  if (m.kind == MetricField<Scalar>::Kind::Analytic) {
    const bool have1 = static_cast<bool>(m.first_derivs);
    const bool have2 = static_cast<bool>(m.second_derivs);
    if (have1) out.first = m.first_derivs(x);
    if (deriv_order == 2 && have2) out.second = m.second_derivs(x);
    if (have1 && (deriv_order == 1 || have2)) return out;

    const auto eval = [&m](const VecX<Scalar>& p) {
      return m.components(m.chart.template wrap<Scalar>(p));
    };
    const Scalar h = static_cast<Scalar>(opt.step);
    const int reach = detail::stencil_reach<Scalar>(opt.order);
    for (int k = 0; k < n; ++k) {
      m.chart.require_stencil_inside(x, k, static_cast<Scalar>(reach) * h);
    }

    const auto first_at = [&](Scalar hh) {
      std::vector<MatX<Scalar>> d(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        d[static_cast<std::size_t>(k)] = detail::fd_first(eval, x, k, hh, opt.order);
      }
      return d;
    };
    const auto second_at = [&](Scalar hh) {
      std::vector<std::vector<MatX<Scalar>>> dd(
          static_cast<std::size_t>(n), std::vector<MatX<Scalar>>(static_cast<std::size_t>(n)));
      for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
          MatX<Scalar> v = (k == l)
                               ? detail::fd_second_pure(eval, x, k, hh, opt.order)
                               : detail::fd_second_mixed(eval, x, k, l, hh, hh, opt.order);
          dd[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = v;
          dd[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = v;
        }
      }
      return dd;
    };

    const double factor = std::pow(2.0, opt.order);
    if (!have1) {
      if (opt.richardson) {
        auto coarse = first_at(h);
        auto fine = first_at(h / 2);
        out.first.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
          out.first[static_cast<std::size_t>(k)] =
              (static_cast<Scalar>(factor) * fine[static_cast<std::size_t>(k)] -
               coarse[static_cast<std::size_t>(k)]) /
              static_cast<Scalar>(factor - 1.0);
        }
      } else {
        out.first = first_at(h);
      }
    }
    if (deriv_order == 2 && !have2) {
      if (opt.richardson) {
        auto coarse = second_at(h);
        auto fine = second_at(h / 2);
        out.second.assign(static_cast<std::size_t>(n),
                          std::vector<MatX<Scalar>>(static_cast<std::size_t>(n)));
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            out.second[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
                (static_cast<Scalar>(factor) *
                     fine[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] -
                 coarse[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) /
                static_cast<Scalar>(factor - 1.0);
          }
        }
      } else {
        out.second = second_at(h);
      }
    }
    return out;
  }

  // Sampled: derivatives are taken on grid nodes only, never on interpolated
  // values.
  const SampledGrid<Scalar>& grid = m.grid;
  std::vector<int> node(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = (static_cast<double>(x[k]) - grid.origin[k]) / grid.spacing[k];
    const int i = static_cast<int>(std::llround(u));
    if (std::abs(u - i) > 1e-6) {
      throw InvalidArgument("sampled-metric derivatives require a grid node");
    }
    node[static_cast<std::size_t>(k)] = i;
  }

  const int base_reach = detail::stencil_reach<Scalar>(opt.order);
  const int stride_max = opt.richardson ? 2 : 1;
  for (int k = 0; k < n; ++k) {
    if (m.chart.axis(k).periodic) continue;
    const int i = node[static_cast<std::size_t>(k)];
    const int reach = base_reach * stride_max;
    if (i - reach < 0 || i + reach > grid.nodes[static_cast<std::size_t>(k)] - 1) {
      throw StencilOutOfDomain("sampled stencil leaves the chart interval");
    }
  }

  const auto value_at = [&](const std::vector<int>& idx_in) {
    std::vector<int> idx = idx_in;
    for (int k = 0; k < n; ++k) {
      if (m.chart.axis(k).periodic) {
        const int nk = grid.nodes[static_cast<std::size_t>(k)];
        idx[static_cast<std::size_t>(k)] = ((idx[static_cast<std::size_t>(k)] % nk) + nk) % nk;
      }
    }
    return grid.values[grid.flat_index(idx)];
  };

  const auto eval_offset = [&](int stride, const std::vector<std::pair<int, int>>& offs) {
    std::vector<int> idx = node;
    for (const auto& [ax, off] : offs) {
      idx[static_cast<std::size_t>(ax)] += off * stride;
    }
    return value_at(idx);
  };

  const auto first_grid = [&](int stride) {
    std::vector<MatX<Scalar>> d(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const Scalar h = static_cast<Scalar>(grid.spacing[static_cast<std::size_t>(k)] * stride);
      MatX<Scalar> acc = MatX<Scalar>::Zero(n, n);
      for (const auto& [off, w] : detail::d1_stencil(opt.order)) {
        acc += static_cast<Scalar>(w) * eval_offset(stride, {{k, off}});
      }
      d[static_cast<std::size_t>(k)] = acc / h;
    }
    return d;
  };
  const auto second_grid = [&](int stride) {
    std::vector<std::vector<MatX<Scalar>>> dd(
        static_cast<std::size_t>(n), std::vector<MatX<Scalar>>(static_cast<std::size_t>(n)));
    for (int k = 0; k < n; ++k) {
      for (int l = k; l < n; ++l) {
        const Scalar hk = static_cast<Scalar>(grid.spacing[static_cast<std::size_t>(k)] * stride);
        const Scalar hl = static_cast<Scalar>(grid.spacing[static_cast<std::size_t>(l)] * stride);
        MatX<Scalar> acc = MatX<Scalar>::Zero(n, n);
        if (k == l) {
          for (const auto& [off, w] : detail::d2_stencil(opt.order)) {
            acc += static_cast<Scalar>(w) * eval_offset(stride, {{k, off}});
          }
          acc /= hk * hk;
        } else {
          for (const auto& [oa, wa] : detail::d1_stencil(opt.order)) {
            for (const auto& [ob, wb] : detail::d1_stencil(opt.order)) {
              acc += static_cast<Scalar>(wa * wb) * eval_offset(stride, {{k, oa}, {l, ob}});
            }
          }
          acc /= hk * hl;
        }
        dd[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = acc;
        dd[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = acc;
      }
    }
    return dd;
  };

  const double factor = std::pow(2.0, opt.order);
  if (opt.richardson) {
    auto fine = first_grid(1);
    auto coarse = first_grid(2);
    out.first.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      out.first[static_cast<std::size_t>(k)] =
          (static_cast<Scalar>(factor) * fine[static_cast<std::size_t>(k)] -
           coarse[static_cast<std::size_t>(k)]) /
          static_cast<Scalar>(factor - 1.0);
    }
  } else {
    out.first = first_grid(1);
  }
  if (deriv_order == 2) {
    if (opt.richardson) {
      auto fine = second_grid(1);
      auto coarse = second_grid(2);
      out.second.assign(static_cast<std::size_t>(n),
                        std::vector<MatX<Scalar>>(static_cast<std::size_t>(n)));
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          out.second[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
              (static_cast<Scalar>(factor) *
                   fine[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] -
               coarse[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) /
              static_cast<Scalar>(factor - 1.0);
        }
      }
    } else {
      out.second = second_grid(1);
    }
  }
  return out;
}

// Sample an analytic metric onto a lattice (periodic axes use period/n steps,
// interval axes n nodes inclusive of both ends).
template <typename Scalar>
MetricField<Scalar> sample_metric(const MetricField<Scalar>& src, const std::vector<int>& nodes) {
  if (src.kind != MetricField<Scalar>::Kind::Analytic) {
    throw InvalidArgument("sample_metric expects an analytic source");
  }
  const int n = src.chart.dim();
  if (static_cast<int>(nodes.size()) != n) {
    throw InvalidArgument("sample_metric: one node count per axis");
  }
  MetricField<Scalar> out(src.chart);
  out.kind = MetricField<Scalar>::Kind::Sampled;
  SampledGrid<Scalar>& g = out.grid;
  g.nodes = nodes;
  g.origin.resize(static_cast<std::size_t>(n));
  g.spacing.resize(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    const Axis& a = src.chart.axis(k);
    if (nodes[static_cast<std::size_t>(k)] < 4) {
      throw InvalidArgument("sample_metric: need at least 4 nodes per axis");
    }
    if (a.periodic) {
      g.origin[static_cast<std::size_t>(k)] = 0.0;
      g.spacing[static_cast<std::size_t>(k)] = a.period / nodes[static_cast<std::size_t>(k)];
    } else {
      g.origin[static_cast<std::size_t>(k)] = a.lo;
      g.spacing[static_cast<std::size_t>(k)] =
          (a.hi - a.lo) / (nodes[static_cast<std::size_t>(k)] - 1);
    }
    total *= static_cast<std::size_t>(nodes[static_cast<std::size_t>(k)]);
  }
  g.values.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t f = 0; f < total; ++f) {
    VecX<Scalar> x(n);
    for (int k = 0; k < n; ++k) {
      x[k] = static_cast<Scalar>(g.origin[static_cast<std::size_t>(k)] +
                                 g.spacing[static_cast<std::size_t>(k)] *
                                     idx[static_cast<std::size_t>(k)]);
    }
    g.values[g.flat_index(idx)] = src.components(x);
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < nodes[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

// One-variable warp f(t) with derivatives; represents dt^2 + f^2 g_e metrics.
template <typename Scalar>
struct WarpProfile {
  std::function<Scalar(Scalar)> f;
  std::function<Scalar(Scalar)> df;
  std::function<Scalar(Scalar)> ddf;
  bool periodic = false;
  double period = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  static WarpProfile analytic(std::function<Scalar(Scalar)> f, std::function<Scalar(Scalar)> df,
                              std::function<Scalar(Scalar)> ddf, double lo, double hi) {
    WarpProfile w;
    w.f = std::move(f);
    w.df = std::move(df);
    w.ddf = std::move(ddf);
    w.lo = lo;
    w.hi = hi;
    return w;
  }

  static WarpProfile analytic_periodic(std::function<Scalar(Scalar)> f,
                                       std::function<Scalar(Scalar)> df,
                                       std::function<Scalar(Scalar)> ddf, double period) {
    WarpProfile w;
    w.f = std::move(f);
    w.df = std::move(df);
    w.ddf = std::move(ddf);
    w.periodic = true;
    w.period = period;
    return w;
  }

  // Derivatives by central differences on f; order 2 or 4.
  static WarpProfile numeric(std::function<Scalar(Scalar)> f, double lo, double hi,
                             double h = 1e-4, int order = 4) {
    WarpProfile w;
    w.lo = lo;
    w.hi = hi;
    w.f = f;
    w.df = [f, h, order](Scalar t) {
      Scalar acc = 0;
      for (const auto& [off, wt] : detail::d1_stencil(order)) {
        acc += static_cast<Scalar>(wt) * f(t + static_cast<Scalar>(off * h));
      }
      return acc / static_cast<Scalar>(h);
    };
    w.ddf = [f, h, order](Scalar t) {
      Scalar acc = 0;
      for (const auto& [off, wt] : detail::d2_stencil(order)) {
        acc += static_cast<Scalar>(wt) * f(t + static_cast<Scalar>(off * h));
      }
      return acc / static_cast<Scalar>(h * h);
    };
    return w;
  }

  // f(t) = c e^{-t/c}: the rescaled cusp profile.
  static WarpProfile exp_warp(Scalar c, double t_max) {
    return analytic([c](Scalar t) { return c * std::exp(-t / c); },
                    [c](Scalar t) { return -std::exp(-t / c); },
                    [c](Scalar t) { return std::exp(-t / c) / c; }, 0.0, t_max);
  }

  static WarpProfile constant(Scalar value, double lo, double hi) {
    return analytic([value](Scalar) { return value; }, [](Scalar) { return Scalar(0); },
                    [](Scalar) { return Scalar(0); }, lo, hi);
  }
};

// dt^2 + f(t)^2 * fiber_scale * (dx^2 + dy^2) [+ dtheta^2].
// Fiber axes are unit-period circles, so fiber area = f^2 * fiber_scale.
template <typename Scalar>
MetricField<Scalar> warped_product_metric(const WarpProfile<Scalar>& w, Scalar fiber_scale,
                                          bool with_circle, double circle_len = 1.0) {
  if (!(fiber_scale > Scalar(0))) throw InvalidArgument("fiber scale must be > 0");
  std::vector<Axis> axes;
  axes.push_back(w.periodic ? Axis::circle("t", w.period) : Axis::interval("t", w.lo, w.hi));
  axes.push_back(Axis::circle("x", 1.0));
  axes.push_back(Axis::circle("y", 1.0));
  if (with_circle) axes.push_back(Axis::circle("theta", circle_len));
  Chart chart(std::move(axes));
  const int n = chart.dim();

  auto comp = [w, fiber_scale, n](const VecX<Scalar>& x) {
    MatX<Scalar> g = MatX<Scalar>::Identity(n, n);
    const Scalar f = w.f(x[0]);
    g(1, 1) = g(2, 2) = f * f * fiber_scale;
    return g;
  };
  auto m = MetricField<Scalar>::analytic(std::move(chart), comp);
  m.first_derivs = [w, fiber_scale, n](const VecX<Scalar>& x) {
    std::vector<MatX<Scalar>> d(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n));
    const Scalar f = w.f(x[0]);
    const Scalar fp = w.df(x[0]);
    d[0](1, 1) = d[0](2, 2) = Scalar(2) * f * fp * fiber_scale;
    return d;
  };
  m.second_derivs = [w, fiber_scale, n](const VecX<Scalar>& x) {
    std::vector<std::vector<MatX<Scalar>>> dd(
        static_cast<std::size_t>(n),
        std::vector<MatX<Scalar>>(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n)));
    const Scalar f = w.f(x[0]);
    const Scalar fp = w.df(x[0]);
    const Scalar fpp = w.ddf(x[0]);
    dd[0][0](1, 1) = dd[0][0](2, 2) = Scalar(2) * (fp * fp + f * fpp) * fiber_scale;
    return dd;
  };
  return m;
}

// Scalar field with optional analytic gradient and Hessian.
template <typename Scalar>
struct ScalarField {
  std::function<Scalar(const VecX<Scalar>&)> value;
  std::function<VecX<Scalar>(const VecX<Scalar>&)> grad;
  std::function<MatX<Scalar>(const VecX<Scalar>&)> hess;

  static ScalarField constant(Scalar v, int n) {
    ScalarField s;
    s.value = [v](const VecX<Scalar>&) { return v; };
    s.grad = [n](const VecX<Scalar>&) { return VecX<Scalar>::Zero(n).eval(); };
    s.hess = [n](const VecX<Scalar>&) { return MatX<Scalar>::Zero(n, n).eval(); };
    return s;
  }
};

// u(x)^p * g. Derivative callbacks are composed when both factors provide
// them; otherwise the scaled metric exposes components only and difference
// stencils take over.
template <typename Scalar>
MetricField<Scalar> conformal_scale(const MetricField<Scalar>& m, const ScalarField<Scalar>& u,
                                    Scalar p) {
  if (m.kind != MetricField<Scalar>::Kind::Analytic) {
    throw InvalidArgument("conformal_scale expects an analytic metric");
  }
  const int n = m.chart.dim();
  auto base_comp = m.components;
  auto scaled = MetricField<Scalar>::analytic(m.chart, [base_comp, u, p](const VecX<Scalar>& x) {
    return (std::pow(u.value(x), p) * base_comp(x)).eval();
  });
  if (m.first_derivs && m.second_derivs && u.grad && u.hess) {
    auto base_d1 = m.first_derivs;
    auto base_d2 = m.second_derivs;
    scaled.first_derivs = [base_comp, base_d1, u, p, n](const VecX<Scalar>& x) {
      const Scalar uv = u.value(x);
      const VecX<Scalar> du = u.grad(x);
      const MatX<Scalar> g = base_comp(x);
      const auto dg = base_d1(x);
      std::vector<MatX<Scalar>> d(static_cast<std::size_t>(n));
      const Scalar up = std::pow(uv, p);
      const Scalar upm1 = p * std::pow(uv, p - 1);
      for (int k = 0; k < n; ++k) {
        d[static_cast<std::size_t>(k)] = upm1 * du[k] * g + up * dg[static_cast<std::size_t>(k)];
      }
      return d;
    };
    scaled.second_derivs = [base_comp, base_d1, base_d2, u, p, n](const VecX<Scalar>& x) {
      const Scalar uv = u.value(x);
      const VecX<Scalar> du = u.grad(x);
      const MatX<Scalar> hu = u.hess(x);
      const MatX<Scalar> g = base_comp(x);
      const auto dg = base_d1(x);
      const auto ddg = base_d2(x);
      const Scalar up = std::pow(uv, p);
      const Scalar upm1 = p * std::pow(uv, p - 1);
      const Scalar upm2 = p * (p - 1) * std::pow(uv, p - 2);
      std::vector<std::vector<MatX<Scalar>>> dd(
          static_cast<std::size_t>(n), std::vector<MatX<Scalar>>(static_cast<std::size_t>(n)));
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          dd[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
              upm2 * du[k] * du[l] * g + upm1 * hu(k, l) * g +
              upm1 * (du[k] * dg[static_cast<std::size_t>(l)] +
                      du[l] * dg[static_cast<std::size_t>(k)]) +
              up * ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
        }
      }
      return dd;
    };
  }
  return scaled;
}

}  // namespace niclab
