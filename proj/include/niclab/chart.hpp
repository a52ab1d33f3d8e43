#pragma once

#include "niclab/core.hpp"

namespace niclab {

struct Axis {
  std::string name;
  bool periodic = false;
  double period = 0.0;  // > 0 when periodic
  double lo = 0.0;      // closed interval when not periodic
  double hi = 0.0;

  static Axis circle(std::string name, double period) {
    if (!(period > 0.0)) throw InvalidArgument("axis period must be > 0");
    Axis a;
    a.name = std::move(name);
    a.periodic = true;
    a.period = period;
    return a;
  }
  static Axis interval(std::string name, double lo, double hi) {
    if (!(lo < hi)) throw InvalidArgument("axis interval must be nonempty");
    Axis a;
    a.name = std::move(name);
    a.lo = lo;
    a.hi = hi;
    return a;
  }
};

// Product chart of interval and circle axes, dimension 3 or 4.
class Chart {
 public:
  explicit Chart(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.size() != 3 && axes_.size() != 4) {
      throw InvalidArgument("chart dimension must be 3 or 4");
    }
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int k) const { return axes_.at(static_cast<std::size_t>(k)); }
  const std::vector<Axis>& axes() const { return axes_; }

  // Wrap periodic coordinates into [0, period); interval coordinates pass
  // through after a containment check.
  template <typename Scalar>
  VecX<Scalar> wrap(VecX<Scalar> x) const {
    check_dim(static_cast<int>(x.size()));
    for (int k = 0; k < dim(); ++k) {
      const Axis& a = axes_[static_cast<std::size_t>(k)];
      if (a.periodic) {
        const Scalar p = static_cast<Scalar>(a.period);
        Scalar v = std::fmod(x[k], p);
        if (v < Scalar(0)) v += p;
        x[k] = v;
      } else if (x[k] < static_cast<Scalar>(a.lo) || x[k] > static_cast<Scalar>(a.hi)) {
        throw OutOfDomain("coordinate " + a.name + " outside its interval");
      }
    }
    return x;
  }

  // Offset evaluation points used by difference stencils must stay inside
  // interval axes; periodic axes wrap instead.
  template <typename Scalar>
  void require_stencil_inside(const VecX<Scalar>& x, int axis, Scalar reach) const {
    const Axis& a = axes_.at(static_cast<std::size_t>(axis));
    if (a.periodic) return;
    if (x[axis] - reach < static_cast<Scalar>(a.lo) ||
        x[axis] + reach > static_cast<Scalar>(a.hi)) {
      throw StencilOutOfDomain("stencil along " + a.name + " leaves the chart interval");
    }
  }

  int axis_index(const std::string& name) const {
    for (int k = 0; k < dim(); ++k) {
      if (axes_[static_cast<std::size_t>(k)].name == name) return k;
    }
    throw InvalidArgument("no axis named " + name);
  }

 private:
  void check_dim(int n) const {
    if (n != dim()) throw InvalidArgument("point dimension does not match chart");
  }

  std::vector<Axis> axes_;
};

}  // namespace niclab
