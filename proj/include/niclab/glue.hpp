#pragma once

#include <optional>

#include "niclab/bump.hpp"
#include "niclab/curvature.hpp"
#include "niclab/quadrature.hpp"

namespace niclab {

// The parameterized glued construction: rescaled hyperbolic bulk, warp f_c
// interpolating the cusp profile down to 1 over [a(c), a(c)+1], and a fixed
// cap carrying c-independent integral constants.
template <typename Scalar>
struct GluedFamily {
  Scalar c;
  bool log_half_variant = false;  // a(c) = c log(c/2) instead of c log c
  Scalar vol0 = 1;                // hyperbolic volume of the truncated bulk N_0
  Scalar area = 1;                // flat cross-section torus area
  Scalar circle_len = 1;          // length of the S^1 factor
  Scalar s_cap = 0;               // cap integral of s for the fixed extension
  Scalar w_cap = 0;               // cap integral of |W|
  BumpFunction<Scalar> bump{};

  explicit GluedFamily(Scalar c_in) : c(c_in) {
    if (!(c > Scalar(1) / std::log(Scalar(2)))) {
      throw BoundViolated("glued family needs c > 1/log 2");
    }
  }

  Scalar a() const { return log_half_variant ? c * std::log(c / Scalar(2)) : c * std::log(c); }

  GluedFamily with_c(Scalar c_new) const {
    GluedFamily fam = *this;
    fam.c = c_new;
    if (!(c_new > Scalar(1) / std::log(Scalar(2)))) {
      throw BoundViolated("glued family needs c > 1/log 2");
    }
    return fam;
  }
};

template <typename Scalar>
struct WarpJet {
  Scalar f = 0;
  Scalar df = 0;
  Scalar ddf = 0;
};

// f_c(t) = phi(t - a) c e^{-t/c} + 1 - phi(t - a), with analytic derivatives.
template <typename Scalar>
WarpJet<Scalar> warp_fc(const GluedFamily<Scalar>& fam, Scalar t) {
  const Scalar tau = t - fam.a();
  const Scalar phi = fam.bump.value(tau);
  const Scalar dphi = fam.bump.d1(tau);
  const Scalar ddphi = fam.bump.d2(tau);
  const Scalar u = fam.c * std::exp(-t / fam.c);
  const Scalar du = -std::exp(-t / fam.c);
  const Scalar ddu = std::exp(-t / fam.c) / fam.c;
  WarpJet<Scalar> jet;
  jet.f = Scalar(1) + phi * (u - Scalar(1));
  jet.df = dphi * (u - Scalar(1)) + phi * du;
  jet.ddf = ddphi * (u - Scalar(1)) + Scalar(2) * dphi * du + phi * ddu;
  return jet;
}

template <typename Scalar>
WarpProfile<Scalar> glued_warp_profile(const GluedFamily<Scalar>& fam, double t_max) {
  return WarpProfile<Scalar>::analytic(
      [fam](Scalar t) { return warp_fc(fam, t).f; },
      [fam](Scalar t) { return warp_fc(fam, t).df; },
      [fam](Scalar t) { return warp_fc(fam, t).ddf; }, 0.0, t_max);
}

// k_c + dtheta^2 as a 4-metric on [0, a(c)+1+pad] x T^2 x S^1.
template <typename Scalar>
MetricField<Scalar> glued_band_metric(const GluedFamily<Scalar>& fam, double pad = 1.0) {
  const double t_max = static_cast<double>(fam.a()) + 1.0 + pad;
  return warped_product_metric<Scalar>(glued_warp_profile(fam, t_max), fam.area,
                                       /*with_circle=*/true,
                                       static_cast<double>(fam.circle_len));
}

template <typename Scalar>
struct BandBoundReport {
  Scalar lo = 0;      // min of c e^{-t/c} on [a, a+1]
  Scalar hi = 0;      // max (left endpoint)
  bool ok = false;    // 1/2 < lo and hi <= 1
};

// Range of c e^{-t/c} over the deformation band; monotone, so the closed
// form is the endpoint pair. Sampled in tests for confirmation.
template <typename Scalar>
BandBoundReport<Scalar> band_bound_check(const GluedFamily<Scalar>& fam) {
  BandBoundReport<Scalar> rep;
  const Scalar a = fam.a();
  rep.hi = fam.c * std::exp(-a / fam.c);
  rep.lo = fam.c * std::exp(-(a + Scalar(1)) / fam.c);
  // equality at the left endpoint, evaluated in floating point
  rep.ok = rep.lo > Scalar(0.5) && rep.hi <= Scalar(1) + Scalar(1e-12);
  return rep;
}

// sup over the band of max(|f^2 - 1|, |(f^2)'|, |(f^2)''|): the component
// C^2 deviation of k_c from the flat product dt^2 + g_e.
template <typename Scalar>
Scalar c2_distance_band(const GluedFamily<Scalar>& fam, int samples = 4096) {
  const Scalar a = fam.a();
  const auto deviation = [&fam](Scalar t) {
    const auto jet = warp_fc(fam, t);
    const Scalar c0 = std::abs(jet.f * jet.f - Scalar(1));
    const Scalar c1 = std::abs(Scalar(2) * jet.f * jet.df);
    const Scalar c2 = std::abs(Scalar(2) * (jet.df * jet.df + jet.f * jet.ddf));
    return std::max({c0, c1, c2});
  };
  Scalar best = 0;
  Scalar best_t = a;
  const Scalar h = Scalar(1) / static_cast<Scalar>(samples);
  for (int i = 0; i <= samples; ++i) {
    const Scalar t = a + static_cast<Scalar>(i) * h;
    const Scalar v = deviation(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  // two refinement passes around the best coarse sample
  Scalar window = h;
  for (int pass = 0; pass < 2; ++pass) {
    const Scalar lo = std::max(a, best_t - window);
    const Scalar hi = std::min(a + Scalar(1), best_t + window);
    for (int i = 0; i <= 64; ++i) {
      const Scalar t = lo + (hi - lo) * static_cast<Scalar>(i) / Scalar(64);
      const Scalar v = deviation(t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    window /= Scalar(32);
  }
  return best;
}

// Closed-form hyperbolic volume of the bulk truncated where the band
// starts: N_0 plus the cusp slab t <= a(c) in the rescaled coordinate,
// which is depth a(c)/c in the unscaled cusp.
template <typename Scalar>
Scalar bulk_hyperbolic_volume(const GluedFamily<Scalar>& fam) {
  const Scalar a = fam.a();
  return fam.vol0 + fam.area / Scalar(2) * (Scalar(1) - std::exp(Scalar(-2) * a / fam.c));
}

// Scalar integral over the bulk 3-manifold alone (no circle factor):
// int_{N_a} s dV = -6 c Vol(N_a, g_H).
template <typename Scalar>
Scalar bulk_scalar_integral_3d(const GluedFamily<Scalar>& fam) {
  return Scalar(-6) * fam.c * bulk_hyperbolic_volume(fam);
}

template <typename Scalar>
struct FunctionalRow {
  Scalar c = 0;
  Scalar a_c = 0;
  Scalar bulk_s = 0;  // closed-form scalar integral over N_a x S^1
  Scalar band_s = 0;  // engine quadrature over the deformation band
  Scalar cap_s = 0;
  Scalar bulk_w = 0;  // exactly zero: conformally flat product
  Scalar band_w = 0;
  Scalar cap_w = 0;
  Scalar value = 0;  // F = mu (sum of s parts) + (sum of |W| parts)
  Scalar c2_distance = 0;
};

// Band integrals run through the full curvature engine on the warped
// 4-metric; fibers are exact for the tensor Simpson rule since the integrand
// depends on t alone.
template <typename Scalar>
FunctionalRow<Scalar> functional_F_at(const GluedFamily<Scalar>& fam, Scalar mu,
                                      int band_intervals = 256,
                                      const CurvatureOptions& opt = {}) {
  FunctionalRow<Scalar> row;
  row.c = fam.c;
  row.a_c = fam.a();
  row.bulk_s = bulk_scalar_integral_3d(fam) * fam.circle_len;
  row.bulk_w = 0;
  row.cap_s = fam.s_cap;
  row.cap_w = fam.w_cap;

  const MetricField<Scalar> band = glued_band_metric(fam, /*pad=*/0.25);
  Region r;
  r.bounds = {{static_cast<double>(row.a_c), static_cast<double>(row.a_c) + 1.0},
              {0.0, 1.0},
              {0.0, 1.0},
              {0.0, static_cast<double>(fam.circle_len)}};
  r.intervals = {band_intervals, 2, 2, 2};
  row.band_s = integrate_density(
      band, [&](const VecX<Scalar>& x) { return curvature_at(band, x, opt).scalar; }, r);
  row.band_w = integrate_density(
      band, [&](const VecX<Scalar>& x) { return curvature_at(band, x, opt).weyl_norm; }, r);

  row.value = mu * (row.bulk_s + row.band_s + row.cap_s) + row.bulk_w + row.band_w + row.cap_w;
  row.c2_distance = c2_distance_band(fam);
  return row;
}

template <typename Scalar>
std::vector<FunctionalRow<Scalar>> functional_F(const GluedFamily<Scalar>& prototype,
                                                const std::vector<Scalar>& c_grid, Scalar mu,
                                                int band_intervals = 256,
                                                const CurvatureOptions& opt = {}) {
  std::vector<FunctionalRow<Scalar>> rows;
  rows.reserve(c_grid.size());
  for (const Scalar c : c_grid) {
    rows.push_back(functional_F_at(prototype.with_c(c), mu, band_intervals, opt));
  }
  return rows;
}

// Smallest grid c from which F stays negative through the end of the sweep.
template <typename Scalar>
std::optional<Scalar> negative_crossing(const std::vector<FunctionalRow<Scalar>>& rows) {
  std::optional<Scalar> c_star;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->value < Scalar(0)) {
      c_star = it->c;
    } else {
      break;
    }
  }
  return c_star;
}

// Integration-by-parts identity for closed warped profiles:
// int s dV of dt^2 + f^2 g_e + dtheta^2 over a circle in t equals
// 2 l Area int f'^2 dt. Validates the quadrature and shows the negative bulk
// constant, not the warp, is what pulls F below zero.
template <typename Scalar>
struct NoGoReport {
  Scalar engine_integral = 0;
  Scalar byparts_integral = 0;
  Scalar rel_gap = 0;
};

template <typename Scalar>
NoGoReport<Scalar> nogo_scalar_identity(const WarpProfile<Scalar>& profile, Scalar area,
                                        Scalar circle_len, int intervals = 512,
                                        const CurvatureOptions& opt = {}) {
  if (!profile.periodic) throw InvalidArgument("no-go identity needs a periodic warp");
  const MetricField<Scalar> m = warped_product_metric<Scalar>(profile, area, true,
                                                              static_cast<double>(circle_len));
  Region r = Region::full(m.chart, {intervals, 2, 2, 2});
  NoGoReport<Scalar> rep;
  rep.engine_integral = integrate_density(
      m, [&](const VecX<Scalar>& x) { return curvature_at(m, x, opt).scalar; }, r);
  Region line;
  line.bounds = {{0.0, profile.period}};
  line.intervals = {intervals};
  rep.byparts_integral =
      Scalar(2) * circle_len * area *
      integrate<Scalar>(
          [&](const VecX<Scalar>& x) {
            const Scalar d = profile.df(x[0]);
            return d * d;
          },
          line);
  rep.rel_gap = relative_gap(rep.engine_integral, rep.byparts_integral);
  return rep;
}

}  // namespace niclab
