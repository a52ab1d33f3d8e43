#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "niclab/catalog.hpp"
#include "niclab/glue.hpp"

using namespace niclab;

namespace {

VecX<double> pt(std::initializer_list<double> xs) {
  VecX<double> x(static_cast<int>(xs.size()));
  int i = 0;
  for (double v : xs) x[i++] = v;
  return x;
}

}  // namespace

TEST_CASE("bump: plateaus, monotonicity, range, derivative bounds") {
  BumpFunction<double> phi;
  CHECK(phi.value(-3.0) == 1.0);
  CHECK(phi.value(0.0) == 1.0);
  CHECK(phi.value(0.5) == 0.0);
  CHECK(phi.value(2.0) == 0.0);
  CHECK(phi.d1(-0.1) == 0.0);
  CHECK(phi.d2(0.7) == 0.0);

  double prev = 1.0;
  double max_d1 = 0.0, max_d2 = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double t = -0.1 + 0.7 * i / 20000.0;
    const double v = phi.value(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
    max_d1 = std::max(max_d1, std::abs(phi.d1(t)));
    max_d2 = std::max(max_d2, std::abs(phi.d2(t)));
  }
  // sup |phi'| is exactly 8, attained at t = 1/4 where phi' = -h'(1/4)/(2 h(1/4))
  CHECK(max_d1 <= 8.0 + 1e-9);
  CHECK(max_d1 == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(max_d2 <= 100.0);
  std::printf("bump derivative maxima: |phi'| = %.6f, |phi''| = %.6f\n", max_d1, max_d2);
}

TEST_CASE("bump: analytic derivatives match difference quotients") {
  BumpFunction<double> phi;
  for (double t : {0.05, 0.17, 0.25, 0.33, 0.45}) {
    const double h = 1e-6;
    const double fd1 = (phi.value(t + h) - phi.value(t - h)) / (2 * h);
    CHECK(phi.d1(t) == doctest::Approx(fd1).epsilon(1e-6));
    // wider step for the second difference; 1e-6 would sit on the
    // cancellation floor near zeros of phi''
    const double h2 = 1e-4;
    const double fd2 = (phi.value(t + h2) - 2 * phi.value(t) + phi.value(t - h2)) / (h2 * h2);
    CHECK(std::abs(phi.d2(t) - fd2) < 1e-3);
  }
}

TEST_CASE("warp_fc: plateau values and the branch agreement at t = a(c)") {
  for (double c : {2.0, 8.0, 32.0}) {
    GluedFamily<double> fam(c);
    const double a = fam.a();
    CHECK(a == doctest::Approx(c * std::log(c)).epsilon(1e-15));

    CHECK(warp_fc(fam, 0.0).f == doctest::Approx(c).epsilon(1e-14));
    CHECK(warp_fc(fam, a).f == doctest::Approx(1.0).epsilon(1e-13));
    // pure cusp branch below a
    const double t1 = 0.5 * a;
    CHECK(warp_fc(fam, t1).f == doctest::Approx(c * std::exp(-t1 / c)).epsilon(1e-14));
    // flat branch beyond a + 1/2 (exactly flat at a + 1)
    for (double t : {a + 0.5, a + 0.75, a + 1.0, a + 3.0}) {
      const auto jet = warp_fc(fam, t);
      CHECK(jet.f == 1.0);
      CHECK(jet.df == 0.0);
      CHECK(jet.ddf == 0.0);
    }
  }
}

TEST_CASE("warp_fc is C^2 across the seams t = a and t = a + 1/2") {
  GluedFamily<double> fam(8.0);
  const double a = fam.a();
  const double eps = 1e-5;
  for (double seam : {a, a + 0.5}) {
    const auto left = warp_fc(fam, seam - eps);
    const auto mid = warp_fc(fam, seam);
    const auto right = warp_fc(fam, seam + eps);
    // one-sided difference quotients of f' against each other
    const double from_left = (mid.df - left.df) / eps;
    const double from_right = (right.df - mid.df) / eps;
    CHECK(std::abs(from_left - from_right) < 1e-6);
    CHECK(std::abs(mid.ddf - from_right) < 1e-6);
    CHECK(std::abs(left.ddf - right.ddf) < 1e-4 * std::max(1.0, std::abs(mid.ddf)) + 1e-9);
  }
}

TEST_CASE("band bound: 1/2 < c e^{-t/c} <= 1 on [a, a+1]") {
  GluedFamily<double> f8(8.0);
  auto r8 = band_bound_check(f8);
  CHECK(r8.lo == doctest::Approx(std::exp(-1.0 / 8.0)).epsilon(1e-14));
  CHECK(r8.hi == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r8.ok);

  GluedFamily<double> f2(2.0);
  auto r2 = band_bound_check(f2);
  CHECK(r2.lo == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(r2.lo > 0.5);
  CHECK(r2.ok);

  GluedFamily<double> f512(512.0);
  CHECK(band_bound_check(f512).ok);

  // dense sampling stays inside the closed-form envelope
  const double a = f2.a();
  for (int i = 0; i <= 1000; ++i) {
    const double t = a + i / 1000.0;
    const double v = 2.0 * std::exp(-t / 2.0);
    CHECK(v >= r2.lo - 1e-12);
    CHECK(v <= r2.hi + 1e-12);
  }

  // the boundary case c = 1/log 2 is rejected
  CHECK_THROWS_AS(GluedFamily<double>(1.0 / std::log(2.0)), BoundViolated);
  CHECK_THROWS_AS(GluedFamily<double>(1.2), BoundViolated);
}

TEST_CASE("c2 distance: flat plateau contributes zero, cusp term bounds C^0 part") {
  GluedFamily<double> fam(16.0);
  const double a = fam.a();
  // beyond a + 1/2 the jet is exactly flat
  const auto jet = warp_fc(fam, a + 0.9);
  CHECK(std::max({std::abs(jet.f * jet.f - 1.0), std::abs(2 * jet.f * jet.df),
                  std::abs(2 * (jet.df * jet.df + jet.f * jet.ddf))}) == 0.0);
  // |f^2 - 1| <= 1 - e^{-2/c} on the band
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double t = a + i / 2000.0;
    worst = std::max(worst, std::abs(std::pow(warp_fc(fam, t).f, 2) - 1.0));
  }
  CHECK(worst <= 1.0 - std::exp(-2.0 / 16.0) + 1e-12);
}

TEST_CASE("c2 distance sweep: bounded by 1.1x the value at the smallest c") {
  std::vector<double> cs = {8.0, 32.0, 128.0, 512.0};
  std::vector<double> ds;
  for (double c : cs) {
    GluedFamily<double> fam(c);
    ds.push_back(c2_distance_band(fam));
  }
  std::printf("c2_distance_band:");
  for (std::size_t i = 0; i < cs.size(); ++i) std::printf(" d(%g) = %.8f", cs[i], ds[i]);
  std::printf("\n");
  const double bound = 1.1 * ds[0];
  for (double d : ds) CHECK(d <= bound);
  for (double d : ds) CHECK(d > 0.0);
}

TEST_CASE("glued band metric reproduces the cusp below a and flat beyond a+1") {
  GluedFamily<double> fam(4.0);
  auto m = glued_band_metric(fam, 1.0);
  const double a = fam.a();
  auto inside = curvature_at(m, pt({0.4 * a, 0.3, 0.6, 0.2}));
  CHECK(inside.scalar == doctest::Approx(-6.0 / 16.0).epsilon(1e-11));
  CHECK(inside.weyl_norm < 1e-11);
  auto beyond = curvature_at(m, pt({a + 1.2, 0.3, 0.6, 0.2}));
  CHECK(std::abs(beyond.scalar) < 1e-12);
  CHECK(beyond.weyl_norm < 1e-12);
}

TEST_CASE("Eq-(4)-type scaling: engine cusp quadrature matches the closed form") {
  for (double c : {2.0, 8.0, 32.0}) {
    GluedFamily<double> fam(c);
    const double a = fam.a();
    auto m = cusp_metric<double>(c, 1.0, a + 2.0);
    Region r;
    r.bounds = {{0.0, a}, {0.0, 1.0}, {0.0, 1.0}};
    r.intervals = {1024, 2, 2};
    const double engine = integrate_density(
        m, [&](const VecX<double>& x) { return curvature_at(m, x).scalar; }, r);
    // slab t <= a in the rescaled coordinate is depth a/c of the g_H cusp
    const double closed = -6.0 * c * (0.5 * (1.0 - std::exp(-2.0 * a / c)));
    CHECK(relative_gap(engine, closed) < 1e-8);
  }
}

TEST_CASE("functional F: table anchors, band boundedness, eventual negativity") {
  GluedFamily<double> proto(2.0);
  std::vector<double> cs = {2.0, 4.0, 8.0, 16.0};
  auto rows = functional_F(proto, cs, 1.0 / 6.0, 128);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].c == cs[i]);
    CHECK(rows[i].bulk_w == 0.0);
    CHECK(rows[i].cap_s == 0.0);
    CHECK(rows[i].cap_w == 0.0);
    const double a = rows[i].a_c;
    const double closed = -6.0 * cs[i] * (1.0 + 0.5 * (1.0 - std::exp(-2.0 * a / cs[i])));
    CHECK(rows[i].bulk_s == doctest::Approx(closed).epsilon(1e-12));
    CHECK(rows[i].band_w >= 0.0);
    CHECK(rows[i].value < 0.0);
  }
  // band contributions bounded by twice the smallest-c value
  const double band0 = std::abs(rows[0].band_s) + std::abs(rows[0].band_w);
  for (const auto& row : rows) {
    CHECK(std::abs(row.band_s) + std::abs(row.band_w) <= 2.0 * band0 + 1e-12);
  }
  auto c_star = negative_crossing(rows);
  REQUIRE(c_star.has_value());
  CHECK(*c_star == 2.0);
  std::printf("F table: ");
  for (const auto& row : rows) std::printf("F(%g) = %.6f  ", row.c, row.value);
  std::printf("\n");
}

TEST_CASE("functional F: fitted slope matches -(vol0 + area/2) l within 5%") {
  GluedFamily<double> proto(64.0);
  std::vector<double> cs = {64.0, 128.0, 256.0, 512.0};
  auto rows = functional_F(proto, cs, 1.0 / 6.0, 256);
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    xs.push_back(row.c);
    ys.push_back(row.value);
  }
  const double slope = fitted_slope(xs, ys);
  const double expected = -(1.0 + 0.5) * 1.0;
  CHECK(std::abs(slope - expected) < 0.05 * std::abs(expected));
  std::printf("F slope over {64..512}: %.6f (expected %.2f)\n", slope, expected);
}

TEST_CASE("functional F: adversarial caps keep F positive on a small sweep") {
  GluedFamily<double> proto(2.0);
  proto.s_cap = 1e5;
  proto.w_cap = 10.0;
  auto rows = functional_F(proto, {2.0, 3.0, 4.0}, 1.0 / 6.0, 64);
  for (const auto& row : rows) CHECK(row.value > 0.0);
  CHECK(!negative_crossing(rows).has_value());
}

TEST_CASE("a(c) variant: c log(c/2) is exposed and changes the band") {
  GluedFamily<double> fam(8.0);
  fam.log_half_variant = true;
  CHECK(fam.a() == doctest::Approx(8.0 * std::log(4.0)).epsilon(1e-15));
  CHECK(warp_fc(fam, fam.a()).f == doctest::Approx(2.0).epsilon(1e-13));
  auto rep = band_bound_check(fam);
  CHECK(rep.hi == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(!rep.ok);  // the (1/2, 1] envelope is specific to a(c) = c log c
}

TEST_CASE("no-go identity: int s dV = 2 l Area int f'^2 dt on closed warps") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng(314, i);
    const double period = 2.0 + rng.uniform();
    const double a1 = 0.05 + 0.15 * rng.uniform();
    const double a2 = 0.05 + 0.10 * rng.uniform();
    const double p1 = rng.uniform(0.0, 6.28);
    const double p2 = rng.uniform(0.0, 6.28);
    const double w = 2.0 * 3.14159265358979323846 / period;
    auto profile = WarpProfile<double>::analytic_periodic(
        [=](double t) {
          return 1.0 + a1 * std::sin(w * t + p1) + a2 * std::sin(2 * w * t + p2);
        },
        [=](double t) {
          return a1 * w * std::cos(w * t + p1) + 2 * a2 * w * std::cos(2 * w * t + p2);
        },
        [=](double t) {
          return -a1 * w * w * std::sin(w * t + p1) - 4 * a2 * w * w * std::sin(2 * w * t + p2);
        },
        period);
    const double area = 0.5 + rng.uniform();
    const double ell = 0.5 + rng.uniform();
    auto rep = nogo_scalar_identity(profile, area, ell, 512);
    CHECK(rep.rel_gap < 1e-6);
    CHECK(rep.byparts_integral >= 0.0);
  }
}
