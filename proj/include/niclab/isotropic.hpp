#pragma once

#include <complex>

#include "niclab/curvature.hpp"
#include "niclab/quadrature.hpp"

namespace niclab {

// Isotropic 2-planes are parameterized by orthonormal 4-frames: the plane is
// spanned by v = e1 + i e2, w = e3 + i e4. In the frame components of a
// curvature record the plane is a rotation O in O(4) applied to the record's
// own frame.
template <typename Scalar>
struct IsotropicPlane {
  MatX<Scalar> frame;  // columns e1..e4, orthonormal

  static IsotropicPlane standard() { return {MatX<Scalar>::Identity(4, 4)}; }
};

template <typename Scalar>
void require_orthonormal(const MatX<Scalar>& rot, Scalar tol = Scalar(1e-9)) {
  if (rot.rows() != 4 || rot.cols() != 4) {
    throw FrameNotOrthonormal("isotropic planes need a 4-frame");
  }
  const Scalar err =
      (rot.transpose() * rot - MatX<Scalar>::Identity(4, 4)).cwiseAbs().maxCoeff();
  if (err > tol) throw FrameNotOrthonormal("frame is not orthonormal");
}

// Complex-bilinear products of the plane's spanning vectors; zero exactly
// when the frame is orthonormal.
template <typename Scalar>
Scalar isotropy_defect(const MatX<Scalar>& rot) {
  using C = std::complex<Scalar>;
  Eigen::Matrix<C, 4, 1> v, w;
  for (int a = 0; a < 4; ++a) {
    v[a] = C(rot(a, 0), rot(a, 1));
    w[a] = C(rot(a, 2), rot(a, 3));
  }
  C vv(0), ww(0), vw(0);
  for (int a = 0; a < 4; ++a) {
    vv += v[a] * v[a];
    ww += w[a] * w[a];
    vw += v[a] * w[a];
  }
  return std::max({std::abs(vv), std::abs(ww), std::abs(vw)});
}

namespace detail {

// Bivector components of v ^ w over the lexicographic pair basis.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 6, 1> plane_bivector(const MatX<Scalar>& rot) {
  using C = std::complex<Scalar>;
  Eigen::Matrix<C, 4, 1> v, w;
  for (int a = 0; a < 4; ++a) {
    v[a] = C(rot(a, 0), rot(a, 1));
    w[a] = C(rot(a, 2), rot(a, 3));
  }
  const auto& pairs = lambda2_pairs(4);
  Eigen::Matrix<C, 6, 1> alpha;
  for (int I = 0; I < 6; ++I) {
    const auto [a, b] = pairs[static_cast<std::size_t>(I)];
    alpha[I] = v[a] * w[b] - v[b] * w[a];
  }
  return alpha;
}

}  // namespace detail

// Route (a): <R(v^w), conj(v)^conj(w)> by complexified arithmetic on the
// 2-form operator.
template <typename Scalar>
Scalar isotropic_curvature_complexified(const OpX<Scalar>& riem_op, const MatX<Scalar>& rot) {
  const auto alpha = detail::plane_bivector(rot);
  std::complex<Scalar> acc(0);
  for (int I = 0; I < 6; ++I) {
    for (int J = 0; J < 6; ++J) {
      acc += std::conj(alpha[I]) * riem_op(I, J) * alpha[J];
    }
  }
  return acc.real();
}

// Route (b): the real expansion K = R1313 + R1414 + R2323 + R2424 - 2 R1234
// in the plane's own frame.
template <typename Scalar>
Scalar isotropic_curvature_expansion(const Tensor4<Scalar>& riem, const MatX<Scalar>& rot) {
  const Tensor4<Scalar> r = transform_tensor4(riem, rot);
  return r(0, 2, 0, 2) + r(0, 3, 0, 3) + r(1, 2, 1, 2) + r(1, 3, 1, 3) - 2 * r(0, 1, 2, 3);
}

template <typename Scalar>
struct IsotropicRoutes {
  Scalar complexified = 0;
  Scalar expansion = 0;
  Scalar gap = 0;
};

template <typename Scalar>
IsotropicRoutes<Scalar> isotropic_curvature_routes(const CurvaturePointData<Scalar>& data,
                                                   const IsotropicPlane<Scalar>& plane) {
  require_orthonormal(plane.frame);
  IsotropicRoutes<Scalar> r;
  r.complexified = isotropic_curvature_complexified(data.riem_op, plane.frame);
  r.expansion = isotropic_curvature_expansion(data.riem, plane.frame);
  r.gap = std::abs(r.complexified - r.expansion);
  return r;
}

template <typename Scalar>
Scalar isotropic_curvature(const CurvaturePointData<Scalar>& data,
                           const IsotropicPlane<Scalar>& plane) {
  require_orthonormal(plane.frame);
  return isotropic_curvature_complexified(data.riem_op, plane.frame);
}

enum class Verdict { NIC, PIC, Indefinite };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NIC: return "NIC";
    case Verdict::PIC: return "PIC";
    default: return "INDEFINITE";
  }
}

template <typename Scalar>
struct IsotropicVerdict {
  Scalar k_min = 0;
  Scalar k_max = 0;
  Scalar sigma = 0;  // s/6 + |W|
  Scalar q_max = 0;  // top eigenvalue of (s/6) I - W
  Verdict verdict = Verdict::Indefinite;
  long evaluations = 0;
  int rounds = 0;
};

struct SearchBudget {
  int samples = 512;
  int refinements = 64;
  std::uint64_t seed = 0;
  int max_doublings = 4;
  double stabilize_tol = 1e-8;
};

namespace detail {

template <typename Scalar>
MatX<Scalar> haar_rotation(Rng& rng) {
  MatX<Scalar> a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = static_cast<Scalar>(rng.normal());
  Eigen::HouseholderQR<MatX<Scalar>> qr(a);
  MatX<Scalar> q = qr.householderQ() * MatX<Scalar>::Identity(4, 4);
  const MatX<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int j = 0; j < 4; ++j) {
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  }
  return q;
}

template <typename Scalar>
MatX<Scalar> givens4(int p, int q, Scalar theta) {
  MatX<Scalar> g = MatX<Scalar>::Identity(4, 4);
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  g(p, p) = c;
  g(q, q) = c;
  g(p, q) = -s;
  g(q, p) = s;
  return g;
}

// Pattern search over the six rotation planes; `direction` +1 maximizes.
template <typename Scalar>
std::pair<Scalar, MatX<Scalar>> refine_extremum(const OpX<Scalar>& riem_op, MatX<Scalar> rot,
                                                Scalar value, int sweeps, Scalar direction,
                                                long& evaluations) {
  const auto& pairs = lambda2_pairs(4);
  Scalar step = Scalar(0.25);
  for (int sweep = 0; sweep < sweeps && step > Scalar(1e-12); ++sweep) {
    bool improved = false;
    for (const auto& [p, q] : pairs) {
      for (const Scalar sgn : {Scalar(1), Scalar(-1)}) {
        const MatX<Scalar> cand = rot * givens4(p, q, sgn * step);
        const Scalar kv = isotropic_curvature_complexified(riem_op, cand);
        ++evaluations;
        if (direction * (kv - value) > Scalar(0)) {
          rot = cand;
          value = kv;
          improved = true;
        }
      }
    }
    if (!improved) step *= Scalar(0.5);
  }
  return {value, rot};
}

}  // namespace detail

// Extremal isotropic curvatures by Haar-like frame sampling plus
// coordinate-ascent refinement; the sample budget doubles until both
// extremes stabilize. Draws use one stream per (seed, index), so the result
// is independent of evaluation order.
template <typename Scalar>
IsotropicVerdict<Scalar> extremal_isotropic(const CurvaturePointData<Scalar>& data,
                                            const SearchBudget& budget = {}) {
  if (data.n != 4) throw InvalidArgument("isotropic curvature needs dimension 4");
  IsotropicVerdict<Scalar> out;
  const auto l2 = lambda2_operator(data);
  out.sigma = data.scalar / Scalar(6) + data.weyl_norm;
  out.q_max = l2.q_eigenvalues[l2.q_eigenvalues.size() - 1];

  constexpr int kKeep = 3;
  struct Candidate {
    Scalar value;
    MatX<Scalar> rot;
  };
  std::vector<Candidate> best_hi, best_lo;
  Scalar prev_max = 0, prev_min = 0;
  bool have_prev = false;
  std::uint64_t draw_index = 0;
  int samples = budget.samples;

  for (int round = 0; round <= budget.max_doublings; ++round) {
    for (int i = 0; i < samples; ++i) {
      Rng rng(budget.seed, draw_index++);
      const MatX<Scalar> rot = detail::haar_rotation<Scalar>(rng);
      const Scalar kv = isotropic_curvature_complexified(data.riem_op, rot);
      ++out.evaluations;
      const auto keep = [&](std::vector<Candidate>& pool, Scalar direction) {
        if (static_cast<int>(pool.size()) < kKeep) {
          pool.push_back({kv, rot});
          return;
        }
        int worst = 0;
        for (int j = 1; j < kKeep; ++j) {
          if (direction * pool[static_cast<std::size_t>(j)].value <
              direction * pool[static_cast<std::size_t>(worst)].value) {
            worst = j;
          }
        }
        if (direction * kv > direction * pool[static_cast<std::size_t>(worst)].value) {
          pool[static_cast<std::size_t>(worst)] = {kv, rot};
        }
      };
      keep(best_hi, Scalar(1));
      keep(best_lo, Scalar(-1));
    }

    Scalar k_max = -std::numeric_limits<Scalar>::infinity();
    Scalar k_min = std::numeric_limits<Scalar>::infinity();
    for (const auto& cand : best_hi) {
      k_max = std::max(k_max, detail::refine_extremum(data.riem_op, cand.rot, cand.value,
                                                      budget.refinements, Scalar(1),
                                                      out.evaluations)
                                  .first);
    }
    for (const auto& cand : best_lo) {
      k_min = std::min(k_min, detail::refine_extremum(data.riem_op, cand.rot, cand.value,
                                                      budget.refinements, Scalar(-1),
                                                      out.evaluations)
                                  .first);
    }
    out.k_max = k_max;
    out.k_min = k_min;
    out.rounds = round + 1;
    if (have_prev && std::abs(k_max - prev_max) <= budget.stabilize_tol &&
        std::abs(k_min - prev_min) <= budget.stabilize_tol) {
      break;
    }
    prev_max = k_max;
    prev_min = k_min;
    have_prev = true;
    samples *= 2;
  }

  if (out.k_max < Scalar(0)) {
    out.verdict = Verdict::NIC;
  } else if (out.k_min > Scalar(0)) {
    out.verdict = Verdict::PIC;
  } else {
    out.verdict = Verdict::Indefinite;
  }
  return out;
}

// sigma_mu = mu s + |W| pointwise, plus its integral over a region.
template <typename Scalar>
Scalar sigma_mu_at(const MetricField<Scalar>& m, Scalar mu, const VecX<Scalar>& x,
                   const CurvatureOptions& opt = {}) {
  if (!(mu > Scalar(0))) throw InvalidArgument("mu must be positive");
  const auto d = curvature_at(m, x, opt);
  return mu * d.scalar + d.weyl_norm;
}

template <typename Scalar>
struct SigmaFieldResult {
  std::vector<VecX<Scalar>> points;
  std::vector<Scalar> values;
  Scalar integral = 0;
};

template <typename Scalar>
SigmaFieldResult<Scalar> sigma_field(const MetricField<Scalar>& m, Scalar mu,
                                     const std::vector<VecX<Scalar>>& grid_points,
                                     const Region& region, const CurvatureOptions& opt = {}) {
  if (!(mu > Scalar(0))) throw InvalidArgument("mu must be positive");
  SigmaFieldResult<Scalar> out;
  out.points = grid_points;
  out.values.reserve(grid_points.size());
  for (const auto& x : grid_points) out.values.push_back(sigma_mu_at(m, mu, x, opt));
  out.integral = integrate_density(
      m, [&](const VecX<Scalar>& x) { return sigma_mu_at(m, mu, x, opt); }, region);
  return out;
}

// Random tensor with all Riemann symmetries: a symmetric matrix on the
// 2-form basis whose 4-form (Bianchi-violating) component is projected out.
template <typename Scalar>
Tensor4<Scalar> random_algebraic_curvature(std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, index);
  OpX<Scalar> s(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      s(i, j) = static_cast<Scalar>(rng.normal());
      s(j, i) = s(i, j);
    }
  }
  const auto& pairs = lambda2_pairs(4);
  Tensor4<Scalar> r(4);
  for (int I = 0; I < 6; ++I) {
    for (int J = 0; J < 6; ++J) {
      const auto [a, b] = pairs[static_cast<std::size_t>(I)];
      const auto [c, d] = pairs[static_cast<std::size_t>(J)];
      r(a, b, c, d) = s(I, J);
      r(b, a, c, d) = -s(I, J);
      r(a, b, d, c) = -s(I, J);
      r(b, a, d, c) = s(I, J);
    }
  }
  // cyclic (first Bianchi) part is totally antisymmetric in dim 4
  const Scalar beta =
      (r(0, 1, 2, 3) + r(0, 2, 3, 1) + r(0, 3, 1, 2)) / Scalar(3);
  auto levi = [](int a, int b, int c, int d) -> int {
    const int p[4] = {a, b, c, d};
    int sign = 1;
    int q[4] = {p[0], p[1], p[2], p[3]};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (q[i] == q[j]) return 0;
        if (q[i] > q[j]) {
          std::swap(q[i], q[j]);
          sign = -sign;
        }
      }
    }
    return sign;
  };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          r(a, b, c, d) -= beta * static_cast<Scalar>(levi(a, b, c, d));
        }
  return r;
}

// Sign comparison of the brute-force verdict against the spectral criterion
// on random algebraic curvature tensors. Disagreements are returned verbatim
// (operator matrix + indices), never thrown.
template <typename Scalar>
struct CrosscheckDisagreement {
  std::uint64_t index = 0;
  OpX<Scalar> riem_op;
  Scalar k_max = 0;
  Scalar q_max = 0;
  Scalar sigma = 0;
};

template <typename Scalar>
struct CrosscheckReport {
  std::uint64_t seed = 0;
  long total = 0;
  long agree = 0;
  // matrix[i][j]: i = (k_max < 0), j = (q_max < 0)
  std::array<std::array<long, 2>, 2> matrix{};
  long sufficiency_violations = 0;  // sigma < 0 but k_max >= 0
  std::vector<CrosscheckDisagreement<Scalar>> disagreements;

  double agreement_rate() const {
    return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
  }
};

template <typename Scalar>
CrosscheckReport<Scalar> criterion_crosscheck(long count, std::uint64_t seed,
                                              SearchBudget budget = {128, 32, 0, 2, 1e-8}) {
  CrosscheckReport<Scalar> report;
  report.seed = seed;
  constexpr std::size_t kMaxStored = 32;
  for (long i = 0; i < count; ++i) {
    const auto tensor = random_algebraic_curvature<Scalar>(seed, static_cast<std::uint64_t>(i));
    const auto data = from_frame_riemann(tensor);
    budget.seed = seed ^ (0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(i));
    const auto verdict = extremal_isotropic(data, budget);
    const bool k_neg = verdict.k_max < Scalar(0);
    const bool q_neg = verdict.q_max < Scalar(0);
    ++report.total;
    ++report.matrix[k_neg ? 1 : 0][q_neg ? 1 : 0];
    if (k_neg == q_neg) {
      ++report.agree;
    } else if (report.disagreements.size() < kMaxStored) {
      report.disagreements.push_back({static_cast<std::uint64_t>(i), data.riem_op,
                                      verdict.k_max, verdict.q_max, verdict.sigma});
    }
    if (verdict.sigma < Scalar(0) && verdict.k_max >= Scalar(0)) {
      ++report.sufficiency_violations;
    }
  }
  return report;
}

}  // namespace niclab
