#pragma once

#include "niclab/frame.hpp"
#include "niclab/metric.hpp"

namespace niclab {

// Rank-4 component array in dimension n <= 4.
template <typename Scalar>
struct Tensor4 {
  int n = 0;
  std::array<Scalar, 256> v{};

  explicit Tensor4(int dim = 0) : n(dim) { v.fill(Scalar(0)); }

  Scalar& operator()(int i, int j, int k, int l) {
    return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  Scalar operator()(int i, int j, int k, int l) const {
    return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

// Index pairs (a < b) spanning the 2-form basis, in lexicographic order:
// dim 4 -> {e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4}. Basis bivectors are
// unit, so operator entries are plain tensor components and the diagonal of
// the curvature operator lists sectional curvatures.
inline const std::vector<std::pair<int, int>>& lambda2_pairs(int n) {
  static const std::vector<std::pair<int, int>> p3 = {{0, 1}, {0, 2}, {1, 2}};
  static const std::vector<std::pair<int, int>> p4 = {{0, 1}, {0, 2}, {0, 3},
                                                      {1, 2}, {1, 3}, {2, 3}};
  if (n == 3) return p3;
  if (n == 4) return p4;
  throw InvalidArgument("2-form basis available for dimensions 3 and 4 only");
}

// Full orthonormal-frame curvature record at a point. Sign convention:
// R_abab is the sectional curvature of span(e_a, e_b); the unit sphere has
// R_abcd = delta_ac delta_bd - delta_ad delta_bc, s = n(n-1) > 0.
template <typename Scalar>
struct CurvaturePointData {
  int n = 0;
  MatX<Scalar> frame;      // columns: orthonormal frame in coordinate basis
  Tensor4<Scalar> riem;    // R_abcd, frame components
  MatX<Scalar> ricci;      // Ric_ab = sum_c R_cacb
  Scalar scalar = 0;       // s = tr Ric
  Tensor4<Scalar> weyl;    // trace-free part of riem
  Scalar weyl_norm = 0;    // |W| as an element of the 4-fold tensor product
  OpX<Scalar> riem_op;     // <R(e_a^e_b), e_c^e_d>
  OpX<Scalar> weyl_op;     // <W(e_a^e_b), e_c^e_d>
};

struct CurvatureOptions {
  DiffOptions diff{};
  // Debug switch: negates the curvature tensor so the anchor checks must
  // fail; used as a negative control in the verification battery.
  bool flip_sign = false;
};

// Kulkarni-Nomizu removal of the Ricci and scalar parts (orthonormal frame).
template <typename Scalar>
void weyl_decompose(CurvaturePointData<Scalar>& data) {
  const int n = data.n;
  const Scalar s = data.scalar;
  MatX<Scalar> tracefree = data.ricci - (s / static_cast<Scalar>(n)) * MatX<Scalar>::Identity(n, n);
  const Scalar ricci_coef = Scalar(1) / static_cast<Scalar>(n - 2);
  const Scalar scalar_coef = s / static_cast<Scalar>(n * (n - 1));
  data.weyl = Tensor4<Scalar>(n);
  Scalar norm2 = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          const Scalar dac = (a == c) ? Scalar(1) : Scalar(0);
          const Scalar dad = (a == d) ? Scalar(1) : Scalar(0);
          const Scalar dbc = (b == c) ? Scalar(1) : Scalar(0);
          const Scalar dbd = (b == d) ? Scalar(1) : Scalar(0);
          const Scalar kn = dac * tracefree(b, d) - dad * tracefree(b, c) +
                            dbd * tracefree(a, c) - dbc * tracefree(a, d);
          const Scalar w =
              data.riem(a, b, c, d) - ricci_coef * kn - scalar_coef * (dac * dbd - dad * dbc);
          data.weyl(a, b, c, d) = w;
          norm2 += w * w;
        }
      }
    }
  }
  data.weyl_norm = std::sqrt(norm2);

  const auto& pairs = lambda2_pairs(n);
  const int m = static_cast<int>(pairs.size());
  data.riem_op = OpX<Scalar>::Zero(m, m);
  data.weyl_op = OpX<Scalar>::Zero(m, m);
  for (int I = 0; I < m; ++I) {
    for (int J = 0; J < m; ++J) {
      data.riem_op(I, J) =
          data.riem(pairs[static_cast<std::size_t>(I)].first,
                    pairs[static_cast<std::size_t>(I)].second,
                    pairs[static_cast<std::size_t>(J)].first,
                    pairs[static_cast<std::size_t>(J)].second);
      data.weyl_op(I, J) =
          data.weyl(pairs[static_cast<std::size_t>(I)].first,
                    pairs[static_cast<std::size_t>(I)].second,
                    pairs[static_cast<std::size_t>(J)].first,
                    pairs[static_cast<std::size_t>(J)].second);
    }
  }
}

// Derive Ricci, scalar, Weyl and the 2-form operators from frame components
// of the curvature tensor (frame defaults to the coordinate basis).
template <typename Scalar>
CurvaturePointData<Scalar> from_frame_riemann(const Tensor4<Scalar>& riem_frame) {
  CurvaturePointData<Scalar> data;
  data.n = riem_frame.n;
  data.frame = MatX<Scalar>::Identity(data.n, data.n);
  data.riem = riem_frame;
  data.ricci = MatX<Scalar>::Zero(data.n, data.n);
  for (int b = 0; b < data.n; ++b) {
    for (int d = 0; d < data.n; ++d) {
      Scalar acc = 0;
      for (int a = 0; a < data.n; ++a) acc += data.riem(a, b, a, d);
      data.ricci(b, d) = acc;
    }
  }
  data.scalar = data.ricci.trace();
  weyl_decompose(data);
  return data;
}

// Component change T_abcd = B_ia B_jb B_kc B_ld T_ijkl for a basis whose
// vectors are the columns of B, contracted one slot at a time.
template <typename Scalar>
Tensor4<Scalar> transform_tensor4(const Tensor4<Scalar>& t, const MatX<Scalar>& basis) {
  const int n = t.n;
  Tensor4<Scalar> t1(n), t2(n), t3(n), out(n);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar acc = 0;
          for (int i = 0; i < n; ++i) acc += basis(i, a) * t(i, j, k, l);
          t1(a, j, k, l) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar acc = 0;
          for (int j = 0; j < n; ++j) acc += basis(j, b) * t1(a, j, k, l);
          t2(a, b, k, l) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int l = 0; l < n; ++l) {
          Scalar acc = 0;
          for (int k = 0; k < n; ++k) acc += basis(k, c) * t2(a, b, k, l);
          t3(a, b, c, l) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Scalar acc = 0;
          for (int l = 0; l < n; ++l) acc += basis(l, d) * t3(a, b, c, l);
          out(a, b, c, d) = acc;
        }
  return out;
}

// Christoffel symbols Gamma^k_ij from the metric and its first derivatives.
template <typename Scalar>
std::vector<MatX<Scalar>> christoffel(const MatX<Scalar>& g,
                                      const std::vector<MatX<Scalar>>& dg) {
  const int n = static_cast<int>(g.rows());
  const MatX<Scalar> ginv = g.inverse();
  std::vector<MatX<Scalar>> gamma(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Scalar acc = 0;
        for (int l = 0; l < n; ++l) {
          acc += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                               dg[static_cast<std::size_t>(j)](i, l) -
                               dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma[static_cast<std::size_t>(k)](i, j) = Scalar(0.5) * acc;
        gamma[static_cast<std::size_t>(k)](j, i) = gamma[static_cast<std::size_t>(k)](i, j);
      }
    }
  }
  return gamma;
}

// Full curvature hierarchy at a point. Christoffel derivatives are assembled
// from metric first/second derivatives (no differencing of Christoffels).
template <typename Scalar>
CurvaturePointData<Scalar> curvature_at(const MetricField<Scalar>& m, const VecX<Scalar>& x,
                                        const CurvatureOptions& opt = {}) {
  const int n = m.chart.dim();
  const MatX<Scalar> g = metric_at(m, x);
  const MetricDerivs<Scalar> deriv = metric_derivatives(m, x, 2, opt.diff);
  const std::vector<MatX<Scalar>>& dg = deriv.first;
  const auto& ddg = deriv.second;

  const MatX<Scalar> ginv = g.inverse();
  std::vector<MatX<Scalar>> dginv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dginv[static_cast<std::size_t>(i)] = -ginv * dg[static_cast<std::size_t>(i)] * ginv;
  }

  const std::vector<MatX<Scalar>> gamma = christoffel(g, dg);

  // dgamma[i][ m ](j,l) = d_i Gamma^m_{jl}
  std::vector<std::vector<MatX<Scalar>>> dgamma(
      static_cast<std::size_t>(n),
      std::vector<MatX<Scalar>>(static_cast<std::size_t>(n), MatX<Scalar>::Zero(n, n)));
  for (int i = 0; i < n; ++i) {
    for (int mm = 0; mm < n; ++mm) {
      for (int j = 0; j < n; ++j) {
        for (int l = j; l < n; ++l) {
          Scalar acc = 0;
          for (int p = 0; p < n; ++p) {
            const Scalar bracket = dg[static_cast<std::size_t>(j)](l, p) +
                                   dg[static_cast<std::size_t>(l)](j, p) -
                                   dg[static_cast<std::size_t>(p)](j, l);
            const Scalar dbracket =
                ddg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](l, p) +
                ddg[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)](j, p) -
                ddg[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)](j, l);
            acc += dginv[static_cast<std::size_t>(i)](mm, p) * bracket + ginv(mm, p) * dbracket;
          }
          dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(mm)](j, l) =
              Scalar(0.5) * acc;
          dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(mm)](l, j) =
              dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(mm)](j, l);
        }
      }
    }
  }

  // R(d_i, d_j) d_l = Rup^m_{ijl} d_m ; R_{ijkl} = g(R(d_i,d_j) d_l, d_k).
  Tensor4<Scalar> r_coord(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        for (int mm = 0; mm < n; ++mm) {
          Scalar rup = dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(mm)](j, l) -
                       dgamma[static_cast<std::size_t>(j)][static_cast<std::size_t>(mm)](i, l);
          for (int p = 0; p < n; ++p) {
            rup += gamma[static_cast<std::size_t>(mm)](i, p) *
                       gamma[static_cast<std::size_t>(p)](j, l) -
                   gamma[static_cast<std::size_t>(mm)](j, p) *
                       gamma[static_cast<std::size_t>(p)](i, l);
          }
          for (int k = 0; k < n; ++k) {
            const Scalar val = g(k, mm) * rup;
            r_coord(i, j, k, l) += val;
            r_coord(j, i, k, l) -= val;
          }
        }
      }
    }
  }

  // Re-express in the orthonormal frame.
  const MatX<Scalar> frame = orthonormal_frame<Scalar>(g);
  Tensor4<Scalar> r_frame = transform_tensor4(r_coord, frame);
  if (opt.flip_sign) {
    for (auto& v : r_frame.v) v = -v;
  }

  CurvaturePointData<Scalar> data = from_frame_riemann(r_frame);
  data.frame = frame;
  return data;
}

// 2-form operators and the spectral criterion matrix Q = (s/6) I - W.
template <typename Scalar>
struct Lambda2Result {
  OpX<Scalar> riem_op;
  OpX<Scalar> weyl_op;
  OpX<Scalar> q;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 6, 1> q_eigenvalues;  // ascending
};

template <typename Scalar>
Lambda2Result<Scalar> lambda2_operator(const CurvaturePointData<Scalar>& data) {
  Lambda2Result<Scalar> out;
  out.riem_op = data.riem_op;
  out.weyl_op = data.weyl_op;
  const int m = static_cast<int>(data.riem_op.rows());
  out.q = (data.scalar / Scalar(6)) * OpX<Scalar>::Identity(m, m) - data.weyl_op;
  Eigen::SelfAdjointEigenSolver<OpX<Scalar>> es(out.q);
  out.q_eigenvalues = es.eigenvalues();
  return out;
}

// Laplace-Beltrami of a scalar field (trace of the Hessian; nonpositive
// quadratic form, so flat space gives sum of plain second derivatives).
template <typename Scalar>
Scalar laplace_beltrami(const MetricField<Scalar>& m, const ScalarField<Scalar>& u,
                        const VecX<Scalar>& x, const DiffOptions& opt = {}) {
  if (!u.grad || !u.hess) {
    throw InvalidArgument("laplace_beltrami needs analytic gradient and Hessian");
  }
  const int n = m.chart.dim();
  const MatX<Scalar> g = metric_at(m, x);
  const MetricDerivs<Scalar> deriv = metric_derivatives(m, x, 1, opt);
  const std::vector<MatX<Scalar>> gamma = christoffel(g, deriv.first);
  const MatX<Scalar> ginv = g.inverse();
  const VecX<Scalar> du = u.grad(x);
  const MatX<Scalar> hu = u.hess(x);
  Scalar acc = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Scalar hess_cov = hu(i, j);
      for (int k = 0; k < n; ++k) hess_cov -= gamma[static_cast<std::size_t>(k)](i, j) * du[k];
      acc += ginv(i, j) * hess_cov;
    }
  }
  return acc;
}

// Both sides of the Weyl-norm conformal scaling identity
// |W|_{f^2 g} = f^{-2} |W|_g, each computed independently by the engine.
template <typename Scalar>
struct ScaleCheckReport {
  Scalar scaled_norm = 0;     // |W| of f^2 g at x, in the scaled metric
  Scalar predicted_norm = 0;  // f(x)^{-2} |W| of g at x
  Scalar rel_gap = 0;
};

template <typename Scalar>
ScaleCheckReport<Scalar> conformal_scale_check(const MetricField<Scalar>& m,
                                               const ScalarField<Scalar>& f,
                                               const VecX<Scalar>& x,
                                               const CurvatureOptions& opt = {}) {
  ScaleCheckReport<Scalar> rep;
  const MetricField<Scalar> scaled = conformal_scale(m, f, Scalar(2));
  rep.scaled_norm = curvature_at(scaled, x, opt).weyl_norm;
  const Scalar fv = f.value(x);
  rep.predicted_norm = curvature_at(m, x, opt).weyl_norm / (fv * fv);
  rep.rel_gap = relative_gap(rep.scaled_norm, rep.predicted_norm);
  return rep;
}

}  // namespace niclab
