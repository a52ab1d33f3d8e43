#pragma once

#include "niclab/metric.hpp"

namespace niclab {

// Gram-Schmidt on the coordinate basis in axis order, w.r.t. the inner
// product g. Equivalent to L^{-T} for the Cholesky factor g = L L^T, so the
// frame is deterministic and varies smoothly with g. Columns are the frame
// vectors e_a in coordinate components; F^T g F = I.
template <typename Scalar>
MatX<Scalar> orthonormal_frame(const MatX<Scalar>& g) {
  Eigen::LLT<MatX<Scalar>> llt(g);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("metric is not positive definite");
  }
  const int n = static_cast<int>(g.rows());
  MatX<Scalar> frame = MatX<Scalar>::Identity(n, n);
  llt.matrixU().solveInPlace(frame);
  return frame;
}

template <typename Scalar>
MatX<Scalar> orthonormal_frame(const MetricField<Scalar>& m, const VecX<Scalar>& x) {
  return orthonormal_frame<Scalar>(metric_at(m, x));
}

}  // namespace niclab
