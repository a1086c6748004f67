#pragma once

#include "kcat/matrix_core.hpp"

namespace kcat {

/// Deterministic random generators; every randomized verification threads a
/// caller-owned Rng so a fixed seed reproduces reports byte for byte.

inline Complex random_complex(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  const double re = dist(rng);
  const double im = dist(rng);
  return Complex(re, im);
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  }
  return m;
}

inline Matrix random_hermitian(Rng& rng, Index n) {
  Matrix m = random_matrix(rng, n, n);
  return (m + m.adjoint()) / 2.0;
}

inline Matrix random_unitary(Rng& rng, Index n) {
  Matrix m = random_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);  // fix column phases
  }
  return q;
}

inline Vector random_vector(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = random_complex(rng);
  return v;
}

inline Vector random_unit_vector(Rng& rng, Index n) {
  Vector v = random_vector(rng, n);
  while (v.norm() == 0.0) v = random_vector(rng, n);
  return v / v.norm();
}

/// Random element of the span with standard normal complex coordinates.
inline Matrix random_span_element(Rng& rng, const SubspaceBasis& basis) {
  return basis.from_coords(random_vector(rng, basis.dim()));
}

}  // namespace kcat
