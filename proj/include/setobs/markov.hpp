#pragma once

#include "decomposition_types.hpp"

namespace setobs {

struct MarkovMatrices {
  int l = 0;
  Matrix Ol;  // [C1; C1 A1; ...; C1 A1^l]
  Matrix Gl;  // block lower-triangular Toeplitz of D1', C1 A1^j B1'
};

inline MarkovMatrices build_markov_matrices(const Decomposition& dec, int l) {
  require(l >= 0, ErrorCode::invalid_parameter, "derivative order must be nonnegative");
  const Index ny = dec.C1.rows(), n1 = dec.n1, m = dec.B1p.cols();
  const Index L = l + 1;
  MarkovMatrices mk;
  mk.l = l;
  mk.Ol = Matrix::Zero(L * ny, n1);
  mk.Gl = Matrix::Zero(L * ny, L * m);
  // markov[j] = C1 A1^j B1'
  std::vector<Matrix> markov;
  Matrix CA = dec.C1;
  for (Index i = 0; i < L; ++i) {
    mk.Ol.middleRows(i * ny, ny) = CA;
    markov.push_back(CA * dec.B1p);
    CA = CA * dec.A1;
  }
  for (Index i = 0; i < L; ++i) {
    mk.Gl.block(i * ny, i * m, ny, m) = dec.D1p;
    for (Index j = 0; j < i; ++j) mk.Gl.block(i * ny, j * m, ny, m) = markov[static_cast<std::size_t>(i - j - 1)];
  }
  return mk;
}

// right-hand side of the unknown-input decoupling constraint, [B1' 0 ... 0]
inline Matrix uio_constraint_rhs(const Decomposition& dec, int l) {
  const Index m = dec.B1p.cols();
  Matrix M = Matrix::Zero(dec.n1, (l + 1) * m);
  M.leftCols(m) = dec.B1p;
  return M;
}

}  // namespace setobs
