#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

namespace setobs {

// Coordinates x1 = W' x (strongly observable), x2 = V' x (weakly unobservable).
struct Decomposition {
  Index n = 0, n1 = 0, n2 = 0, nw = 0, ny = 0;
  Matrix W, V;        // orthonormal bases, n x n1 and n x n2
  Matrix P1, P1inv;   // P1 = [W V]'
  Matrix A1, A2, A3, A4;
  Matrix B1, B2, C1, C2, D;
  Matrix B1p, D1p;    // [A3 B1], [C2 D]
  Matrix B2p, D2p;    // [A2 B2], [C1 D]
  bool b2p_full_row_rank = true;
  bool d2p_full_row_rank = true;
  std::vector<std::string> warnings;
};

}  // namespace setobs
