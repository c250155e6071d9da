#pragma once

#include "linalg.hpp"

namespace setobs {

// xdot = A x + B w,  y = C x + D w
struct LtiSystem {
  Matrix A, B, C, D;

  Index n() const { return A.rows(); }
  Index nw() const { return B.cols(); }
  Index ny() const { return C.rows(); }

  void validate() const {
    require(A.rows() == A.cols() && A.rows() > 0, ErrorCode::invalid_dimension, "A must be square and nonempty");
    require(B.rows() == n(), ErrorCode::invalid_dimension, "B row count must match A");
    require(C.cols() == n(), ErrorCode::invalid_dimension, "C column count must match A");
    require(D.rows() == ny() && D.cols() == nw(), ErrorCode::invalid_dimension, "D must be ny x nw");
    require(nw() > 0 && ny() > 0, ErrorCode::invalid_dimension, "need at least one input and one output");
    require(A.allFinite() && B.allFinite() && C.allFinite() && D.allFinite(), ErrorCode::invalid_parameter,
            "system matrices must be finite");
  }
};

}  // namespace setobs
