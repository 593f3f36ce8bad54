#pragma once

#include "tucker/common.hpp"
#include "tucker/dense_tensor.hpp"

namespace tucker {

/// A point of the factored search space: three orthonormal-column factor
/// matrices U_d (n_d x r_d) and a small core tensor G (r1 x r2 x r3).
struct TuckerPoint {
  Matrix U1, U2, U3;
  DenseTensor3 G;

  const Matrix& U(int d) const { return d == 1 ? U1 : (d == 2 ? U2 : U3); }
  Matrix& U(int d) { return d == 1 ? U1 : (d == 2 ? U2 : U3); }

  Dims dims() const {
    return {static_cast<int>(U1.rows()), static_cast<int>(U2.rows()),
            static_cast<int>(U3.rows())};
  }
  Dims ranks() const { return G.dims(); }
};

/// A tangent (or, before projection, ambient) vector at a TuckerPoint:
/// blocks match the point's shapes. Tangency U_d^T Z_d + Z_d^T U_d = 0 and
/// horizontality are contracts of the producing operation, not of the type.
struct TuckerTangent {
  Matrix Z_U1, Z_U2, Z_U3;
  DenseTensor3 Z_G;

  const Matrix& Z(int d) const {
    return d == 1 ? Z_U1 : (d == 2 ? Z_U2 : Z_U3);
  }
  Matrix& Z(int d) { return d == 1 ? Z_U1 : (d == 2 ? Z_U2 : Z_U3); }

  static TuckerTangent zeros_like(const TuckerPoint& x);

  TuckerTangent& operator+=(const TuckerTangent& o);
  TuckerTangent& operator-=(const TuckerTangent& o);
  TuckerTangent& operator*=(double s);
};

TuckerTangent operator+(TuckerTangent a, const TuckerTangent& b);
TuckerTangent operator-(TuckerTangent a, const TuckerTangent& b);
TuckerTangent operator*(double s, TuckerTangent a);
TuckerTangent operator-(TuckerTangent a);

/// Orthogonal rotations (O1,O2,O3) acting on the factored representation.
struct GroupElement {
  Matrix O1, O2, O3;
  const Matrix& O(int d) const { return d == 1 ? O1 : (d == 2 ? O2 : O3); }
};

/// G x1 U1 x2 U2 x3 U3 as a dense tensor. Desk-scale sizes only.
DenseTensor3 tucker_to_dense(const TuckerPoint& x);

void check_shapes(const TuckerPoint& x);
void check_shapes(const TuckerPoint& x, const TuckerTangent& z);

/// max_d ||U_d^T U_d - I||_F: orthonormality drift of the factors.
double orthonormality_error(const TuckerPoint& x);

/// max_d ||U_d^T Z_d + Z_d^T U_d||_F: violation of the tangency constraint.
double tangency_error(const TuckerPoint& x, const TuckerTangent& z);

/// Verifies factor orthonormality and the rank bounds r_d <= n_d,
/// r_d <= product of the other two ranks. Throws on violation.
void check_point(const TuckerPoint& x, double tol = 1e-12);

}  // namespace tucker
