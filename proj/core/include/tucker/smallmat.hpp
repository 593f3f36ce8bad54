#pragma once

#include "tucker/common.hpp"
#include "tucker/dense_tensor.hpp"

namespace tucker {

/// (D + D^T)/2.
Matrix sym_part(const Matrix& d);
/// (D - D^T)/2.
Matrix skew_part(const Matrix& d);

/// Three square skew-symmetric matrices of sizes r1, r2, r3.
struct SkewTriple {
  Matrix O1, O2, O3;
  const Matrix& O(int d) const { return d == 1 ? O1 : (d == 2 ? O2 : O3); }
  Matrix& O(int d) { return d == 1 ? O1 : (d == 2 ? O2 : O3); }

  static SkewTriple zero(const Dims& ranks);
  SkewTriple& operator+=(const SkewTriple& o);
  SkewTriple& operator-=(const SkewTriple& o);
  SkewTriple& operator*=(double s);
  double norm() const;
};

SkewTriple operator+(SkewTriple a, const SkewTriple& b);
SkewTriple operator-(SkewTriple a, const SkewTriple& b);
SkewTriple operator*(double s, SkewTriple a);

/// Frobenius inner product summed over the three blocks.
double dot(const SkewTriple& a, const SkewTriple& b);

/// max_d ||O_d + O_d^T||_F.
double skewness_error(const SkewTriple& t);

/// Three square symmetric matrices of sizes r1, r2, r3: the Lyapunov
/// multipliers produced per mode by the tangent projector and the gradient.
struct SymTriple {
  Matrix S1, S2, S3;
  const Matrix& S(int d) const { return d == 1 ? S1 : (d == 2 ? S2 : S3); }
  Matrix& S(int d) { return d == 1 ? S1 : (d == 2 ? S2 : S3); }
};

/// max_d ||S_d - S_d^T||_F.
double symmetry_error(const SymTriple& t);

/// Relative eigenvalue floor below which a Gram matrix G_d G_d^T is treated
/// as degenerate.
inline constexpr double kSpdRelTol = 1e-12;

/// Eigendecomposition of a symmetric positive definite matrix, reused for
/// Lyapunov solves and inverse applications.
///
/// If the smallest eigenvalue falls below kSpdRelTol times the largest, the
/// matrix is degenerate: with ridge=false this throws DegenerateCoreError,
/// with ridge=true a shift of 1e-10 * trace/r is added and factorization
/// proceeds.
class SpdFactor {
public:
  static SpdFactor make(const Matrix& w, bool ridge = false);

  /// Solves S W + W S = C. If C is symmetric so is S; if skew, so is S.
  Matrix solve_lyap(const Matrix& c) const;
  /// C * W^{-1}.
  Matrix apply_inverse_right(const Matrix& c) const;
  Matrix inverse() const;

private:
  Matrix q_;
  Vector evals_;
};

/// Solves S A + A S = C for symmetric positive definite A.
/// Residual satisfies ||S A + A S - C||_F <= ~1e-10 ||C||_F.
Matrix lyap_sym(const Matrix& a, const Matrix& c, bool ridge = false);

/// A (A^T A)^{-1/2}, the orthogonal factor of a full-column-rank matrix,
/// computed from the eigendecomposition of the small Gram matrix. Falls back
/// to QR orthonormalization (with a warning) only if the eigensolver reports
/// failure. Throws DegenerateCoreError when A is numerically rank deficient.
Matrix polar_factor(const Matrix& a);

struct CoupledLyapOptions {
  double tol = 1e-10;  // relative residual target
  int max_iter = 100;
  bool ridge = false;
};

/// The linear operator of the coupled Lyapunov system defining the horizontal
/// projector: block d is
///   W_d O_d + O_d W_d - sum_{e != d} unfold(G x_e O_e^T, d) G_d^T,
/// with W_d = G_d G_d^T. Maps skew triples to skew triples and is
/// self-adjoint positive definite under the Frobenius inner product.
SkewTriple coupled_lyap_apply(const DenseTensor3& core, const SkewTriple& omega);

/// Solves coupled_lyap_apply(core, O) = rhs for a skew triple O by conjugate
/// gradients preconditioned with one Gauss-Seidel sweep of decoupled Lyapunov
/// solves. Falls back to a dense solve over a skew basis if CG stagnates;
/// throws ConvergenceError if even that leaves a residual above tolerance.
SkewTriple coupled_lyap_solve(const DenseTensor3& core, const SkewTriple& rhs,
                              const CoupledLyapOptions& opts = {});

}  // namespace tucker
