#include "tucker/smallmat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>
#include <vector>

namespace tucker {

Matrix sym_part(const Matrix& d) {
  require(d.rows() == d.cols(), "sym_part: matrix must be square");
  return 0.5 * (d + d.transpose());
}

Matrix skew_part(const Matrix& d) {
  require(d.rows() == d.cols(), "skew_part: matrix must be square");
  return 0.5 * (d - d.transpose());
}

SkewTriple SkewTriple::zero(const Dims& ranks) {
  return {Matrix::Zero(ranks[0], ranks[0]), Matrix::Zero(ranks[1], ranks[1]),
          Matrix::Zero(ranks[2], ranks[2])};
}

SkewTriple& SkewTriple::operator+=(const SkewTriple& o) {
  O1 += o.O1;
  O2 += o.O2;
  O3 += o.O3;
  return *this;
}

SkewTriple& SkewTriple::operator-=(const SkewTriple& o) {
  O1 -= o.O1;
  O2 -= o.O2;
  O3 -= o.O3;
  return *this;
}

SkewTriple& SkewTriple::operator*=(double s) {
  O1 *= s;
  O2 *= s;
  O3 *= s;
  return *this;
}

SkewTriple operator+(SkewTriple a, const SkewTriple& b) { return a += b; }
SkewTriple operator-(SkewTriple a, const SkewTriple& b) { return a -= b; }
SkewTriple operator*(double s, SkewTriple a) { return a *= s; }

double dot(const SkewTriple& a, const SkewTriple& b) {
  return a.O1.cwiseProduct(b.O1).sum() + a.O2.cwiseProduct(b.O2).sum() +
         a.O3.cwiseProduct(b.O3).sum();
}

double SkewTriple::norm() const { return std::sqrt(dot(*this, *this)); }

double skewness_error(const SkewTriple& t) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d)
    worst = std::max(worst, (t.O(d) + t.O(d).transpose()).norm());
  return worst;
}

double symmetry_error(const SymTriple& t) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d)
    worst = std::max(worst, (t.S(d) - t.S(d).transpose()).norm());
  return worst;
}

SpdFactor SpdFactor::make(const Matrix& w, bool ridge) {
  require(w.rows() == w.cols(), "SpdFactor: matrix must be square");
  Matrix a = sym_part(w);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success)
    throw Error("SpdFactor: eigendecomposition failed");
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin <= kSpdRelTol * std::max(lmax, 0.0)) {
    if (!ridge) {
      throw DegenerateCoreError(
          "Gram matrix numerically singular (min/max eigenvalue = " +
          std::to_string(lmin) + "/" + std::to_string(lmax) +
          "); the core unfolding lost rank");
    }
    const double shift = 1e-10 * a.trace() / static_cast<double>(a.rows());
    a += shift * Matrix::Identity(a.rows(), a.cols());
    eig.compute(a);
  }
  SpdFactor f;
  f.q_ = eig.eigenvectors();
  f.evals_ = eig.eigenvalues();
  return f;
}

Matrix SpdFactor::solve_lyap(const Matrix& c) const {
  require(c.rows() == q_.rows() && c.cols() == q_.cols(),
          "solve_lyap: shape mismatch");
  Matrix ct = q_.transpose() * c * q_;
  for (Eigen::Index i = 0; i < ct.rows(); ++i)
    for (Eigen::Index j = 0; j < ct.cols(); ++j)
      ct(i, j) /= evals_(i) + evals_(j);
  return q_ * ct * q_.transpose();
}

Matrix SpdFactor::apply_inverse_right(const Matrix& c) const {
  require(c.cols() == q_.rows(), "apply_inverse_right: shape mismatch");
  return ((c * q_) * evals_.cwiseInverse().asDiagonal()) * q_.transpose();
}

Matrix SpdFactor::inverse() const {
  return (q_ * evals_.cwiseInverse().asDiagonal()) * q_.transpose();
}

Matrix lyap_sym(const Matrix& a, const Matrix& c, bool ridge) {
  require(a.rows() == a.cols() && c.rows() == c.cols() && a.rows() == c.rows(),
          "lyap_sym: A and C must be square of equal size");
  return SpdFactor::make(a, ridge).solve_lyap(c);
}

Matrix polar_factor(const Matrix& a) {
  require(a.rows() >= a.cols() && a.cols() > 0, "polar_factor: matrix must be tall");
  const Matrix gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    std::cerr << "polar_factor: eigensolver failed, falling back to QR "
                 "orthonormalization\n";
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    // Fix column signs so the result agrees with the orthogonal factor for
    // a positive diagonal R.
    Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  }
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin <= 1e-13 * std::max(lmax, 0.0) || lmax <= 0.0) {
    throw DegenerateCoreError("polar_factor: matrix is numerically rank deficient");
  }
  const Matrix inv_sqrt = eig.eigenvectors() *
                          eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          eig.eigenvectors().transpose();
  return a * inv_sqrt;
}

namespace {

struct CoreData {
  Matrix g[3];       // unfoldings G_1, G_2, G_3
  SpdFactor w[3];    // factors of G_d G_d^T
  const DenseTensor3* core = nullptr;

  static CoreData make(const DenseTensor3& core, bool ridge) {
    CoreData d;
    d.core = &core;
    for (int k = 0; k < 3; ++k) {
      d.g[k] = unfold(core, k + 1);
      d.w[k] = SpdFactor::make(d.g[k] * d.g[k].transpose(), ridge);
    }
    return d;
  }
};

// sum over e != d of unfold(G x_e O_e^T, d) * G_d^T
Matrix cross_terms(const CoreData& cd, const SkewTriple& omega, int d) {
  const Dims& r = cd.core->dims();
  Matrix acc = Matrix::Zero(r[static_cast<std::size_t>(d - 1)],
                            r[static_cast<std::size_t>(d - 1)]);
  for (int e = 1; e <= 3; ++e) {
    if (e == d) continue;
    acc += unfold(mode_product(*cd.core, omega.O(e).transpose(), e), d) *
           cd.g[d - 1].transpose();
  }
  return acc;
}

SkewTriple apply_operator(const CoreData& cd, const SkewTriple& omega) {
  SkewTriple out = SkewTriple::zero(cd.core->dims());
  for (int d = 1; d <= 3; ++d) {
    const Matrix w = cd.g[d - 1] * cd.g[d - 1].transpose();
    out.O(d) = w * omega.O(d) + omega.O(d) * w - cross_terms(cd, omega, d);
  }
  return out;
}

// One Gauss-Seidel sweep: each decoupled Lyapunov equation is solved in turn
// with the already-updated blocks substituted into its cross terms.
SkewTriple gauss_seidel_precondition(const CoreData& cd, const SkewTriple& r) {
  SkewTriple o = SkewTriple::zero(cd.core->dims());
  for (int d = 1; d <= 3; ++d) {
    const Matrix rhs = skew_part(r.O(d) + cross_terms(cd, o, d));
    o.O(d) = skew_part(cd.w[d - 1].solve_lyap(rhs));
  }
  return o;
}

// Orthonormal basis of the skew triples, used by the dense fallback.
std::vector<SkewTriple> skew_basis(const Dims& ranks) {
  std::vector<SkewTriple> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int d = 1; d <= 3; ++d) {
    const int rd = ranks[static_cast<std::size_t>(d - 1)];
    for (int p = 0; p < rd; ++p) {
      for (int q = p + 1; q < rd; ++q) {
        SkewTriple b = SkewTriple::zero(ranks);
        b.O(d)(p, q) = inv_sqrt2;
        b.O(d)(q, p) = -inv_sqrt2;
        basis.push_back(std::move(b));
      }
    }
  }
  return basis;
}

SkewTriple dense_solve(const CoreData& cd, const SkewTriple& rhs) {
  const std::vector<SkewTriple> basis = skew_basis(cd.core->dims());
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  if (m == 0) return SkewTriple::zero(cd.core->dims());
  Matrix a(m, m);
  Vector b(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const SkewTriple lb = apply_operator(cd, basis[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < m; ++i)
      a(i, j) = dot(basis[static_cast<std::size_t>(i)], lb);
    b(j) = dot(basis[static_cast<std::size_t>(j)], rhs);
  }
  const Vector c = a.fullPivLu().solve(b);
  SkewTriple out = SkewTriple::zero(cd.core->dims());
  for (Eigen::Index j = 0; j < m; ++j)
    out += c(j) * basis[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace

SkewTriple coupled_lyap_apply(const DenseTensor3& core, const SkewTriple& omega) {
  return apply_operator(CoreData::make(core, false), omega);
}

SkewTriple coupled_lyap_solve(const DenseTensor3& core, const SkewTriple& rhs,
                              const CoupledLyapOptions& opts) {
  const CoreData cd = CoreData::make(core, opts.ridge);
  const double rhs_norm = rhs.norm();
  SkewTriple x = SkewTriple::zero(core.dims());
  if (rhs_norm == 0.0) return x;

  SkewTriple r = rhs;
  SkewTriple z = gauss_seidel_precondition(cd, r);
  SkewTriple p = z;
  double rz = dot(r, z);

  for (int it = 0; it < opts.max_iter; ++it) {
    const SkewTriple q = apply_operator(cd, p);
    const double pq = dot(p, q);
    if (pq <= 0.0) break;  // lost positive definiteness; use the dense path
    const double alpha = rz / pq;
    x += alpha * p;
    for (int d = 1; d <= 3; ++d) x.O(d) = skew_part(x.O(d));
    assert(skewness_error(x) < 1e-12 * std::max(1.0, x.norm()));
    r -= alpha * q;
    if (r.norm() <= opts.tol * rhs_norm) return x;
    z = gauss_seidel_precondition(cd, r);
    const double rz_next = dot(r, z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }

  // CG did not reach tolerance; the system is tiny, solve it densely.
  x = dense_solve(cd, rhs);
  const double res = (coupled_lyap_apply(core, x) - rhs).norm();
  if (res > opts.tol * rhs_norm) {
    throw ConvergenceError(
        "coupled_lyap_solve: residual " + std::to_string(res / rhs_norm) +
        " (relative) after dense fallback, tolerance " + std::to_string(opts.tol));
  }
  return x;
}

}  // namespace tucker
