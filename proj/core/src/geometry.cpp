#include "tucker/geometry.hpp"

#include <cmath>
#include <random>

namespace tucker {

namespace {

Matrix gram(const DenseTensor3& core, int d) {
  const Matrix g = unfold(core, d);
  return g * g.transpose();
}

Matrix gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

double metric(const TuckerPoint& x, const TuckerTangent& xi,
              const TuckerTangent& eta) {
  check_shapes(x, xi);
  check_shapes(x, eta);
  double acc = 0.0;
  for (int d = 1; d <= 3; ++d)
    acc += xi.Z(d).cwiseProduct(eta.Z(d) * gram(x.G, d)).sum();
  const auto& a = xi.Z_G.values();
  const auto& b = eta.Z_G.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double metric_norm(const TuckerPoint& x, const TuckerTangent& xi) {
  return std::sqrt(std::max(0.0, metric(x, xi, xi)));
}

TuckerTangent project_tangent(const TuckerPoint& x, const TuckerTangent& ambient,
                              bool ridge) {
  check_shapes(x, ambient);
  TuckerTangent out = ambient;
  for (int d = 1; d <= 3; ++d) {
    const Matrix w = gram(x.G, d);
    const SpdFactor wf = SpdFactor::make(w, ridge);
    const Matrix uy = x.U(d).transpose() * ambient.Z(d);
    const Matrix s = wf.solve_lyap(w * (uy.transpose() + uy) * w);
    out.Z(d) = ambient.Z(d) - x.U(d) * wf.apply_inverse_right(s);
  }
  return out;
}

TuckerTangent project_horizontal(const TuckerPoint& x, const TuckerTangent& eta,
                                 bool ridge) {
  check_shapes(x, eta);
  SkewTriple rhs = SkewTriple::zero(x.ranks());
  for (int d = 1; d <= 3; ++d) {
    const Matrix gd = unfold(x.G, d);
    const Matrix w = gd * gd.transpose();
    rhs.O(d) = skew_part(x.U(d).transpose() * eta.Z(d) * w) +
               skew_part(gd * unfold(eta.Z_G, d).transpose());
  }
  CoupledLyapOptions opts;
  opts.ridge = ridge;
  const SkewTriple omega = coupled_lyap_solve(x.G, rhs, opts);

  TuckerTangent out = eta;
  for (int d = 1; d <= 3; ++d) out.Z(d) = eta.Z(d) - x.U(d) * omega.O(d);
  out.Z_G = eta.Z_G + mode_product(x.G, omega.O1, 1) +
            mode_product(x.G, omega.O2, 2) + mode_product(x.G, omega.O3, 3);
  return out;
}

double horizontality_error(const TuckerPoint& x, const TuckerTangent& zeta) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const Matrix gd = unfold(x.G, d);
    const Matrix m = (gd * gd.transpose()) * zeta.Z(d).transpose() * x.U(d) +
                     unfold(zeta.Z_G, d) * gd.transpose();
    worst = std::max(worst, (m - m.transpose()).norm());
  }
  return worst;
}

TuckerPoint retract(const TuckerPoint& x, const TuckerTangent& xi) {
  check_shapes(x, xi);
  TuckerPoint y;
  y.U1 = polar_factor(x.U1 + xi.Z_U1);
  y.U2 = polar_factor(x.U2 + xi.Z_U2);
  y.U3 = polar_factor(x.U3 + xi.Z_U3);
  y.G = x.G + xi.Z_G;
  return y;
}

TuckerTangent transport(const TuckerPoint& x, const TuckerTangent& eta,
                        const TuckerTangent& xi, bool ridge) {
  return transport_to(retract(x, eta), xi, ridge);
}

TuckerTangent transport_to(const TuckerPoint& y, const TuckerTangent& xi,
                           bool ridge) {
  return project_horizontal(y, project_tangent(y, xi, ridge), ridge);
}

TuckerPoint group_act(const TuckerPoint& x, const GroupElement& o) {
  check_shapes(x);
  for (int d = 1; d <= 3; ++d) {
    const Matrix& od = o.O(d);
    require(od.rows() == od.cols() && od.rows() == x.U(d).cols(),
            "group_act: rotation size mismatch");
    if ((od.transpose() * od - Matrix::Identity(od.rows(), od.cols())).norm() >
        1e-10 * std::sqrt(static_cast<double>(od.rows()))) {
      throw Error("group_act: matrix is not orthogonal");
    }
  }
  TuckerPoint y;
  y.U1 = x.U1 * o.O1;
  y.U2 = x.U2 * o.O2;
  y.U3 = x.U3 * o.O3;
  y.G = mode_product(
      mode_product(mode_product(x.G, o.O1.transpose(), 1), o.O2.transpose(), 2),
      o.O3.transpose(), 3);
  return y;
}

TuckerTangent group_act_tangent(const TuckerTangent& z, const GroupElement& o) {
  TuckerTangent out;
  out.Z_U1 = z.Z_U1 * o.O1;
  out.Z_U2 = z.Z_U2 * o.O2;
  out.Z_U3 = z.Z_U3 * o.O3;
  out.Z_G = mode_product(
      mode_product(mode_product(z.Z_G, o.O1.transpose(), 1), o.O2.transpose(), 2),
      o.O3.transpose(), 3);
  return out;
}

TuckerTangent vertical_vector(const TuckerPoint& x, const SkewTriple& omega) {
  TuckerTangent v;
  v.Z_U1 = x.U1 * omega.O1;
  v.Z_U2 = x.U2 * omega.O2;
  v.Z_U3 = x.U3 * omega.O3;
  v.Z_G = -1.0 * (mode_product(x.G, omega.O1, 1) + mode_product(x.G, omega.O2, 2) +
                  mode_product(x.G, omega.O3, 3));
  return v;
}

double euclid_metric(const TuckerPoint& x, const TuckerTangent& xi,
                     const TuckerTangent& eta) {
  check_shapes(x, xi);
  check_shapes(x, eta);
  double acc = 0.0;
  for (int d = 1; d <= 3; ++d) acc += xi.Z(d).cwiseProduct(eta.Z(d)).sum();
  const auto& a = xi.Z_G.values();
  const auto& b = eta.Z_G.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

TuckerTangent euclid_project_tangent(const TuckerPoint& x,
                                     const TuckerTangent& ambient) {
  check_shapes(x, ambient);
  TuckerTangent out = ambient;
  for (int d = 1; d <= 3; ++d)
    out.Z(d) = ambient.Z(d) - x.U(d) * sym_part(x.U(d).transpose() * ambient.Z(d));
  return out;
}

TuckerPoint rand_point(const Dims& dims, const Dims& ranks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TuckerPoint x;
  x.U1 = polar_factor(gaussian(dims[0], ranks[0], rng));
  x.U2 = polar_factor(gaussian(dims[1], ranks[1], rng));
  x.U3 = polar_factor(gaussian(dims[2], ranks[2], rng));
  x.G = DenseTensor3(ranks[0], ranks[1], ranks[2]);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : x.G.values()) v = normal(rng);
  check_point(x);
  return x;
}

TuckerTangent rand_ambient(const TuckerPoint& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TuckerTangent z;
  z.Z_U1 = gaussian(static_cast<int>(x.U1.rows()), static_cast<int>(x.U1.cols()), rng);
  z.Z_U2 = gaussian(static_cast<int>(x.U2.rows()), static_cast<int>(x.U2.cols()), rng);
  z.Z_U3 = gaussian(static_cast<int>(x.U3.rows()), static_cast<int>(x.U3.cols()), rng);
  const Dims r = x.ranks();
  z.Z_G = DenseTensor3(r[0], r[1], r[2]);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : z.Z_G.values()) v = normal(rng);
  return z;
}

TuckerTangent rand_tangent(const TuckerPoint& x, std::uint64_t seed) {
  return project_horizontal(x, project_tangent(x, rand_ambient(x, seed)));
}

GroupElement rand_group_element(const Dims& ranks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // QR of a Gaussian matrix with sign-fixed R diagonal; exactly orthogonal
  // even when the sample is ill conditioned.
  auto orthogonal = [&rng](int r) {
    const Matrix a = gaussian(r, r, rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(r, r);
    const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int j = 0; j < r; ++j)
      if (rr(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  };
  GroupElement o;
  o.O1 = orthogonal(ranks[0]);
  o.O2 = orthogonal(ranks[1]);
  o.O3 = orthogonal(ranks[2]);
  return o;
}

}  // namespace tucker
