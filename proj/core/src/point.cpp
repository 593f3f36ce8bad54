#include "tucker/point.hpp"

namespace tucker {

TuckerTangent TuckerTangent::zeros_like(const TuckerPoint& x) {
  TuckerTangent z;
  z.Z_U1 = Matrix::Zero(x.U1.rows(), x.U1.cols());
  z.Z_U2 = Matrix::Zero(x.U2.rows(), x.U2.cols());
  z.Z_U3 = Matrix::Zero(x.U3.rows(), x.U3.cols());
  const Dims r = x.ranks();
  z.Z_G = DenseTensor3(r[0], r[1], r[2]);
  return z;
}

TuckerTangent& TuckerTangent::operator+=(const TuckerTangent& o) {
  Z_U1 += o.Z_U1;
  Z_U2 += o.Z_U2;
  Z_U3 += o.Z_U3;
  Z_G += o.Z_G;
  return *this;
}

TuckerTangent& TuckerTangent::operator-=(const TuckerTangent& o) {
  Z_U1 -= o.Z_U1;
  Z_U2 -= o.Z_U2;
  Z_U3 -= o.Z_U3;
  Z_G -= o.Z_G;
  return *this;
}

TuckerTangent& TuckerTangent::operator*=(double s) {
  Z_U1 *= s;
  Z_U2 *= s;
  Z_U3 *= s;
  Z_G *= s;
  return *this;
}

TuckerTangent operator+(TuckerTangent a, const TuckerTangent& b) { return a += b; }
TuckerTangent operator-(TuckerTangent a, const TuckerTangent& b) { return a -= b; }
TuckerTangent operator*(double s, TuckerTangent a) { return a *= s; }
TuckerTangent operator-(TuckerTangent a) { return a *= -1.0; }

DenseTensor3 tucker_to_dense(const TuckerPoint& x) {
  check_shapes(x);
  return mode_product(mode_product(mode_product(x.G, x.U1, 1), x.U2, 2), x.U3, 3);
}

void check_shapes(const TuckerPoint& x) {
  const Dims r = x.ranks();
  for (int d = 1; d <= 3; ++d) {
    require(x.U(d).cols() == r[static_cast<std::size_t>(d - 1)],
            "TuckerPoint: U" + std::to_string(d) + " column count must match core");
    require(x.U(d).rows() >= x.U(d).cols(),
            "TuckerPoint: U" + std::to_string(d) + " must be tall");
  }
}

void check_shapes(const TuckerPoint& x, const TuckerTangent& z) {
  check_shapes(x);
  for (int d = 1; d <= 3; ++d) {
    require(z.Z(d).rows() == x.U(d).rows() && z.Z(d).cols() == x.U(d).cols(),
            "TuckerTangent: block " + std::to_string(d) + " shape mismatch");
  }
  require(z.Z_G.dims() == x.ranks(), "TuckerTangent: core block shape mismatch");
}

double orthonormality_error(const TuckerPoint& x) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const Matrix& u = x.U(d);
    const Matrix gram = u.transpose() * u;
    worst = std::max(
        worst, (gram - Matrix::Identity(gram.rows(), gram.cols())).norm());
  }
  return worst;
}

double tangency_error(const TuckerPoint& x, const TuckerTangent& z) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const Matrix s = x.U(d).transpose() * z.Z(d);
    worst = std::max(worst, (s + s.transpose()).norm());
  }
  return worst;
}

void check_point(const TuckerPoint& x, double tol) {
  check_shapes(x);
  const Dims r = x.ranks();
  require(static_cast<std::int64_t>(r[0]) <= static_cast<std::int64_t>(r[1]) * r[2] &&
              static_cast<std::int64_t>(r[1]) <= static_cast<std::int64_t>(r[0]) * r[2] &&
              static_cast<std::int64_t>(r[2]) <= static_cast<std::int64_t>(r[0]) * r[1],
          "TuckerPoint: each rank must not exceed the product of the others");
  const double err = orthonormality_error(x);
  if (err > tol) {
    throw Error("TuckerPoint: factors drifted off the Stiefel manifold (|U^T U - I| = " +
                std::to_string(err) + ")");
  }
}

}  // namespace tucker
