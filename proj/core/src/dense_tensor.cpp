#include "tucker/dense_tensor.hpp"

namespace tucker {

namespace {

void check_mode(int mode) {
  require(mode >= 1 && mode <= 3, "mode index must be 1, 2 or 3");
}

}  // namespace

DenseTensor3& DenseTensor3::operator+=(const DenseTensor3& other) {
  require(same_shape(other), "DenseTensor3 +=: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

DenseTensor3& DenseTensor3::operator-=(const DenseTensor3& other) {
  require(same_shape(other), "DenseTensor3 -=: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

DenseTensor3& DenseTensor3::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

DenseTensor3 operator+(DenseTensor3 a, const DenseTensor3& b) { return a += b; }
DenseTensor3 operator-(DenseTensor3 a, const DenseTensor3& b) { return a -= b; }
DenseTensor3 operator*(double s, DenseTensor3 a) { return a *= s; }

Matrix unfold(const DenseTensor3& t, int mode) {
  check_mode(mode);
  const int n1 = t.dim(1), n2 = t.dim(2), n3 = t.dim(3);
  switch (mode) {
    case 1: {
      // The storage order already is mode-1 column-major.
      return Eigen::Map<const Matrix>(t.data(), n1,
                                      static_cast<Eigen::Index>(n2) * n3);
    }
    case 2: {
      Matrix m(n2, static_cast<Eigen::Index>(n1) * n3);
      for (int i3 = 0; i3 < n3; ++i3)
        for (int i2 = 0; i2 < n2; ++i2)
          for (int i1 = 0; i1 < n1; ++i1)
            m(i2, i1 + static_cast<Eigen::Index>(i3) * n1) = t(i1, i2, i3);
      return m;
    }
    default: {
      Matrix m(n3, static_cast<Eigen::Index>(n1) * n2);
      for (int i3 = 0; i3 < n3; ++i3)
        for (int i2 = 0; i2 < n2; ++i2)
          for (int i1 = 0; i1 < n1; ++i1)
            m(i3, i1 + static_cast<Eigen::Index>(i2) * n1) = t(i1, i2, i3);
      return m;
    }
  }
}

DenseTensor3 fold(const Matrix& m, int mode, const Dims& dims) {
  check_mode(mode);
  const int n1 = dims[0], n2 = dims[1], n3 = dims[2];
  const Eigen::Index other = static_cast<Eigen::Index>(n1) * n2 * n3 /
                             dims[static_cast<std::size_t>(mode - 1)];
  require(m.rows() == dims[static_cast<std::size_t>(mode - 1)] && m.cols() == other,
          "fold: matrix shape does not match target dims");
  DenseTensor3 t(n1, n2, n3);
  switch (mode) {
    case 1:
      Eigen::Map<Matrix>(t.data(), n1, static_cast<Eigen::Index>(n2) * n3) = m;
      break;
    case 2:
      for (int i3 = 0; i3 < n3; ++i3)
        for (int i2 = 0; i2 < n2; ++i2)
          for (int i1 = 0; i1 < n1; ++i1)
            t(i1, i2, i3) = m(i2, i1 + static_cast<Eigen::Index>(i3) * n1);
      break;
    default:
      for (int i3 = 0; i3 < n3; ++i3)
        for (int i2 = 0; i2 < n2; ++i2)
          for (int i1 = 0; i1 < n1; ++i1)
            t(i1, i2, i3) = m(i3, i1 + static_cast<Eigen::Index>(i2) * n1);
      break;
  }
  return t;
}

DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& v, int mode) {
  check_mode(mode);
  require(v.cols() == t.dim(mode), "mode_product: column count must equal n_d");
  Dims out = t.dims();
  out[static_cast<std::size_t>(mode - 1)] = static_cast<int>(v.rows());
  return fold(v * unfold(t, mode), mode, out);
}

}  // namespace tucker
