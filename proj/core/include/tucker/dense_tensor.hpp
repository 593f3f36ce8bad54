#pragma once

#include <cstdint>
#include <vector>

#include "tucker/common.hpp"

namespace tucker {

/// Dense 3-order tensor. Entry (i1,i2,i3) lives at i1 + n1*(i2 + n2*i3).
///
/// Unfoldings concatenate mode-d fibers along columns:
///   mode 1: row i1, column i2 + i3*n2
///   mode 2: row i2, column i1 + i3*n1
///   mode 3: row i3, column i1 + i2*n1
/// Under this ordering a Tucker tensor satisfies X_1 = U1 G_1 (U3 kron U2)^T,
/// X_2 = U2 G_2 (U3 kron U1)^T and X_3 = U3 G_3 (U2 kron U1)^T.
class DenseTensor3 {
public:
  DenseTensor3() : dims_{0, 0, 0} {}

  DenseTensor3(int n1, int n2, int n3)
      : dims_{n1, n2, n3},
        values_(static_cast<std::size_t>(n1) * n2 * n3, 0.0) {
    require(n1 > 0 && n2 > 0 && n3 > 0, "DenseTensor3: dims must be positive");
  }

  const Dims& dims() const { return dims_; }
  /// Extent along mode d, d in {1,2,3}.
  int dim(int d) const { return dims_[static_cast<std::size_t>(d - 1)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  double operator()(int i1, int i2, int i3) const {
    return values_[linear(i1, i2, i3)];
  }
  double& operator()(int i1, int i2, int i3) {
    return values_[linear(i1, i2, i3)];
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  double norm() const {
    return Eigen::Map<const Vector>(values_.data(),
                                    static_cast<Eigen::Index>(values_.size()))
        .norm();
  }

  DenseTensor3& operator+=(const DenseTensor3& other);
  DenseTensor3& operator-=(const DenseTensor3& other);
  DenseTensor3& operator*=(double s);

  bool same_shape(const DenseTensor3& other) const {
    return dims_ == other.dims_;
  }

private:
  std::size_t linear(int i1, int i2, int i3) const {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(i2) +
                static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(i3));
  }

  Dims dims_;
  std::vector<double> values_;
};

DenseTensor3 operator+(DenseTensor3 a, const DenseTensor3& b);
DenseTensor3 operator-(DenseTensor3 a, const DenseTensor3& b);
DenseTensor3 operator*(double s, DenseTensor3 a);

/// Mode-d unfolding, n_d x (product of the other two extents).
Matrix unfold(const DenseTensor3& t, int mode);

/// Inverse of unfold for the given target dims; exact (entries are copied).
DenseTensor3 fold(const Matrix& m, int mode, const Dims& dims);

/// T x_d V: replaces extent n_d by V.rows(); unfold(result,d) == V*unfold(T,d).
DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& v, int mode);

}  // namespace tucker
