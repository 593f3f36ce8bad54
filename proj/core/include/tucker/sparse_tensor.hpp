#pragma once

#include <cstdint>
#include <vector>

#include "tucker/common.hpp"

namespace tucker {

/// One observed entry, 0-based indices.
struct SparseEntry {
  int i1 = 0;
  int i2 = 0;
  int i3 = 0;
  double value = 0.0;
};

inline bool index_less(const SparseEntry& a, const SparseEntry& b) {
  if (a.i1 != b.i1) return a.i1 < b.i1;
  if (a.i2 != b.i2) return a.i2 < b.i2;
  return a.i3 < b.i3;
}

/// COO list of entries, kept sorted lexicographically by (i1,i2,i3) with no
/// duplicate index triples. Immutable after construction.
class SparseTensor3 {
public:
  SparseTensor3() : dims_{0, 0, 0} {}

  /// Sorts and validates; duplicates and out-of-range indices are errors.
  SparseTensor3(const Dims& dims, std::vector<SparseEntry> entries);

  const Dims& dims() const { return dims_; }
  int dim(int d) const { return dims_[static_cast<std::size_t>(d - 1)]; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  /// l2 norm of the stored values, i.e. the Frobenius norm of P_set(.).
  double value_norm() const;

  /// Same index set, values replaced positionally.
  SparseTensor3 with_values(std::vector<double> values) const;

  /// True if no index triple occurs in both tensors.
  bool disjoint_from(const SparseTensor3& other) const;

private:
  Dims dims_;
  std::vector<SparseEntry> entries_;
};

}  // namespace tucker
