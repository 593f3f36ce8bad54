#include "tucker/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>

namespace tucker {

SparseTensor3::SparseTensor3(const Dims& dims, std::vector<SparseEntry> entries)
    : dims_(dims), entries_(std::move(entries)) {
  require(dims_[0] > 0 && dims_[1] > 0 && dims_[2] > 0,
          "SparseTensor3: dims must be positive");
  std::sort(entries_.begin(), entries_.end(), index_less);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const SparseEntry& e = entries_[i];
    if (e.i1 < 0 || e.i1 >= dims_[0] || e.i2 < 0 || e.i2 >= dims_[1] ||
        e.i3 < 0 || e.i3 >= dims_[2]) {
      throw DimensionError("SparseTensor3: index (" + std::to_string(e.i1) +
                           "," + std::to_string(e.i2) + "," +
                           std::to_string(e.i3) + ") out of range");
    }
    if (i > 0 && !index_less(entries_[i - 1], e)) {
      throw Error("SparseTensor3: duplicate index triple (" +
                  std::to_string(e.i1) + "," + std::to_string(e.i2) + "," +
                  std::to_string(e.i3) + ")");
    }
  }
}

double SparseTensor3::value_norm() const {
  double s = 0.0;
  for (const SparseEntry& e : entries_) s += e.value * e.value;
  return std::sqrt(s);
}

SparseTensor3 SparseTensor3::with_values(std::vector<double> values) const {
  require(values.size() == entries_.size(),
          "with_values: value count must match nnz");
  SparseTensor3 out;
  out.dims_ = dims_;
  out.entries_ = entries_;
  for (std::size_t i = 0; i < values.size(); ++i)
    out.entries_[i].value = values[i];
  return out;
}

bool SparseTensor3::disjoint_from(const SparseTensor3& other) const {
  // Both entry lists are sorted; one merge pass suffices.
  std::size_t i = 0, j = 0;
  while (i < entries_.size() && j < other.entries_.size()) {
    if (index_less(entries_[i], other.entries_[j])) {
      ++i;
    } else if (index_less(other.entries_[j], entries_[i])) {
      ++j;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace tucker
