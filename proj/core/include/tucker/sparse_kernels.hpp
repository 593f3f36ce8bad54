#pragma once

#include "tucker/point.hpp"
#include "tucker/sparse_tensor.hpp"

namespace tucker {

/// Evaluates the Tucker model at the index set of `where` (its values are
/// ignored). Per-entry work is O(r1 r2 r3); the dense tensor is never formed.
///
/// With threads > 1 the entry list is split into fixed contiguous chunks;
/// chunk results are combined in chunk order, so results are reproducible
/// for a given thread count.
SparseTensor3 sparse_eval_tucker(const TuckerPoint& x, const SparseTensor3& where,
                                 int threads = 1);

/// S_d (U_c kron U_b) G_d^T accumulated entrywise, where (b,c) are the other
/// two modes in increasing order (mode 1: U3 kron U2, mode 2: U3 kron U1,
/// mode 3: U2 kron U1). No Kronecker product is formed. Result is n_d x r_d.
Matrix sparse_kron_contract(const SparseTensor3& s, const TuckerPoint& x,
                            int mode, int threads = 1);

/// S x1 U1^T x2 U2^T x3 U3^T accumulated entrywise; result is r1 x r2 x r3.
DenseTensor3 sparse_core_contract(const SparseTensor3& s, const TuckerPoint& x,
                                  int threads = 1);

}  // namespace tucker
