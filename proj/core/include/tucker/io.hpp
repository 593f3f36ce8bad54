#pragma once

#include <filesystem>

#include "tucker/point.hpp"
#include "tucker/solver.hpp"
#include "tucker/sparse_tensor.hpp"

namespace tucker {

/// COO text format:
///   # dims n1 n2 n3 base={0|1}
///   i j k value
/// one entry per line, values in shortest round-trip decimal. Files written
/// by save_coo always use base=0; load_coo accepts either base.
SparseTensor3 load_coo(const std::filesystem::path& path);
void save_coo(const SparseTensor3& t, const std::filesystem::path& path);

/// Factor file: a header with dims and ranks, then U1, U2, U3 row by row and
/// the core in storage order. Lossless round trip.
void save_factors(const TuckerPoint& x, const std::filesystem::path& path);
TuckerPoint load_factors(const std::filesystem::path& path);

/// Trace CSV with the fixed column set
///   iter,train_mse,test_mse,grad_norm,step,backtracks,time_s
/// in shortest round-trip decimal. With include_timing=false the time_s
/// column is written as 0 so that reruns of the same seed and config produce
/// byte-identical files.
void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path,
                     bool include_timing = true);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tucker
