#include "tucker/sparse_kernels.hpp"

#include <thread>
#include <vector>

namespace tucker {

namespace {

void check_dims(const SparseTensor3& s, const TuckerPoint& x) {
  check_shapes(x);
  require(s.dims() == x.dims(), "sparse kernel: tensor dims must match point dims");
}

// Per-thread scratch for the entrywise contractions.
struct Scratch {
  explicit Scratch(const Dims& r)
      : gxu3(r[0], r[1]), gxu1(r[1], r[2]), m1(r[0]), m2(r[1]), m3(r[2]) {}
  Matrix gxu3;  // G x3 u3, as an r1 x r2 matrix
  Matrix gxu1;  // G x1 u1, as an r2 x r3 matrix
  Vector m1, m2, m3;
};

// gxu3(a,b) = sum_c G(a,b,c) u3(c)
void contract_mode3(const DenseTensor3& g, const Eigen::RowVectorXd& u3,
                    Matrix& gxu3) {
  const Dims& r = g.dims();
  const Eigen::Map<const Matrix> g1(g.data(), r[0],
                                    static_cast<Eigen::Index>(r[1]) * r[2]);
  gxu3.noalias() = u3(0) * g1.middleCols(0, r[1]);
  for (int c = 1; c < r[2]; ++c)
    gxu3.noalias() += u3(c) * g1.middleCols(static_cast<Eigen::Index>(c) * r[1], r[1]);
}

// gxu1(b,c) = sum_a G(a,b,c) u1(a)
void contract_mode1(const DenseTensor3& g, const Eigen::RowVectorXd& u1,
                    Matrix& gxu1) {
  const Dims& r = g.dims();
  const Eigen::Map<const Matrix> g1(g.data(), r[0],
                                    static_cast<Eigen::Index>(r[1]) * r[2]);
  Eigen::Map<Eigen::RowVectorXd>(gxu1.data(),
                                 static_cast<Eigen::Index>(r[1]) * r[2])
      .noalias() = u1 * g1;
}

// Runs fn(chunk_index, first_entry, last_entry) over a fixed partition of
// [0, n). Chunk boundaries depend only on n and the chunk count.
template <typename Fn>
void run_chunks(std::size_t n, int threads, Fn&& fn) {
  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (chunks == 1) {
    fn(0, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (int t = 0; t < chunks; ++t) {
    const std::size_t lo = n * static_cast<std::size_t>(t) / static_cast<std::size_t>(chunks);
    const std::size_t hi = n * (static_cast<std::size_t>(t) + 1) / static_cast<std::size_t>(chunks);
    pool.emplace_back([&fn, t, lo, hi] { fn(t, lo, hi); });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

SparseTensor3 sparse_eval_tucker(const TuckerPoint& x, const SparseTensor3& where,
                                 int threads) {
  check_dims(where, x);
  const Dims r = x.ranks();
  const std::vector<SparseEntry>& in = where.entries();
  std::vector<double> values(in.size());

  run_chunks(in.size(), threads, [&](int, std::size_t lo, std::size_t hi) {
    Scratch ws(r);
    for (std::size_t k = lo; k < hi; ++k) {
      const SparseEntry& e = in[k];
      contract_mode3(x.G, x.U3.row(e.i3), ws.gxu3);
      ws.m1.noalias() = ws.gxu3 * x.U2.row(e.i2).transpose();
      values[k] = x.U1.row(e.i1).dot(ws.m1);
    }
  });
  return where.with_values(std::move(values));
}

Matrix sparse_kron_contract(const SparseTensor3& s, const TuckerPoint& x,
                            int mode, int threads) {
  check_dims(s, x);
  require(mode >= 1 && mode <= 3, "sparse_kron_contract: mode must be 1, 2 or 3");
  const Dims r = x.ranks();
  const int nd = x.dims()[static_cast<std::size_t>(mode - 1)];
  const int rd = r[static_cast<std::size_t>(mode - 1)];
  const std::vector<SparseEntry>& in = s.entries();

  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(in.size())));
  std::vector<Matrix> partial(static_cast<std::size_t>(chunks),
                              Matrix::Zero(nd, rd));

  run_chunks(in.size(), chunks, [&](int chunk, std::size_t lo, std::size_t hi) {
    Scratch ws(r);
    Matrix& acc = partial[static_cast<std::size_t>(chunk)];
    for (std::size_t k = lo; k < hi; ++k) {
      const SparseEntry& e = in[k];
      switch (mode) {
        case 1:
          contract_mode3(x.G, x.U3.row(e.i3), ws.gxu3);
          ws.m1.noalias() = ws.gxu3 * x.U2.row(e.i2).transpose();
          acc.row(e.i1) += e.value * ws.m1.transpose();
          break;
        case 2:
          contract_mode3(x.G, x.U3.row(e.i3), ws.gxu3);
          ws.m2.noalias() = ws.gxu3.transpose() * x.U1.row(e.i1).transpose();
          acc.row(e.i2) += e.value * ws.m2.transpose();
          break;
        default:
          contract_mode1(x.G, x.U1.row(e.i1), ws.gxu1);
          ws.m3.noalias() = ws.gxu1.transpose() * x.U2.row(e.i2).transpose();
          acc.row(e.i3) += e.value * ws.m3.transpose();
          break;
      }
    }
  });

  Matrix out = std::move(partial[0]);
  for (std::size_t c = 1; c < partial.size(); ++c) out += partial[c];
  return out;
}

DenseTensor3 sparse_core_contract(const SparseTensor3& s, const TuckerPoint& x,
                                  int threads) {
  check_dims(s, x);
  const Dims r = x.ranks();
  const std::vector<SparseEntry>& in = s.entries();

  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(in.size())));
  std::vector<DenseTensor3> partial(static_cast<std::size_t>(chunks),
                                    DenseTensor3(r[0], r[1], r[2]));

  run_chunks(in.size(), chunks, [&](int chunk, std::size_t lo, std::size_t hi) {
    DenseTensor3& acc = partial[static_cast<std::size_t>(chunk)];
    Eigen::Map<Matrix> acc1(acc.data(), r[0], static_cast<Eigen::Index>(r[1]) * r[2]);
    Vector su1(r[0]);
    for (std::size_t k = lo; k < hi; ++k) {
      const SparseEntry& e = in[k];
      su1 = e.value * x.U1.row(e.i1).transpose();
      const auto u2 = x.U2.row(e.i2);
      const auto u3 = x.U3.row(e.i3);
      for (int c = 0; c < r[2]; ++c) {
        const double w = u3(c);
        if (w == 0.0) continue;
        acc1.middleCols(static_cast<Eigen::Index>(c) * r[1], r[1]).noalias() +=
            (w * su1) * u2;
      }
    }
  });

  DenseTensor3 out = std::move(partial[0]);
  for (std::size_t c = 1; c < partial.size(); ++c) out += partial[c];
  return out;
}

}  // namespace tucker
