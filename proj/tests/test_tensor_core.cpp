#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tucker/dense_tensor.hpp"
#include "tucker/geometry.hpp"
#include "tucker/sparse_kernels.hpp"
#include "tucker/sparse_tensor.hpp"

using namespace tucker;

namespace {

DenseTensor3 counting_tensor() {
  DenseTensor3 t(2, 2, 2);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) t(i, j, k) = i + 2 * j + 4 * k;
  return t;
}

SparseTensor3 full_index_set(const Dims& dims) {
  std::vector<SparseEntry> entries;
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) entries.push_back({i, j, k, 0.0});
  return SparseTensor3(dims, std::move(entries));
}

SparseTensor3 random_subset(const Dims& dims, double keep, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<SparseEntry> entries;
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        if (u(g) < keep) entries.push_back({i, j, k, n(g)});
  if (entries.empty()) entries.push_back({0, 0, 0, n(g)});
  return SparseTensor3(dims, std::move(entries));
}

}  // namespace

TEST_CASE("unfold singleton and counting tensor") {
  DenseTensor3 single(1, 1, 1);
  single(0, 0, 0) = 42.5;
  for (int mode = 1; mode <= 3; ++mode) {
    const Matrix m = unfold(single, mode);
    REQUIRE(m.rows() == 1);
    REQUIRE(m.cols() == 1);
    CHECK(m(0, 0) == 42.5);
  }

  const Matrix m1 = unfold(counting_tensor(), 1);
  Matrix expected(2, 4);
  expected << 0, 2, 4, 6, 1, 3, 5, 7;
  CHECK(m1 == expected);
}

TEST_CASE("unfold agrees with the convention formula on random tensors") {
  auto g = oracle::rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseTensor3 t = oracle::gaussian_tensor(4, 3, 5, g);
    for (int mode = 1; mode <= 3; ++mode)
      CHECK((unfold(t, mode) - oracle::unfold(t, mode)).norm() == 0.0);
  }
}

TEST_CASE("fold inverts unfold bitwise for all modes") {
  auto g = oracle::rng(8);
  const DenseTensor3 t = oracle::gaussian_tensor(5, 2, 4, g);
  for (int mode = 1; mode <= 3; ++mode) {
    const DenseTensor3 back = fold(unfold(t, mode), mode, t.dims());
    REQUIRE(back.dims() == t.dims());
    CHECK(back.values() == t.values());
  }
}

TEST_CASE("unfold rejects invalid modes") {
  const DenseTensor3 t(2, 2, 2);
  CHECK_THROWS_AS(unfold(t, 0), DimensionError);
  CHECK_THROWS_AS(unfold(t, 4), DimensionError);
  CHECK_THROWS_AS(mode_product(t, Matrix::Identity(2, 2), -1), DimensionError);
}

TEST_CASE("mode_product identity, fiber sums, dense oracle") {
  auto g = oracle::rng(9);
  const DenseTensor3 t = oracle::gaussian_tensor(3, 2, 2, g);
  for (int mode = 1; mode <= 3; ++mode) {
    const Matrix id = Matrix::Identity(t.dim(mode), t.dim(mode));
    CHECK(mode_product(t, id, mode).values() == t.values());
  }

  DenseTensor3 ones(2, 2, 2);
  for (double& v : ones.values()) v = 1.0;
  Matrix row(1, 2);
  row << 1, 1;
  const DenseTensor3 summed = mode_product(ones, row, 1);
  REQUIRE(summed.dims() == Dims{1, 2, 2});
  for (double v : summed.values()) CHECK(v == 2.0);

  const Matrix v = oracle::gaussian(4, 3, g);
  const DenseTensor3 prod = mode_product(t, v, 1);
  REQUIRE(prod.dims() == Dims{4, 2, 2});
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int m = 0; m < 4; ++m) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += v(m, i) * t(i, j, k);
        CHECK(prod(m, j, k) == doctest::Approx(acc).epsilon(1e-14));
      }

  CHECK_THROWS_AS(mode_product(t, Matrix::Identity(4, 4), 1), DimensionError);
}

TEST_CASE("tucker_to_dense basic identities") {
  TuckerPoint x;
  x.U1 = Matrix::Zero(3, 1);
  x.U2 = Matrix::Zero(2, 1);
  x.U3 = Matrix::Zero(4, 1);
  x.U1(0, 0) = x.U2(0, 0) = x.U3(0, 0) = 1.0;
  x.G = DenseTensor3(1, 1, 1);
  x.G(0, 0, 0) = -2.5;
  const DenseTensor3 t = tucker_to_dense(x);
  CHECK(t(0, 0, 0) == -2.5);
  double off = 0.0;
  for (double v : t.values()) off += std::abs(v);
  CHECK(off == 2.5);

  auto g = oracle::rng(10);
  TuckerPoint idp;
  idp.U1 = Matrix::Identity(2, 2);
  idp.U2 = Matrix::Identity(3, 3);
  idp.U3 = Matrix::Identity(2, 2);
  idp.G = oracle::gaussian_tensor(2, 3, 2, g);
  CHECK(tucker_to_dense(idp).values() == idp.G.values());

  const TuckerPoint rnd = rand_point({5, 4, 3}, {2, 2, 2}, 11);
  const DenseTensor3 a = tucker_to_dense(rnd);
  const DenseTensor3 b = oracle::tucker_dense(rnd);
  CHECK((unfold(a, 1) - oracle::unfold(b, 1)).norm() < 1e-12);
}

TEST_CASE("tucker unfolding matches the Kronecker identity") {
  const TuckerPoint x = rand_point({4, 3, 5}, {2, 2, 2}, 12);
  const DenseTensor3 t = tucker_to_dense(x);
  const Matrix g1 = unfold(x.G, 1), g2 = unfold(x.G, 2), g3 = unfold(x.G, 3);
  CHECK((unfold(t, 1) - x.U1 * g1 * oracle::kron(x.U3, x.U2).transpose()).norm() <
        1e-12);
  CHECK((unfold(t, 2) - x.U2 * g2 * oracle::kron(x.U3, x.U1).transpose()).norm() <
        1e-12);
  CHECK((unfold(t, 3) - x.U3 * g3 * oracle::kron(x.U2, x.U1).transpose()).norm() <
        1e-12);
}

TEST_CASE("sparse tensor construction validates") {
  CHECK_THROWS_AS(SparseTensor3({2, 2, 2}, {{0, 0, 2, 1.0}}), DimensionError);
  CHECK_THROWS_AS(SparseTensor3({2, 2, 2}, {{0, 1, 0, 1.0}, {0, 1, 0, 2.0}}),
                  Error);
  const SparseTensor3 t({2, 2, 2}, {{1, 1, 1, 3.0}, {0, 0, 0, 1.0}});
  CHECK(t.entries().front().i1 == 0);  // sorted at construction
  CHECK(t.entries().back().value == 3.0);
}

TEST_CASE("sparse_eval_tucker against the dense oracle") {
  const SparseTensor3 empty({4, 4, 4}, {});
  const TuckerPoint x = rand_point({4, 4, 4}, {2, 2, 2}, 13);
  CHECK(sparse_eval_tucker(x, empty).nnz() == 0);

  const DenseTensor3 dense = oracle::tucker_dense(x);
  const SparseTensor3 model = sparse_eval_tucker(x, full_index_set({4, 4, 4}));
  for (const SparseEntry& e : model.entries())
    CHECK(e.value ==
          doctest::Approx(dense(e.i1, e.i2, e.i3)).epsilon(1e-12));

  const SparseTensor3 one({4, 4, 4}, {{0, 0, 0, 0.0}});
  CHECK(sparse_eval_tucker(x, one).entries()[0].value ==
        doctest::Approx(dense(0, 0, 0)).epsilon(1e-12));
}

TEST_CASE("sparse_kron_contract against the dense Kronecker oracle") {
  auto g = oracle::rng(14);
  const TuckerPoint x = rand_point({5, 4, 3}, {2, 2, 2}, 15);
  const Matrix g1 = unfold(x.G, 1), g2 = unfold(x.G, 2), g3 = unfold(x.G, 3);

  // zero-valued entries produce a zero matrix
  {
    auto gg = oracle::rng(14);
    SparseTensor3 s = random_subset(x.dims(), 0.4, gg);
    s = s.with_values(std::vector<double>(s.nnz(), 0.0));
    for (int mode = 1; mode <= 3; ++mode)
      CHECK(sparse_kron_contract(s, x, mode).norm() == 0.0);
  }

  const SparseTensor3 unit({5, 4, 3}, {{0, 0, 0, 1.0}});
  const Matrix m1 = sparse_kron_contract(unit, x, 1);
  const Matrix expected_row =
      g1 * oracle::kron(x.U3.row(0), x.U2.row(0)).transpose();
  CHECK((m1.row(0).transpose() - expected_row).norm() < 1e-12);
  CHECK(m1.bottomRows(4).norm() == 0.0);

  const SparseTensor3 s = random_subset(x.dims(), 0.5, g);
  DenseTensor3 sd(5, 4, 3);
  for (const SparseEntry& e : s.entries()) sd(e.i1, e.i2, e.i3) = e.value;
  const Matrix s1 = oracle::unfold(sd, 1), s2 = oracle::unfold(sd, 2),
               s3 = oracle::unfold(sd, 3);
  const double scale = std::max(1.0, s.value_norm());
  CHECK((sparse_kron_contract(s, x, 1) -
         s1 * oracle::kron(x.U3, x.U2) * g1.transpose())
            .norm() < 1e-12 * scale);
  CHECK((sparse_kron_contract(s, x, 2) -
         s2 * oracle::kron(x.U3, x.U1) * g2.transpose())
            .norm() < 1e-12 * scale);
  CHECK((sparse_kron_contract(s, x, 3) -
         s3 * oracle::kron(x.U2, x.U1) * g3.transpose())
            .norm() < 1e-12 * scale);
}

TEST_CASE("sparse_core_contract against the dense oracle") {
  auto g = oracle::rng(16);
  const TuckerPoint x = rand_point({5, 4, 3}, {2, 2, 2}, 17);

  SparseTensor3 s = random_subset(x.dims(), 0.5, g);
  CHECK(sparse_core_contract(s.with_values(std::vector<double>(s.nnz(), 0.0)), x)
            .norm() == 0.0);

  const SparseTensor3 unit({5, 4, 3}, {{1, 2, 0, 1.0}});
  const DenseTensor3 rank1 = sparse_core_contract(unit, x);
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a)
        CHECK(rank1(a, b, c) ==
              doctest::Approx(x.U1(1, a) * x.U2(2, b) * x.U3(0, c)).epsilon(1e-14));

  DenseTensor3 sd(5, 4, 3);
  for (const SparseEntry& e : s.entries()) sd(e.i1, e.i2, e.i3) = e.value;
  const DenseTensor3 expected = mode_product(
      mode_product(mode_product(sd, x.U1.transpose(), 1), x.U2.transpose(), 2),
      x.U3.transpose(), 3);
  const DenseTensor3 got = sparse_core_contract(s, x);
  CHECK((unfold(got, 1) - unfold(expected, 1)).norm() <
        1e-12 * std::max(1.0, expected.norm()));
}

TEST_CASE("kernel oracle sweep over small shapes") {
  auto g = oracle::rng(18);
  std::uint64_t seed = 100;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> dim_pick(2, 6), rank_pick(1, 3);
    const Dims dims{dim_pick(g), dim_pick(g), dim_pick(g)};
    Dims ranks{rank_pick(g), rank_pick(g), rank_pick(g)};
    for (int d = 0; d < 3; ++d) ranks[d] = std::min(ranks[d], dims[d]);
    // keep every rank within the product of the other two
    ranks[0] = std::min(ranks[0], ranks[1] * ranks[2]);
    ranks[1] = std::min(ranks[1], ranks[0] * ranks[2]);
    ranks[2] = std::min(ranks[2], ranks[0] * ranks[1]);
    const TuckerPoint x = rand_point(dims, ranks, seed++);
    const DenseTensor3 dense = oracle::tucker_dense(x);
    const SparseTensor3 s = random_subset(dims, 0.6, g);

    const SparseTensor3 model = sparse_eval_tucker(x, s);
    for (const SparseEntry& e : model.entries())
      CHECK(e.value == doctest::Approx(dense(e.i1, e.i2, e.i3)).epsilon(1e-12));

    DenseTensor3 sd(dims[0], dims[1], dims[2]);
    for (const SparseEntry& e : s.entries()) sd(e.i1, e.i2, e.i3) = e.value;
    const Matrix g1 = unfold(x.G, 1);
    const Matrix expected =
        oracle::unfold(sd, 1) * oracle::kron(x.U3, x.U2) * g1.transpose();
    CHECK((sparse_kron_contract(s, x, 1) - expected).norm() <
          1e-12 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("threaded kernels are deterministic and match serial results") {
  auto g = oracle::rng(19);
  const TuckerPoint x = rand_point({6, 5, 4}, {2, 2, 2}, 20);
  const SparseTensor3 s = random_subset(x.dims(), 0.7, g);

  const Matrix serial = sparse_kron_contract(s, x, 1, 1);
  const Matrix par_a = sparse_kron_contract(s, x, 1, 3);
  const Matrix par_b = sparse_kron_contract(s, x, 1, 3);
  CHECK(par_a == par_b);  // fixed partition, fixed combine order
  CHECK((par_a - serial).norm() < 1e-12 * std::max(1.0, serial.norm()));

  const SparseTensor3 ev_serial = sparse_eval_tucker(x, s, 1);
  const SparseTensor3 ev_par = sparse_eval_tucker(x, s, 4);
  for (std::size_t i = 0; i < ev_serial.nnz(); ++i)
    CHECK(ev_serial.entries()[i].value == ev_par.entries()[i].value);
}
