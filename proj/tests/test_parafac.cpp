#include <catch2/catch_amalgamated.hpp>

#include "fhtlr/parafac.hpp"
#include "test_support.hpp"

using namespace fhtlr;
using test_support::accumulate_rank1;
using test_support::parafac_from_dense;

namespace {

ParafacModel all_ones(std::vector<int> dims, int rank) {
  ParafacModel m(std::move(dims), rank);
  for (int d = 0; d < m.order(); ++d) {
    for (double& v : m.factor(d).data) v = 1.0;
  }
  return m;
}

}  // namespace

TEST_CASE("eval_entry trivial and derived cases") {
  CHECK(all_ones({2, 2, 2}, 1).eval_entry({0, 1, 0}) == 1.0);
  CHECK(all_ones({2, 2, 2}, 2).eval_entry({1, 1, 1}) == 2.0);

  const auto model = ParafacModel::random({2, 2, 2}, 2, 0.7, 99);
  const DenseTensor full = reconstruct(model);
  for (std::size_t flat = 0; flat < full.data.size(); ++flat) {
    const MultiIndex idx = unflatten(model.dims(), flat);
    REQUIRE(model.eval_entry(idx) == Catch::Approx(full.at(idx)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(model.eval_entry({0, 0}), IndexError);
  CHECK_THROWS_AS(model.eval_entry({0, 0, 2}), IndexError);
}

TEST_CASE("khatri_rao hand example and laws") {
  Matrix a(2, 2);
  a.at(0, 0) = 1; a.at(0, 1) = 2;
  a.at(1, 0) = 3; a.at(1, 1) = 4;
  Matrix b(2, 2);
  b.at(0, 0) = 0; b.at(0, 1) = 1;
  b.at(1, 0) = 1; b.at(1, 1) = 0;

  const Matrix kr = khatri_rao(std::vector<Matrix>{a, b});
  REQUIRE(kr.rows == 4);
  REQUIRE(kr.cols == 2);
  const std::vector<double> expected = {0, 2, 1, 0, 0, 4, 3, 0};  // column-wise Kronecker
  CHECK(kr.data == expected);

  // single input: identity of the product
  const Matrix single = khatri_rao(std::vector<Matrix>{a});
  CHECK(single.data == a.data);

  // shape law and associativity of the ordered product
  Rng rng(5);
  Matrix c(3, 2);
  for (double& v : c.data) v = next_unit(rng);
  const Matrix abc = khatri_rao(std::vector<Matrix>{a, b, c});
  REQUIRE(abc.rows == 12);
  const Matrix ab_c = khatri_rao(std::vector<Matrix>{khatri_rao(std::vector<Matrix>{a, b}), c});
  const Matrix a_bc = khatri_rao(std::vector<Matrix>{a, khatri_rao(std::vector<Matrix>{b, c})});
  for (std::size_t i = 0; i < abc.data.size(); ++i) {
    REQUIRE(abc.data[i] == Catch::Approx(ab_c.data[i]).margin(1e-12));
    REQUIRE(abc.data[i] == Catch::Approx(a_bc.data[i]).margin(1e-12));
  }

  Matrix wrong(2, 3);
  CHECK_THROWS_AS(khatri_rao(std::vector<Matrix>{a, wrong}), ShapeError);
}

TEST_CASE("matricize hand examples") {
  const auto ones = all_ones({2, 2, 2}, 1);
  for (int d = 0; d < 3; ++d) {
    const Matrix m = matricize(ones, d);
    REQUIRE(m.rows == 4);
    REQUIRE(m.cols == 2);
    for (double v : m.data) REQUIRE(v == 1.0);
  }

  // K = 1 factors ([1,2], [1,1], [3]), unfolding along the last mode
  ParafacModel model({2, 2, 1}, 1);
  model.factor(0).at(0, 0) = 1.0;
  model.factor(0).at(1, 0) = 2.0;
  model.factor(1).at(0, 0) = 1.0;
  model.factor(1).at(1, 0) = 1.0;
  model.factor(2).at(0, 0) = 3.0;
  const Matrix m = matricize(model, 2);
  REQUIRE(m.rows == 4);
  REQUIRE(m.cols == 1);
  CHECK(m.data == std::vector<double>{3, 3, 6, 6});
}

TEST_CASE("matricization agrees with eval_entry under the documented row order") {
  const auto model = ParafacModel::random({3, 2, 4}, 2, 0.8, 17);
  for (int d = 0; d < model.order(); ++d) {
    const Matrix m = matricize(model, d);
    std::vector<int> other_dims;
    for (int j = 0; j < model.order(); ++j) {
      if (j != d) other_dims.push_back(model.dims()[j]);
    }
    for (int r = 0; r < m.rows; ++r) {
      const MultiIndex rest = unflatten(other_dims, static_cast<std::size_t>(r));
      for (int c = 0; c < m.cols; ++c) {
        MultiIndex idx(model.dims().size());
        std::size_t j = 0;
        for (std::size_t dim = 0; dim < idx.size(); ++dim) {
          idx[dim] = static_cast<int>(dim) == d ? c : rest[j++];
        }
        REQUIRE(m.at(r, c) == Catch::Approx(model.eval_entry(idx)).margin(1e-12));
      }
    }
  }
}

TEST_CASE("unmatricize inverts matricize on every mode") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> dims(2 + next_below(rng, 3));
    for (auto& d : dims) d = 1 + static_cast<int>(next_below(rng, 4));
    const int rank = 1 + static_cast<int>(next_below(rng, 3));
    const auto model = ParafacModel::random(dims, rank, 0.6, 1000 + trial);
    const DenseTensor full = reconstruct(model);
    for (int d = 0; d < model.order(); ++d) {
      const DenseTensor back = unmatricize(matricize(model, d), d, dims);
      REQUIRE(back.data.size() == full.data.size());
      for (std::size_t i = 0; i < full.data.size(); ++i) {
        REQUIRE(back.data[i] == Catch::Approx(full.data[i]).margin(1e-12));
      }
    }
  }
  const auto model = ParafacModel::random({2, 3}, 2, 0.5, 4);
  CHECK_THROWS_AS(unmatricize(matricize(model, 0), 1, model.dims()), ShapeError);
}

TEST_CASE("reconstruct trivial cases and brute-force oracle") {
  ParafacModel scalar({1, 1, 1}, 1);
  scalar.factor(0).at(0, 0) = 2.0;
  scalar.factor(1).at(0, 0) = 3.0;
  scalar.factor(2).at(0, 0) = 4.0;
  CHECK(reconstruct(scalar).data == std::vector<double>{24.0});

  // multilinearity: negating one factor column negates the tensor
  auto pos = ParafacModel::random({2, 2, 2}, 1, 0.9, 31);
  auto neg = pos;
  for (double& v : neg.factor(0).data) v = -v;
  const auto t_pos = reconstruct(pos);
  const auto t_neg = reconstruct(neg);
  for (std::size_t i = 0; i < t_pos.data.size(); ++i) {
    REQUIRE(t_neg.data[i] == Catch::Approx(-t_pos.data[i]).margin(1e-15));
  }

  const auto model = ParafacModel::random({3, 4, 2, 3}, 3, 0.5, 57);
  const auto oracle = accumulate_rank1(model);
  const auto fast = reconstruct(model);
  for (std::size_t i = 0; i < oracle.data.size(); ++i) {
    REQUIRE(fast.data[i] == Catch::Approx(oracle.data[i]).epsilon(1e-12).margin(1e-12));
  }

  CHECK_THROWS_AS(reconstruct(ParafacModel({300, 300, 300}, 1)), CapacityError);
}

TEST_CASE("parameter count formula") {
  // grid world: (5 + 5 + 4 + 5) * 8 = 152
  CHECK(count_params(ParafacModel({5, 5, 4, 5}, 8)) == 152);
  CHECK(count_params(ParafacModel({2, 2, 2}, 0)) == 0);
  CHECK(count_params(ParafacModel({2, 2, 2}, 3)) == 18);  // (2+2+2)*3

  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims(1 + next_below(rng, 4));
    std::size_t sum = 0;
    for (auto& d : dims) {
      d = 1 + static_cast<int>(next_below(rng, 7));
      sum += d;
    }
    const int rank = static_cast<int>(next_below(rng, 5));
    const auto model = ParafacModel::random(dims, rank, 0.1, trial);
    REQUIRE(count_params(model) == sum * static_cast<std::size_t>(rank));
    // matches the stored reals exactly
    std::size_t stored = 0;
    for (int d = 0; d < model.order(); ++d) stored += model.factor(d).data.size();
    REQUIRE(count_params(model) == stored);
  }
}

TEST_CASE("exact dense embedding reproduces arbitrary tensors") {
  Rng rng(77);
  DenseTensor x({3, 2, 4});
  for (double& v : x.data) v = 2.0 * next_unit(rng) - 1.0;
  const ParafacModel model = parafac_from_dense(x);
  for (std::size_t flat = 0; flat < x.data.size(); ++flat) {
    const MultiIndex idx = unflatten(x.dims, flat);
    REQUIRE(model.eval_entry(idx) == Catch::Approx(x.at(idx)).margin(1e-12));
  }
}

TEST_CASE("eval equals reconstruct on larger random models") {
  Rng rng(88);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> dims = {1 + static_cast<int>(next_below(rng, 10)),
                             1 + static_cast<int>(next_below(rng, 10)),
                             1 + static_cast<int>(next_below(rng, 10)),
                             1 + static_cast<int>(next_below(rng, 8))};
    const auto model = ParafacModel::random(dims, 4, 0.4, 500 + trial);
    const auto full = reconstruct(model);
    for (std::size_t flat = 0; flat < full.data.size(); ++flat) {
      const MultiIndex idx = unflatten(dims, flat);
      const double a = model.eval_entry(idx);
      const double b = full.data[flat];
      REQUIRE(a == Catch::Approx(b).epsilon(1e-12).margin(1e-15));
    }
  }
}
