#include "dircount/exact.hpp"

#include <numeric>
#include <random>

#include "dircount/errors.hpp"
#include "doctest.h"

using namespace dircount;

namespace {

IMat imat(int rows, int cols, std::initializer_list<long> entries) {
  IMat m(rows, cols);
  REQUIRE(entries.size() == static_cast<size_t>(rows) * cols);
  size_t idx = 0;
  for (long v : entries) m.data[idx++] = v;
  return m;
}

IMat random_matrix(std::mt19937_64& rng, int rows, int cols, int bound) {
  std::uniform_int_distribution<int> dist(-bound, bound);
  IMat m(rows, cols);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

bool is_zero(const IMat& m) {
  for (const auto& v : m.data)
    if (v != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("determinants") {
  CHECK(determinant(IMat::identity(4)) == 1);
  CHECK(determinant(imat(2, 2, {2, 1, 1, 1})) == 1);
  CHECK(determinant(imat(2, 2, {0, 1, 1, 0})) == -1);
  CHECK(determinant(imat(3, 3, {2, 0, 0, 0, 3, 0, 0, 0, 5})) == 30);
  CHECK(determinant(imat(2, 2, {1, 2, 2, 4})) == 0);
  CHECK(determinant(imat(3, 3, {0, 2, 1, 1, 0, 0, 0, 1, 1})) == -1);
}

TEST_CASE("column echelon factors the matrix with a unimodular transform") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 50; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 5);
    int cols = 1 + static_cast<int>(rng() % 5);
    IMat a = random_matrix(rng, rows, cols, 6);
    ColumnEchelon ce = column_echelon(a);
    CHECK(is_unimodular(ce.transform));
    CHECK(multiply(a, ce.transform) == ce.echelon);
    for (int j = ce.rank; j < cols; ++j)
      for (int i = 0; i < rows; ++i) CHECK(ce.echelon.at(i, j) == 0);
    for (int j = 0; j < ce.rank; ++j) {
      bool nonzero = false;
      for (int i = 0; i < rows; ++i) nonzero |= (ce.echelon.at(i, j) != 0);
      CHECK(nonzero);
    }
  }
}

TEST_CASE("integer kernels are saturated") {
  SUBCASE("single relation with a common factor") {
    IMat k = integer_kernel(imat(1, 2, {2, 4}));
    REQUIRE(k.cols == 1);
    // The primitive generator (2, -1) up to sign, never the doubled (4, -2).
    Int g = gcd(k.at(0, 0), k.at(1, 0));
    CHECK((g == 1 || g == -1));
    CHECK(k.at(0, 0) * 2 + k.at(1, 0) * 4 == 0);
  }
  SUBCASE("full-rank matrix has trivial kernel") {
    CHECK(integer_kernel(imat(2, 2, {1, 1, 0, 2})).cols == 0);
  }
  SUBCASE("sum-zero sublattice of rank two") {
    IMat k = integer_kernel(imat(1, 3, {1, 1, 1}));
    REQUIRE(k.cols == 2);
    for (int j = 0; j < 2; ++j)
      CHECK(k.at(0, j) + k.at(1, j) + k.at(2, j) == 0);
    // (1, -1, 0) must be an integral combination: solve on two coordinates.
    IMat square(2, 2);
    square.at(0, 0) = k.at(0, 0);
    square.at(0, 1) = k.at(0, 1);
    square.at(1, 0) = k.at(1, 0);
    square.at(1, 1) = k.at(1, 1);
    Int d = determinant(square);
    CHECK((d == 1 || d == -1));
  }
  SUBCASE("kernel columns always satisfy the relations") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
      int rows = 1 + static_cast<int>(rng() % 4);
      int cols = 1 + static_cast<int>(rng() % 5);
      IMat a = random_matrix(rng, rows, cols, 5);
      IMat k = integer_kernel(a);
      if (k.cols > 0) CHECK(is_zero(multiply(a, k)));
      CHECK(k.cols == cols - column_echelon(a).rank);
    }
  }
}

TEST_CASE("unimodular completion") {
  SUBCASE("a primitive column in three dimensions") {
    IMat cols = imat(3, 1, {2, -1, -1});
    IMat full = complete_to_unimodular(cols);
    CHECK(is_unimodular(full));
    for (int i = 0; i < 3; ++i) CHECK(full.at(i, 0) == cols.at(i, 0));
  }
  SUBCASE("two primitive columns in four dimensions") {
    IMat cols = imat(4, 2, {1, 0, 0, 1, 0, 3, 2, 0});
    IMat full = complete_to_unimodular(cols);
    CHECK(is_unimodular(full));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) CHECK(full.at(i, j) == cols.at(i, j));
  }
  SUBCASE("imprimitive or dependent columns are rejected") {
    CHECK_THROWS_AS(complete_to_unimodular(imat(3, 1, {2, 0, 0})),
                    SolverError);
    CHECK_THROWS_AS(complete_to_unimodular(imat(2, 2, {1, 2, 1, 2})),
                    SolverError);
  }
  SUBCASE("identity columns complete to a permutation-like basis") {
    IMat full = complete_to_unimodular(imat(3, 1, {0, 1, 0}));
    CHECK(is_unimodular(full));
  }
}

TEST_CASE("exact solves and inverses") {
  RMat a = rational_from(imat(3, 3, {2, 1, 0, 1, 3, 1, 0, 1, 2}));
  std::vector<Rat> b = {Rat(1), Rat(0), Rat(-1)};
  std::vector<Rat> x = solve_rational(a, b);
  // Residual must vanish exactly.
  for (int i = 0; i < 3; ++i) {
    Rat acc = 0;
    for (int j = 0; j < 3; ++j) acc += a.at(i, j) * x[j];
    CHECK(acc == b[i]);
  }

  RMat inv = rational_inverse(a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rat acc = 0;
      for (int k = 0; k < 3; ++k) acc += a.at(i, k) * inv.at(k, j);
      CHECK(acc == Rat(i == j ? 1 : 0));
    }

  CHECK_THROWS_AS(solve_rational(rational_from(imat(2, 2, {1, 2, 2, 4})),
                                 {Rat(1), Rat(1)}),
                  SolverError);
}

TEST_CASE("integrality detection") {
  RMat r(1, 2);
  r.at(0, 0) = Rat(4, 2);
  r.at(0, 1) = Rat(-3);
  std::optional<IMat> m = to_integer(r);
  REQUIRE(m.has_value());
  CHECK(m->at(0, 0) == 2);
  CHECK(m->at(0, 1) == -3);
  r.at(0, 1) = Rat(1, 3);
  CHECK(!to_integer(r).has_value());
}
