// Exact integer and rational dense linear algebra (GMP-backed), sized for
// the small matrices that arise here: echelon forms with unimodular
// transforms, saturated integer kernels, basis completion, determinants,
// and rational solves with integrality checks.

#ifndef DIRCOUNT_EXACT_HPP
#define DIRCOUNT_EXACT_HPP

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace dircount {

using Int = mpz_class;
using Rat = mpq_class;

struct IMat {
  int rows = 0;
  int cols = 0;
  std::vector<Int> data;  // row-major

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

  static IMat identity(int n);

  Int& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  const Int& at(int i, int j) const {
    return data[static_cast<size_t>(i) * cols + j];
  }
};

struct RMat {
  int rows = 0;
  int cols = 0;
  std::vector<Rat> data;  // row-major

  RMat() = default;
  RMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

  Rat& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  const Rat& at(int i, int j) const {
    return data[static_cast<size_t>(i) * cols + j];
  }
};

bool operator==(const IMat& a, const IMat& b);

IMat transpose(const IMat& a);
IMat multiply(const IMat& a, const IMat& b);
std::vector<Int> multiply(const IMat& a, const std::vector<Int>& x);

// Exact determinant of a square integer matrix (fraction-free elimination).
Int determinant(const IMat& a);

bool is_unimodular(const IMat& a);

// Column echelon form over the integers: a unimodular 'transform' U with
// A * U = 'echelon', whose first 'rank' columns are nonzero and whose
// remaining columns vanish identically.
struct ColumnEchelon {
  IMat echelon;
  IMat transform;
  int rank = 0;
};

ColumnEchelon column_echelon(const IMat& a);

// Basis of the saturated integer kernel {x integral : A x = 0}, returned as
// the columns of a cols(A) x (cols(A) - rank) matrix. Every integral solution
// is an integral combination of these columns.
IMat integer_kernel(const IMat& a);

// Given an n x k matrix whose columns extend to a basis of the integer
// lattice (a primitive set), returns an n x n unimodular matrix whose first
// k columns are exactly the input. Throws SolverError if the columns are
// dependent or the set is not primitive.
IMat complete_to_unimodular(const IMat& primitive_columns);

RMat rational_from(const IMat& a);

// Solves A x = b exactly for square nonsingular A; throws SolverError if
// singular.
std::vector<Rat> solve_rational(RMat a, std::vector<Rat> b);

// Exact inverse of a square nonsingular rational matrix.
RMat rational_inverse(const RMat& a);

// The integer matrix equal to 'a' if every entry is integral, else nullopt.
std::optional<IMat> to_integer(const RMat& a);

}  // namespace dircount

#endif  // DIRCOUNT_EXACT_HPP
