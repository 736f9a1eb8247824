#include "dircount/exact.hpp"

#include <utility>

#include "dircount/errors.hpp"

namespace dircount {

IMat IMat::identity(int n) {
  IMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool operator==(const IMat& a, const IMat& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

IMat transpose(const IMat& a) {
  IMat t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

IMat multiply(const IMat& a, const IMat& b) {
  if (a.cols != b.rows) throw SolverError("matrix product shape mismatch");
  IMat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const Int& left = a.at(i, k);
      if (left == 0) continue;
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += left * b.at(k, j);
    }
  return c;
}

std::vector<Int> multiply(const IMat& a, const std::vector<Int>& x) {
  if (a.cols != static_cast<int>(x.size()))
    throw SolverError("matrix-vector shape mismatch");
  std::vector<Int> y(a.rows, 0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) y[i] += a.at(i, j) * x[j];
  return y;
}

Int determinant(const IMat& a) {
  if (a.rows != a.cols) throw SolverError("determinant of non-square matrix");
  const int n = a.rows;
  if (n == 0) return 1;
  // Bareiss fraction-free elimination: every division below is exact.
  IMat m = a;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(swap_row, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
      }
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : Int(-m.at(n - 1, n - 1));
}

bool is_unimodular(const IMat& a) {
  if (a.rows != a.cols) return false;
  Int d = determinant(a);
  return d == 1 || d == -1;
}

namespace {

void negate_column(IMat& m, int j) {
  for (int i = 0; i < m.rows; ++i) m.at(i, j) = -m.at(i, j);
}

void swap_columns(IMat& m, int j, int k) {
  for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, j), m.at(i, k));
}

// col_p <- u * col_p + v * col_j ; col_j <- -bg * col_p_old + ag * col_j.
// With u*a + v*b = g, ag = a/g, bg = b/g this is a determinant-one operation.
void combine_columns(IMat& m, int p, int j, const Int& u, const Int& v,
                     const Int& ag, const Int& bg) {
  for (int i = 0; i < m.rows; ++i) {
    Int old_p = m.at(i, p);
    Int old_j = m.at(i, j);
    m.at(i, p) = u * old_p + v * old_j;
    m.at(i, j) = ag * old_j - bg * old_p;
  }
}

}  // namespace

ColumnEchelon column_echelon(const IMat& a) {
  ColumnEchelon out;
  out.echelon = a;
  out.transform = IMat::identity(a.cols);
  IMat& e = out.echelon;
  IMat& u = out.transform;

  int pivot = 0;
  for (int row = 0; row < a.rows && pivot < a.cols; ++row) {
    int lead = -1;
    for (int j = pivot; j < a.cols; ++j)
      if (e.at(row, j) != 0) {
        lead = j;
        break;
      }
    if (lead < 0) continue;
    if (lead != pivot) {
      swap_columns(e, lead, pivot);
      swap_columns(u, lead, pivot);
    }
    for (int j = pivot + 1; j < a.cols; ++j) {
      if (e.at(row, j) == 0) continue;
      Int g, cu, cv;
      mpz_gcdext(g.get_mpz_t(), cu.get_mpz_t(), cv.get_mpz_t(),
                 e.at(row, pivot).get_mpz_t(), e.at(row, j).get_mpz_t());
      Int ag = e.at(row, pivot) / g;
      Int bg = e.at(row, j) / g;
      combine_columns(e, pivot, j, cu, cv, ag, bg);
      combine_columns(u, pivot, j, cu, cv, ag, bg);
    }
    if (e.at(row, pivot) < 0) {
      negate_column(e, pivot);
      negate_column(u, pivot);
    }
    ++pivot;
  }
  out.rank = pivot;
  return out;
}

IMat integer_kernel(const IMat& a) {
  ColumnEchelon ce = column_echelon(a);
  const int dim = a.cols - ce.rank;
  IMat kernel(a.cols, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < a.cols; ++i)
      kernel.at(i, j) = ce.transform.at(i, ce.rank + j);
  return kernel;
}

IMat complete_to_unimodular(const IMat& primitive_columns) {
  const int n = primitive_columns.rows;
  const int k = primitive_columns.cols;
  if (k > n) throw SolverError("more columns than ambient dimension");

  // Column echelon of the transpose gives a unimodular U with
  // U^T * A = [T; 0]; the input is primitive iff T is unimodular, and then
  // the last n-k columns of (U^T)^{-1} complete it.
  ColumnEchelon ce = column_echelon(transpose(primitive_columns));
  if (ce.rank != k)
    throw SolverError("columns are linearly dependent; cannot complete");
  IMat top(k, k);
  IMat reduced = multiply(transpose(ce.transform), primitive_columns);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) top.at(i, j) = reduced.at(i, j);
  if (!is_unimodular(top))
    throw SolverError(
        "columns do not extend to a basis of the integer lattice");

  RMat inv = rational_inverse(rational_from(transpose(ce.transform)));
  std::optional<IMat> inv_int = to_integer(inv);
  if (!inv_int) throw SolverError("transform inverse is not integral");

  IMat full(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) full.at(i, j) = primitive_columns.at(i, j);
    for (int j = k; j < n; ++j) full.at(i, j) = inv_int->at(i, j);
  }
  if (!is_unimodular(full))
    throw SolverError("basis completion failed the determinant check");
  return full;
}

RMat rational_from(const IMat& a) {
  RMat r(a.rows, a.cols);
  for (size_t idx = 0; idx < a.data.size(); ++idx) r.data[idx] = a.data[idx];
  return r;
}

std::vector<Rat> solve_rational(RMat a, std::vector<Rat> b) {
  if (a.rows != a.cols || a.rows != static_cast<int>(b.size()))
    throw SolverError("linear solve shape mismatch");
  const int n = a.rows;
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int i = k; i < n; ++i)
      if (a.at(i, k) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) throw SolverError("singular matrix in exact solve");
    if (pivot != k) {
      for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(pivot, j));
      std::swap(b[k], b[pivot]);
    }
    for (int i = k + 1; i < n; ++i) {
      if (a.at(i, k) == 0) continue;
      Rat factor = a.at(i, k) / a.at(k, k);
      for (int j = k; j < n; ++j) a.at(i, j) -= factor * a.at(k, j);
      b[i] -= factor * b[k];
    }
  }
  std::vector<Rat> x(n);
  for (int i = n - 1; i >= 0; --i) {
    Rat acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a.at(i, j) * x[j];
    x[i] = acc / a.at(i, i);
  }
  return x;
}

RMat rational_inverse(const RMat& a) {
  if (a.rows != a.cols) throw SolverError("inverse of non-square matrix");
  const int n = a.rows;
  RMat inv(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<Rat> e(n);
    e[col] = 1;
    std::vector<Rat> x = solve_rational(a, std::move(e));
    for (int i = 0; i < n; ++i) inv.at(i, col) = x[i];
  }
  return inv;
}

std::optional<IMat> to_integer(const RMat& a) {
  IMat m(a.rows, a.cols);
  for (size_t idx = 0; idx < a.data.size(); ++idx) {
    Rat value = a.data[idx];
    value.canonicalize();
    if (value.get_den() != 1) return std::nullopt;
    m.data[idx] = value.get_num();
  }
  return m;
}

}  // namespace dircount
