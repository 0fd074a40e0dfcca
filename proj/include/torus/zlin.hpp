#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torus {

using Int = mpz_class;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> data);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);
  static IntMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows);
  static IntMatrix column_vector(const std::vector<Int>& v);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }

  Int& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  const std::vector<Int>& data() const { return a_; }

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntMatrix operator-() const;
  IntMatrix scaled(const Int& s) const;
  bool operator==(const IntMatrix& o) const;
  bool operator!=(const IntMatrix& o) const { return !(*this == o); }
  bool operator<(const IntMatrix& o) const;

  bool is_zero() const;
  bool is_identity() const;

  IntMatrix col_range(std::size_t begin, std::size_t end) const;
  IntMatrix row_range(std::size_t begin, std::size_t end) const;
  IntMatrix select_cols(const std::vector<std::size_t>& idx) const;
  IntMatrix select_rows(const std::vector<std::size_t>& idx) const;
  std::vector<Int> col(std::size_t j) const;
  std::vector<Int> row(std::size_t i) const;
  void set_block(std::size_t r0, std::size_t c0, const IntMatrix& b);

  static IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
  static IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
  static IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b);
  static IntMatrix block_diag(const std::vector<IntMatrix>& blocks);

  std::string to_string() const;

  // Row operations used by the elimination kernels.
  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);
  void add_row_multiple(std::size_t dst, std::size_t src, const Int& q);  // row dst += q * row src
  void add_col_multiple(std::size_t dst, std::size_t src, const Int& q);  // col dst += q * col src
  void negate_row(std::size_t i);
  void negate_col(std::size_t j);

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Int> a_;
};

struct SnfResult {
  IntMatrix D, U, V;           // U * A * V = D
  std::vector<Int> divisors;   // nonzero diagonal entries, d_1 | d_2 | ...
  std::size_t rank = 0;
};

// Smith normal form with unimodular certificates. Pivot: smallest nonzero |entry|,
// ties broken by row-major position. Re-verified before returning.
SnfResult snf(const IntMatrix& A);

// Columns form a saturated basis of {x : A x = 0}, in column Hermite normal form.
IntMatrix kernel_basis(const IntMatrix& A);

struct CokernelStructure {
  std::vector<Int> torsion;  // divisors > 1
  std::size_t free_rank = 0;
};
CokernelStructure cokernel_structure(const IntMatrix& A);

struct SolveObstruction {
  // y^T A == 0 (mod modulus) and y^T b != 0 (mod modulus); modulus 0 means exact.
  std::vector<Int> y;
  Int modulus;
};

struct SolveResult {
  std::optional<IntMatrix> x;
  std::optional<SolveObstruction> obstruction;
  explicit operator bool() const { return x.has_value(); }
};

// Integer solution of A X = B (B may have several columns; all must be solvable).
SolveResult solve(const IntMatrix& A, const IntMatrix& B);

bool check_obstruction(const IntMatrix& A, const IntMatrix& b, const SolveObstruction& ob);

// Column Hermite normal form of the Z-span of the columns (zero columns dropped).
IntMatrix span_basis(const IntMatrix& A);
// Saturation of the column span inside Z^rows.
IntMatrix saturate(const IntMatrix& A);
// Every column of B lies in the Z-span of the columns of A.
bool span_contains(const IntMatrix& A, const IntMatrix& B);
bool is_saturated(const IntMatrix& A);

std::size_t rank(const IntMatrix& A);
Int determinant(const IntMatrix& A);
bool is_unimodular(const IntMatrix& A);
IntMatrix inverse_unimodular(const IntMatrix& A);
// L with L * K = I for a saturated K of full column rank.
IntMatrix left_inverse(const IntMatrix& K);

// Row indices of a maximal Q-linearly independent set of rows (greedy, in order).
std::vector<std::size_t> independent_rows(const IntMatrix& A);

struct ExtGcd {
  Int g;
  std::vector<Int> coeffs;  // sum coeffs[i] * v[i] == g
};
ExtGcd ext_gcd(const std::vector<Int>& v);

}  // namespace torus
