#include "torus/zlin.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace torus {

namespace {

int cmpabs(const Int& a, const Int& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Quotient rounding to nearest, so remainders stay small in absolute value.
Int rdiv(const Int& a, const Int& b) {
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Int twice = 2 * r;
  if (cmpabs(twice, b) > 0) q += 1;  // r and b share a sign under floor division
  return q;
}

struct ColumnEchelon {
  IntMatrix M, V;
  std::vector<std::size_t> pivot_rows;  // pivot row of column k
};

// A * V = M with M in column echelon form; columns >= pivot_rows.size() are zero.
ColumnEchelon column_echelon(const IntMatrix& A, bool track) {
  ColumnEchelon out;
  out.M = A;
  const std::size_t n = A.cols();
  if (track) out.V = IntMatrix::identity(n);
  IntMatrix& M = out.M;
  std::size_t c = 0;
  for (std::size_t i = 0; i < A.rows() && c < n; ++i) {
    while (true) {
      std::size_t best = n;
      for (std::size_t j = c; j < n; ++j)
        if (sgn(M(i, j)) != 0 && (best == n || cmpabs(M(i, j), M(i, best)) < 0)) best = j;
      if (best == n) break;
      if (best != c) {
        M.swap_cols(c, best);
        if (track) out.V.swap_cols(c, best);
      }
      bool clean = true;
      for (std::size_t j = c + 1; j < n; ++j) {
        if (sgn(M(i, j)) == 0) continue;
        Int q = -rdiv(M(i, j), M(i, c));
        M.add_col_multiple(j, c, q);
        if (track) out.V.add_col_multiple(j, c, q);
        if (sgn(M(i, j)) != 0) clean = false;
      }
      if (clean) {
        out.pivot_rows.push_back(i);
        ++c;
        break;
      }
    }
  }
  // Hermite normalization: positive pivots, entries left of a pivot reduced into [0, pivot).
  for (std::size_t k = 0; k < out.pivot_rows.size(); ++k) {
    std::size_t p = out.pivot_rows[k];
    if (sgn(M(p, k)) < 0) {
      M.negate_col(k);
      if (track) out.V.negate_col(k);
    }
    for (std::size_t j = 0; j < k; ++j) {
      Int q = fdiv(M(p, j), M(p, k));
      if (sgn(q) == 0) continue;
      M.add_col_multiple(j, k, -q);
      if (track) out.V.add_col_multiple(j, k, -q);
    }
  }
  return out;
}

}  // namespace

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> data)
    : r_(rows), c_(cols), a_(std::move(data)) {
  if (a_.size() != r_ * c_) throw DimensionMismatch("IntMatrix: data size");
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
  std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw DimensionMismatch("from_rows: ragged");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::from_rows(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<std::vector<long>> v;
  for (auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

IntMatrix IntMatrix::column_vector(const std::vector<Int>& v) {
  return IntMatrix(v.size(), 1, v);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(c_, r_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (c_ != o.r_) throw DimensionMismatch("matrix product");
  IntMatrix p(r_, o.c_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t k = 0; k < c_; ++k) {
      const Int& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < o.c_; ++j) {
        const Int& b = o(k, j);
        if (sgn(b) != 0) mpz_addmul(p(i, j).get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      }
    }
  return p;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  if (r_ != o.r_ || c_ != o.c_) throw DimensionMismatch("matrix sum");
  IntMatrix s = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) s.a_[i] += o.a_[i];
  return s;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (r_ != o.r_ || c_ != o.c_) throw DimensionMismatch("matrix difference");
  IntMatrix s = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) s.a_[i] -= o.a_[i];
  return s;
}

IntMatrix IntMatrix::operator-() const { return scaled(-1); }

IntMatrix IntMatrix::scaled(const Int& s) const {
  IntMatrix m = *this;
  for (auto& x : m.a_) x *= s;
  return m;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
  return r_ == o.r_ && c_ == o.c_ && a_ == o.a_;
}

bool IntMatrix::operator<(const IntMatrix& o) const {
  if (r_ != o.r_) return r_ < o.r_;
  if (c_ != o.c_) return c_ < o.c_;
  return a_ < o.a_;
}

bool IntMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return sgn(x) == 0; });
}

bool IntMatrix::is_identity() const {
  if (r_ != c_) return false;
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

IntMatrix IntMatrix::col_range(std::size_t begin, std::size_t end) const {
  IntMatrix m(r_, end - begin);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = begin; j < end; ++j) m(i, j - begin) = (*this)(i, j);
  return m;
}

IntMatrix IntMatrix::row_range(std::size_t begin, std::size_t end) const {
  IntMatrix m(end - begin, c_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < c_; ++j) m(i - begin, j) = (*this)(i, j);
  return m;
}

IntMatrix IntMatrix::select_cols(const std::vector<std::size_t>& idx) const {
  IntMatrix m(r_, idx.size());
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
  return m;
}

IntMatrix IntMatrix::select_rows(const std::vector<std::size_t>& idx) const {
  IntMatrix m(idx.size(), c_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(idx[i], j);
  return m;
}

std::vector<Int> IntMatrix::col(std::size_t j) const {
  std::vector<Int> v(r_);
  for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Int> IntMatrix::row(std::size_t i) const {
  return std::vector<Int>(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
}

void IntMatrix::set_block(std::size_t r0, std::size_t c0, const IntMatrix& b) {
  if (r0 + b.r_ > r_ || c0 + b.c_ > c_) throw DimensionMismatch("set_block");
  for (std::size_t i = 0; i < b.r_; ++i)
    for (std::size_t j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

IntMatrix IntMatrix::hstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.c_ == 0) return b;
  if (b.c_ == 0) return a;
  if (a.r_ != b.r_) throw DimensionMismatch("hstack");
  IntMatrix m(a.r_, a.c_ + b.c_);
  m.set_block(0, 0, a);
  m.set_block(0, a.c_, b);
  return m;
}

IntMatrix IntMatrix::vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.r_ == 0) return b;
  if (b.r_ == 0) return a;
  if (a.c_ != b.c_) throw DimensionMismatch("vstack");
  IntMatrix m(a.r_ + b.r_, a.c_);
  m.set_block(0, 0, a);
  m.set_block(a.r_, 0, b);
  return m;
}

IntMatrix IntMatrix::block_diag(const IntMatrix& a, const IntMatrix& b) {
  return block_diag(std::vector<IntMatrix>{a, b});
}

IntMatrix IntMatrix::block_diag(const std::vector<IntMatrix>& blocks) {
  std::size_t r = 0, c = 0;
  for (auto& b : blocks) r += b.r_, c += b.c_;
  IntMatrix m(r, c);
  std::size_t r0 = 0, c0 = 0;
  for (auto& b : blocks) {
    m.set_block(r0, c0, b);
    r0 += b.r_;
    c0 += b.c_;
  }
  return m;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < r_; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < c_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < c_; ++k) std::swap(a_[i * c_ + k], a_[j * c_ + k]);
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < r_; ++k) std::swap(a_[k * c_ + i], a_[k * c_ + j]);
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Int& q) {
  if (sgn(q) == 0) return;
  for (std::size_t k = 0; k < c_; ++k) {
    const Int& s = a_[src * c_ + k];
    if (sgn(s) != 0) mpz_addmul(a_[dst * c_ + k].get_mpz_t(), q.get_mpz_t(), s.get_mpz_t());
  }
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Int& q) {
  if (sgn(q) == 0) return;
  for (std::size_t k = 0; k < r_; ++k) {
    const Int& s = a_[k * c_ + src];
    if (sgn(s) != 0) mpz_addmul(a_[k * c_ + dst].get_mpz_t(), q.get_mpz_t(), s.get_mpz_t());
  }
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t k = 0; k < c_; ++k) a_[i * c_ + k] = -a_[i * c_ + k];
}

void IntMatrix::negate_col(std::size_t j) {
  for (std::size_t k = 0; k < r_; ++k) a_[k * c_ + j] = -a_[k * c_ + j];
}

SnfResult snf(const IntMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  IntMatrix D = A, U = IntMatrix::identity(m), V = IntMatrix::identity(n);
  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    // Pivot: smallest |entry| in the trailing block, row-major tie-break.
    std::size_t bi = m, bj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (sgn(D(i, j)) != 0 && (bi == m || cmpabs(D(i, j), D(bi, bj)) < 0)) bi = i, bj = j;
    if (bi == m) break;
    D.swap_rows(t, bi), U.swap_rows(t, bi);
    D.swap_cols(t, bj), V.swap_cols(t, bj);
    while (true) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (sgn(D(i, t)) == 0) continue;
        Int q = -rdiv(D(i, t), D(t, t));
        D.add_row_multiple(i, t, q), U.add_row_multiple(i, t, q);
        if (sgn(D(i, t)) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (sgn(D(t, j)) == 0) continue;
        Int q = -rdiv(D(t, j), D(t, t));
        D.add_col_multiple(j, t, q), V.add_col_multiple(j, t, q);
        if (sgn(D(t, j)) != 0) dirty = true;
      }
      if (dirty) {
        // Bring the smallest leftover in row/column t to the pivot and repeat.
        std::size_t bi2 = t, bj2 = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (sgn(D(i, t)) != 0 && cmpabs(D(i, t), D(bi2, bj2)) < 0) bi2 = i, bj2 = t;
        for (std::size_t j = t + 1; j < n; ++j)
          if (sgn(D(t, j)) != 0 && cmpabs(D(t, j), D(bi2, bj2)) < 0) bi2 = t, bj2 = j;
        D.swap_rows(t, bi2), U.swap_rows(t, bi2);
        D.swap_cols(t, bj2), V.swap_cols(t, bj2);
        continue;
      }
      // Divisibility of the trailing block.
      std::size_t fi = m;
      for (std::size_t i = t + 1; i < m && fi == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
            fi = i;
            break;
          }
      if (fi == m) break;
      D.add_row_multiple(t, fi, 1), U.add_row_multiple(t, fi, 1);
    }
    if (sgn(D(t, t)) < 0) D.negate_row(t), U.negate_row(t);
  }
  SnfResult res;
  res.rank = 0;
  for (std::size_t i = 0; i < std::min(m, n); ++i)
    if (sgn(D(i, i)) != 0) res.divisors.push_back(D(i, i)), ++res.rank;
  if (!(U * A * V == D)) throw std::logic_error("snf: certificate check failed");
  res.D = std::move(D);
  res.U = std::move(U);
  res.V = std::move(V);
  return res;
}

IntMatrix kernel_basis(const IntMatrix& A) {
  const std::size_t n = A.cols();
  if (n == 0) return IntMatrix(0, 0);
  ColumnEchelon ce = column_echelon(A, true);
  std::size_t r = ce.pivot_rows.size();
  IntMatrix K = ce.V.col_range(r, n);
  if (K.cols() == 0) return IntMatrix(n, 0);
  return span_basis(K);
}

CokernelStructure cokernel_structure(const IntMatrix& A) {
  CokernelStructure cs;
  if (A.cols() == 0) {
    cs.free_rank = A.rows();
    return cs;
  }
  SnfResult s = snf(A);
  for (auto& d : s.divisors)
    if (d != 1) cs.torsion.push_back(d);
  cs.free_rank = A.rows() - s.rank;
  return cs;
}

std::vector<std::size_t> independent_rows(const IntMatrix& A) {
  struct Row {
    std::size_t pivot;
    std::vector<Int> v;
  };
  std::vector<Row> basis;  // sorted by pivot
  std::vector<std::size_t> chosen;
  const std::size_t n = A.cols();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::vector<Int> v = A.row(i);
    for (auto& b : basis) {
      if (sgn(v[b.pivot]) == 0) continue;
      Int g = gcd(v[b.pivot], b.v[b.pivot]);
      Int f1 = b.v[b.pivot] / g, f2 = v[b.pivot] / g;
      for (std::size_t k = b.pivot; k < n; ++k) v[k] = v[k] * f1 - b.v[k] * f2;
    }
    std::size_t p = n;
    Int content = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (sgn(v[k]) != 0) {
        if (p == n) p = k;
        content = gcd(content, v[k]);
      }
    if (p == n) continue;
    for (auto& x : v) x /= content;
    auto pos = std::find_if(basis.begin(), basis.end(), [&](const Row& r) { return r.pivot > p; });
    basis.insert(pos, Row{p, std::move(v)});
    chosen.push_back(i);
    if (chosen.size() == n) break;
  }
  return chosen;
}

std::size_t rank(const IntMatrix& A) { return independent_rows(A).size(); }

SolveResult solve(const IntMatrix& A, const IntMatrix& B) {
  if (A.rows() != B.rows()) throw DimensionMismatch("solve: row count");
  SolveResult res;
  IntMatrix X(A.cols(), B.cols());
  for (std::size_t c = 0; c < B.cols(); ++c) {
    IntMatrix b = B.col_range(c, c + 1);
    // Reduce to independent rows of [A | b]; integral solutions are unchanged.
    std::vector<std::size_t> rows = independent_rows(IntMatrix::hstack(A, b));
    IntMatrix Ar = A.select_rows(rows), br = b.select_rows(rows);
    if (A.cols() == 0) {
      if (!b.is_zero()) {
        std::size_t i = rows.at(0);
        SolveObstruction ob;
        ob.y.assign(A.rows(), 0);
        ob.y[i] = 1;
        ob.modulus = 0;
        res.obstruction = ob;
        return res;
      }
      continue;
    }
    SnfResult s = snf(Ar);
    IntMatrix Ub = s.U * br;
    IntMatrix z(A.cols(), 1);
    for (std::size_t i = 0; i < Ar.rows(); ++i) {
      Int d = i < std::min(Ar.rows(), Ar.cols()) ? s.D(i, i) : Int(0);
      bool bad = sgn(d) == 0 ? sgn(Ub(i, 0)) != 0 : !mpz_divisible_p(Ub(i, 0).get_mpz_t(), d.get_mpz_t());
      if (bad) {
        SolveObstruction ob;
        ob.y.assign(A.rows(), 0);
        for (std::size_t k = 0; k < rows.size(); ++k) ob.y[rows[k]] = s.U(i, k);
        ob.modulus = d;
        res.obstruction = ob;
        return res;
      }
      if (sgn(d) != 0) z(i, 0) = Ub(i, 0) / d;
    }
    IntMatrix x = s.V * z;
    if (!(A * x == b)) throw std::logic_error("solve: verification failed");
    for (std::size_t i = 0; i < A.cols(); ++i) X(i, c) = x(i, 0);
  }
  res.x = std::move(X);
  return res;
}

bool check_obstruction(const IntMatrix& A, const IntMatrix& b, const SolveObstruction& ob) {
  if (ob.y.size() != A.rows()) return false;
  IntMatrix y(1, A.rows(), ob.y);
  IntMatrix yA = y * A, yb = y * b;
  auto zero_mod = [&](const Int& v) {
    return sgn(ob.modulus) == 0 ? sgn(v) == 0 : mpz_divisible_p(v.get_mpz_t(), ob.modulus.get_mpz_t()) != 0;
  };
  for (std::size_t j = 0; j < yA.cols(); ++j)
    if (!zero_mod(yA(0, j))) return false;
  for (std::size_t j = 0; j < yb.cols(); ++j)
    if (!zero_mod(yb(0, j))) return true;
  return false;
}

IntMatrix span_basis(const IntMatrix& A) {
  if (A.cols() == 0) return IntMatrix(A.rows(), 0);
  ColumnEchelon ce = column_echelon(A, false);
  return ce.M.col_range(0, ce.pivot_rows.size());
}

IntMatrix saturate(const IntMatrix& A) {
  if (A.cols() == 0) return IntMatrix(A.rows(), 0);
  IntMatrix K = kernel_basis(A.transpose());  // y with y^T A = 0
  if (K.cols() == 0) return IntMatrix::identity(A.rows());
  return kernel_basis(K.transpose());
}

bool span_contains(const IntMatrix& A, const IntMatrix& B) {
  if (B.cols() == 0) return true;
  if (A.cols() == 0) return B.is_zero();
  return solve(A, B).x.has_value();
}

bool is_saturated(const IntMatrix& A) {
  if (A.cols() == 0) return true;
  SnfResult s = snf(A);
  return std::all_of(s.divisors.begin(), s.divisors.end(), [](const Int& d) { return d == 1; });
}

Int determinant(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("determinant: not square");
  const std::size_t n = A.rows();
  if (n == 0) return 1;
  IntMatrix M = A;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(M(k, k)) == 0) {
      std::size_t p = k + 1;
      while (p < n && sgn(M(p, k)) == 0) ++p;
      if (p == n) return 0;
      M.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int v = M(i, j) * M(k, k) - M(i, k) * M(k, j);
        mpz_divexact(M(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

bool is_unimodular(const IntMatrix& A) {
  if (A.rows() != A.cols()) return false;
  Int d = determinant(A);
  return d == 1 || d == -1;
}

IntMatrix inverse_unimodular(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("inverse: not square");
  SolveResult r = solve(A, IntMatrix::identity(A.rows()));
  if (!r.x) throw std::invalid_argument("inverse_unimodular: matrix not invertible over Z");
  return *r.x;
}

IntMatrix left_inverse(const IntMatrix& K) {
  const std::size_t n = K.rows(), k = K.cols();
  if (k == 0) return IntMatrix(0, n);
  SnfResult s = snf(K);
  // U K V = [I;0]  =>  (V [I 0] U) K = I
  IntMatrix P(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    if (s.D(i, i) != 1) throw std::invalid_argument("left_inverse: not saturated or not full rank");
    P(i, i) = 1;
  }
  IntMatrix L = s.V * P * s.U;
  if (!(L * K == IntMatrix::identity(k))) throw std::logic_error("left_inverse: verification failed");
  return L;
}

ExtGcd ext_gcd(const std::vector<Int>& v) {
  ExtGcd r;
  r.g = 0;
  r.coeffs.assign(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), r.g.get_mpz_t(), v[i].get_mpz_t());
    for (std::size_t k = 0; k < i; ++k) r.coeffs[k] *= s;
    r.coeffs[i] = t;
    r.g = g;
  }
  return r;
}

}  // namespace torus
