// Minimal sparse symmetric linear algebra: CSR storage, mat-vec, and a
// Jacobi-preconditioned conjugate gradient solver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace fraclap {

/// Nodal coefficients of an FE function, one entry per DOF.
using FieldVector = std::vector<double>;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
struct CsrMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<std::int64_t> row_offsets;  // length n_rows + 1
  std::vector<int> col_indices;
  std::vector<double> values;

  /// Entry lookup; returns 0 for positions outside the sparsity pattern.
  double coeff(int i, int j) const {
    for (std::int64_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] == j) return values[k];
    }
    return 0.0;
  }
};

/// Accumulates (row, col, value) triplets and compresses them into CSR,
/// summing duplicates. Deterministic for a given insertion sequence.
class CsrBuilder {
 public:
  CsrBuilder(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

  void add(int i, int j, double v) {
    if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_)
      throw std::out_of_range("CsrBuilder::add: index out of range");
    trips_.emplace_back(i, j, v);
  }

  CsrMatrix build() {
    std::stable_sort(trips_.begin(), trips_.end(),
                     [](const Trip& a, const Trip& b) {
                       if (std::get<0>(a) != std::get<0>(b))
                         return std::get<0>(a) < std::get<0>(b);
                       return std::get<1>(a) < std::get<1>(b);
                     });
    CsrMatrix m;
    m.n_rows = n_rows_;
    m.n_cols = n_cols_;
    m.row_offsets.assign(n_rows_ + 1, 0);
    for (std::size_t k = 0; k < trips_.size();) {
      const int i = std::get<0>(trips_[k]);
      const int j = std::get<1>(trips_[k]);
      double v = 0.0;
      while (k < trips_.size() && std::get<0>(trips_[k]) == i &&
             std::get<1>(trips_[k]) == j) {
        v += std::get<2>(trips_[k]);
        ++k;
      }
      m.col_indices.push_back(j);
      m.values.push_back(v);
      ++m.row_offsets[i + 1];
    }
    for (int i = 0; i < n_rows_; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
    return m;
  }

 private:
  using Trip = std::tuple<int, int, double>;
  int n_rows_, n_cols_;
  std::vector<Trip> trips_;
};

inline void spmv_into(const CsrMatrix& a, const FieldVector& x,
                      FieldVector& y) {
  if (static_cast<int>(x.size()) != a.n_cols)
    throw std::invalid_argument("spmv: dimension mismatch");
  y.resize(a.n_rows);
  for (int i = 0; i < a.n_rows; ++i) {
    double acc = 0.0;
    for (std::int64_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      acc += a.values[k] * x[a.col_indices[k]];
    y[i] = acc;
  }
}

inline FieldVector spmv(const CsrMatrix& a, const FieldVector& x) {
  FieldVector y;
  spmv_into(a, x, y);
  return y;
}

/// c = alpha*A + beta*B with pattern union (used for M + theta*dt*A).
inline CsrMatrix csr_combine(double alpha, const CsrMatrix& a, double beta,
                             const CsrMatrix& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
    throw std::invalid_argument("csr_combine: dimension mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = a.n_cols;
  c.row_offsets.assign(a.n_rows + 1, 0);
  for (int i = 0; i < a.n_rows; ++i) {
    std::int64_t ka = a.row_offsets[i], kb = b.row_offsets[i];
    const std::int64_t ea = a.row_offsets[i + 1], eb = b.row_offsets[i + 1];
    while (ka < ea || kb < eb) {
      int ja = ka < ea ? a.col_indices[ka] : a.n_cols;
      int jb = kb < eb ? b.col_indices[kb] : b.n_cols;
      if (ja == jb) {
        c.col_indices.push_back(ja);
        c.values.push_back(alpha * a.values[ka] + beta * b.values[kb]);
        ++ka;
        ++kb;
      } else if (ja < jb) {
        c.col_indices.push_back(ja);
        c.values.push_back(alpha * a.values[ka]);
        ++ka;
      } else {
        c.col_indices.push_back(jb);
        c.values.push_back(beta * b.values[kb]);
        ++kb;
      }
      ++c.row_offsets[i + 1];
    }
  }
  for (int i = 0; i < c.n_rows; ++i) c.row_offsets[i + 1] += c.row_offsets[i];
  return c;
}

inline double dot(const FieldVector& x, const FieldVector& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

inline double norm2(const FieldVector& x) { return std::sqrt(dot(x, x)); }

struct CgResult {
  long iters = 0;
  double residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// Jacobi-preconditioned CG for SPD systems. `x` provides the starting
/// guess and receives the solution. Guarantees ||b - A x|| <= tol_rel*||b||
/// on return (verified against the true residual, not the recurrence).
/// max_iter < 0 selects the default 10*n.
inline CgResult cg_solve(const CsrMatrix& a, const FieldVector& b,
                         FieldVector& x, double tol_rel = 1e-12,
                         long max_iter = -1) {
  const int n = a.n_rows;
  if (a.n_cols != n) throw std::invalid_argument("cg_solve: matrix not square");
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("cg_solve: rhs dimension mismatch");
  if (tol_rel <= 0) throw std::invalid_argument("cg_solve: tol_rel must be > 0");
  if (max_iter < 0) max_iter = 10L * n;
  x.resize(n, 0.0);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0};
  }

  FieldVector diag_inv(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (d <= 0.0)
      throw std::invalid_argument("cg_solve: non-positive diagonal entry");
    diag_inv[i] = 1.0 / d;
  }

  FieldVector r(n), z(n), p(n), ap(n);
  spmv_into(a, x, ap);
  for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const double tol_abs = tol_rel * bnorm;

  long it = 0;
  double rnorm = norm2(r);
  while (rnorm > tol_abs) {
    if (it >= max_iter)
      throw SolverError("cg_solve: max iterations exceeded, residual " +
                            std::to_string(rnorm / bnorm),
                        rnorm);
    spmv_into(a, p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0)
      throw SolverError("cg_solve: indefinite operator detected", rnorm);
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    ++it;
    rnorm = norm2(r);
    if (rnorm <= tol_abs) {
      // recurrence residual can drift; confirm with the true residual
      spmv_into(a, x, ap);
      for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];
      rnorm = norm2(r);
      if (rnorm <= tol_abs) break;
    }
    for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return {it, rnorm};
}

/// Convenience overload starting from the zero vector.
inline std::pair<FieldVector, CgResult> cg_solve(const CsrMatrix& a,
                                                 const FieldVector& b,
                                                 double tol_rel = 1e-12,
                                                 long max_iter = -1) {
  FieldVector x(a.n_rows, 0.0);
  CgResult res = cg_solve(a, b, x, tol_rel, max_iter);
  return {std::move(x), res};
}

}  // namespace fraclap
