#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

#include "helmfov/common.hpp"

namespace helmfov {

template <typename T>
struct Triplet {
  Index row;
  Index col;
  T value;
};

namespace detail {
inline double conj_if_complex(double v) { return v; }
inline Complex conj_if_complex(const Complex& v) { return std::conj(v); }
}  // namespace detail

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row; explicit zeros
/// produced by assembly are kept so that matrices assembled on the same mesh
/// share one pattern.
template <typename T>
class CsrMatrix {
 public:
  using Scalar = T;

  CsrMatrix() = default;

  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
            std::vector<T> values)
      : rows_(rows),
        cols_(cols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from unordered triplets; duplicates are summed in input order, so
  /// the result is independent of the sort algorithm used.
  static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet<T>> triplets) {
    for (const auto& t : triplets) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
        throw DimensionError("CsrMatrix::from_triplets: entry out of range");
      }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<Index> col_idx;
    std::vector<T> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size();) {
      const Index r = triplets[k].row;
      const Index c = triplets[k].col;
      T sum = triplets[k].value;
      std::size_t j = k + 1;
      for (; j < triplets.size() && triplets[j].row == r && triplets[j].col == c; ++j) {
        sum += triplets[j].value;
      }
      col_idx.push_back(c);
      values.push_back(sum);
      ++row_ptr[static_cast<std::size_t>(r) + 1];
      k = j;
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  static CsrMatrix identity(Index n) {
    std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
    std::vector<Index> col_idx(static_cast<std::size_t>(n));
    std::iota(row_ptr.begin(), row_ptr.end(), Index{0});
    std::iota(col_idx.begin(), col_idx.end(), Index{0});
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                     std::vector<T>(static_cast<std::size_t>(n), T(1)));
  }

  static CsrMatrix from_dense(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& dense) {
    std::vector<Triplet<T>> t;
    for (Index i = 0; i < dense.rows(); ++i) {
      for (Index j = 0; j < dense.cols(); ++j) {
        if (dense(i, j) != T(0)) t.push_back({i, j, dense(i, j)});
      }
    }
    return from_triplets(dense.rows(), dense.cols(), std::move(t));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return row_ptr_.empty() ? 0 : row_ptr_.back(); }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  T coeff(Index i, Index j) const {
    const auto begin = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
    const auto end = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return T(0);
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  T diagonal(Index i) const { return coeff(i, i); }

  template <typename V>
  auto multiply(const Eigen::Matrix<V, Eigen::Dynamic, 1>& x) const {
    using R = decltype(T{} * V{});
    require_size(x.size(), cols_, "CsrMatrix::multiply");
    Eigen::Matrix<R, Eigen::Dynamic, 1> y(rows_);
    for (Index i = 0; i < rows_; ++i) {
      R sum{};
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
        sum += values_[static_cast<std::size_t>(k)] * x(col_idx_[static_cast<std::size_t>(k)]);
      }
      y(i) = sum;
    }
    return y;
  }

  /// y = A^* x (conjugate transpose; plain transpose for real matrices).
  template <typename V>
  auto multiply_adjoint(const Eigen::Matrix<V, Eigen::Dynamic, 1>& x) const {
    using R = decltype(T{} * V{});
    require_size(x.size(), rows_, "CsrMatrix::multiply_adjoint");
    Eigen::Matrix<R, Eigen::Dynamic, 1> y = Eigen::Matrix<R, Eigen::Dynamic, 1>::Zero(cols_);
    for (Index i = 0; i < rows_; ++i) {
      const V xi = x(i);
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
        y(col_idx_[static_cast<std::size_t>(k)]) +=
            detail::conj_if_complex(values_[static_cast<std::size_t>(k)]) * xi;
      }
    }
    return y;
  }

  /// Conjugate transpose as a new CSR matrix.
  CsrMatrix adjoint() const {
    std::vector<Triplet<T>> t;
    t.reserve(values_.size());
    for (Index i = 0; i < rows_; ++i) {
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
        t.push_back({col_idx_[static_cast<std::size_t>(k)], i,
                     detail::conj_if_complex(values_[static_cast<std::size_t>(k)])});
      }
    }
    return from_triplets(cols_, rows_, std::move(t));
  }

  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows_, cols_);
    for (Index i = 0; i < rows_; ++i) {
      for (Index k = row_ptr_[static_cast<std::size_t>(i)];
           k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
        d(i, col_idx_[static_cast<std::size_t>(k)]) += values_[static_cast<std::size_t>(k)];
      }
    }
    return d;
  }

  /// Largest absolute entry.
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void validate() const {
    if (rows_ < 0 || cols_ < 0) throw DimensionError("CsrMatrix: negative shape");
    if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 || row_ptr_.front() != 0) {
      throw DimensionError("CsrMatrix: malformed row pointer");
    }
    if (col_idx_.size() != values_.size() ||
        static_cast<std::size_t>(row_ptr_.back()) != values_.size()) {
      throw DimensionError("CsrMatrix: nnz mismatch");
    }
    for (Index i = 0; i < rows_; ++i) {
      const auto b = row_ptr_[static_cast<std::size_t>(i)];
      const auto e = row_ptr_[static_cast<std::size_t>(i) + 1];
      if (e < b) throw DimensionError("CsrMatrix: row pointer not monotone");
      for (Index k = b; k < e; ++k) {
        const Index c = col_idx_[static_cast<std::size_t>(k)];
        if (c < 0 || c >= cols_) throw DimensionError("CsrMatrix: column out of range");
        if (k > b && c <= col_idx_[static_cast<std::size_t>(k) - 1]) {
          throw DimensionError("CsrMatrix: column indices not strictly increasing");
        }
      }
    }
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<T> values_;
};

using SparseRealMatrix = CsrMatrix<double>;
using SparseComplexMatrix = CsrMatrix<Complex>;

template <typename T, typename V>
auto spmv(const CsrMatrix<T>& a, const Eigen::Matrix<V, Eigen::Dynamic, 1>& x) {
  return a.multiply(x);
}

template <typename T, typename V>
auto spmv_conj_transpose(const CsrMatrix<T>& a, const Eigen::Matrix<V, Eigen::Dynamic, 1>& x) {
  return a.multiply_adjoint(x);
}

/// Sparse product a * b.
template <typename T>
CsrMatrix<T> multiply(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  std::vector<Triplet<T>> t;
  const auto& ap = a.row_ptr();
  const auto& ai = a.col_idx();
  const auto& av = a.values();
  const auto& bp = b.row_ptr();
  const auto& bi = b.col_idx();
  const auto& bv = b.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = ap[static_cast<std::size_t>(i)]; k < ap[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index mid = ai[static_cast<std::size_t>(k)];
      for (Index l = bp[static_cast<std::size_t>(mid)]; l < bp[static_cast<std::size_t>(mid) + 1];
           ++l) {
        t.push_back({i, bi[static_cast<std::size_t>(l)],
                     av[static_cast<std::size_t>(k)] * bv[static_cast<std::size_t>(l)]});
      }
    }
  }
  return CsrMatrix<T>::from_triplets(a.rows(), b.cols(), std::move(t));
}

/// sum_k coeffs[k] * terms[k]; all terms must share one shape.
template <typename R, typename T>
CsrMatrix<R> linear_combination(const std::vector<R>& coeffs,
                                const std::vector<const CsrMatrix<T>*>& terms) {
  if (coeffs.size() != terms.size() || terms.empty()) {
    throw std::invalid_argument("linear_combination: need matching non-empty lists");
  }
  const Index rows = terms.front()->rows();
  const Index cols = terms.front()->cols();
  std::vector<Triplet<R>> t;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    const auto& x = *terms[m];
    if (x.rows() != rows || x.cols() != cols) throw DimensionError("linear_combination: shape");
    for (Index i = 0; i < rows; ++i) {
      for (Index k = x.row_ptr()[static_cast<std::size_t>(i)];
           k < x.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
        t.push_back({i, x.col_idx()[static_cast<std::size_t>(k)],
                     coeffs[m] * R(x.values()[static_cast<std::size_t>(k)])});
      }
    }
  }
  return CsrMatrix<R>::from_triplets(rows, cols, std::move(t));
}

/// Galerkin triple product p^T a p for real prolongation p.
template <typename T>
CsrMatrix<T> galerkin_product(const CsrMatrix<double>& p, const CsrMatrix<T>& a) {
  const auto pt = p.adjoint();
  if constexpr (std::is_same_v<T, double>) {
    return multiply(pt, multiply(a, p));
  } else {
    const auto pc = linear_combination<T, double>({T(1)}, {&p});
    const auto ptc = linear_combination<T, double>({T(1)}, {&pt});
    return multiply(ptc, multiply(a, pc));
  }
}

}  // namespace helmfov
