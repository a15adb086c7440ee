#pragma once

#include <cstdint>
#include <random>

#include "helmfov/common.hpp"

namespace helmfov::testing {

/// Seeded source of random test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return normal_(rng_); }
  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  RVector real_vector(Index n) {
    RVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  CVector complex_vector(Index n) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }
  CVector unit_vector(Index n) {
    CVector v = complex_vector(n);
    return v / v.norm();
  }
  CMatrix complex_matrix(Index rows, Index cols) {
    CMatrix a(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) a(i, j) = complex_normal();
    }
    return a;
  }
  /// shift * I + G / sqrt(n); eigenvalues cluster in a disc of radius ~1 around shift.
  CMatrix shifted_matrix(Index n, Complex shift) {
    CMatrix a = complex_matrix(n, n) / std::sqrt(static_cast<double>(n));
    a.diagonal().array() += shift;
    return a;
  }
  CMatrix hermitian_matrix(Index n) {
    const CMatrix g = complex_matrix(n, n);
    return 0.5 * (g + g.adjoint());
  }
  /// Q from the QR factorisation of a Gaussian matrix.
  CMatrix unitary_matrix(Index n);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace helmfov::testing
