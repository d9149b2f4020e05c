#pragma once

// Shared numeric utilities: truncation policy, Bernoulli polynomials,
// binomials, branch-free exponentials, determinants and Pfaffians.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "twisted/error.hpp"

namespace twisted {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

/// Series cutoffs and tolerance used by every evaluation. Two runs with equal
/// configurations produce bit-identical results.
struct TruncationConfig {
  int q_order = 120;           // max power of q retained in q-series
  int theta_range = 32;        // initial index window for theta sums
  int lattice_range = 32;      // initial index window for oracle lattice sums
  double tol = 1e-12;          // target absolute accuracy
  double series_radius = 0.9;  // contour radius for coefficient extraction

  void validate() const {
    if (q_order < 1) throw Error(ErrorKind::Parse, "q_order must be >= 1");
    if (theta_range < 1) throw Error(ErrorKind::Parse, "theta_range must be >= 1");
    if (lattice_range < 1) throw Error(ErrorKind::Parse, "lattice_range must be >= 1");
    if (!(tol > 0.0)) throw Error(ErrorKind::Parse, "tol must be > 0");
    if (!(series_radius > 0.0 && series_radius < 1.0))
      throw Error(ErrorKind::Parse, "series_radius must lie in (0,1)");
  }

  friend bool operator==(const TruncationConfig&, const TruncationConfig&) = default;
};

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) throw Error(ErrorKind::Domain, "ComplexMatrix must be square");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < dim_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < dim_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  /// Matrix with row `r` and column `c` removed.
  ComplexMatrix minor(std::size_t r, std::size_t c) const {
    ComplexMatrix out(dim_ - 1);
    for (std::size_t i = 0, oi = 0; i < dim_; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0, oj = 0; j < dim_; ++j) {
        if (j == c) continue;
        out(oi, oj++) = (*this)(i, j);
      }
      ++oi;
    }
    return out;
  }

  /// Max-norm of M + M^T.
  double asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        worst = std::max(worst, std::abs((*this)(i, j) + (*this)(j, i)));
    return worst;
  }

  double max_abs() const {
    double worst = 0.0;
    for (const auto& v : data_) worst = std::max(worst, std::abs(v));
    return worst;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

// ---------------------------------------------------------------------------
// Binomials, exponentials

/// Standard binomial coefficient; zero when k > n.
inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// q_z^s := exp(s z). Every non-integer power in the library goes through
/// here, so no branch cut is consulted.
inline cplx q_exp(cplx z, cplx s) { return std::exp(s * z); }

// ---------------------------------------------------------------------------
// Bernoulli numbers and polynomials

namespace detail {

inline constexpr int kExactBernoulli = 64;

// Akiyama-Tanigawa in exact rationals. The floating-point version of this
// recurrence is useless past n ~ 20.
inline const std::vector<double>& bernoulli_scaled_table() {
  static const std::vector<double> table = [] {
    using boost::multiprecision::cpp_rational;
    using boost::multiprecision::cpp_int;
    const int n_max = kExactBernoulli;
    std::vector<cpp_rational> a(n_max + 1);
    std::vector<double> out(n_max + 1);
    cpp_int factorial = 1;
    for (int m = 0; m <= n_max; ++m) {
      a[m] = cpp_rational(1, m + 1);
      for (int j = m; j >= 1; --j) a[j - 1] = cpp_rational(j) * (a[j - 1] - a[j]);
      cpp_rational b = a[0];
      if (m == 1) b = -b;  // AT yields B_1 = +1/2; we use B_1 = -1/2
      if (m > 0) factorial *= m;
      out[m] = static_cast<double>(b / cpp_rational(factorial));
    }
    return out;
  }();
  return table;
}

// long double so that B_n(λ) keeps its digits through the binomial sum
inline const std::vector<long double>& bernoulli_number_table() {
  static const std::vector<long double> table = [] {
    using boost::multiprecision::cpp_rational;
    const int n_max = kExactBernoulli;
    std::vector<cpp_rational> a(n_max + 1);
    std::vector<long double> out(n_max + 1);
    for (int m = 0; m <= n_max; ++m) {
      a[m] = cpp_rational(1, m + 1);
      for (int j = m; j >= 1; --j) a[j - 1] = cpp_rational(j) * (a[j - 1] - a[j]);
      out[m] = static_cast<long double>(m == 1 ? cpp_rational(-a[0]) : a[0]);
    }
    return out;
  }();
  return table;
}

}  // namespace detail

/// B_n / n!, the Taylor coefficients of z/(e^z - 1).
inline double bernoulli_scaled(int n) {
  if (n < 0) throw Error(ErrorKind::Domain, "bernoulli index must be >= 0");
  if (n <= detail::kExactBernoulli) return detail::bernoulli_scaled_table()[static_cast<std::size_t>(n)];
  if (n % 2 == 1) return 0.0;
  // B_n/n! = (-1)^{n/2+1} 2 zeta(n) / (2 pi)^n; zeta(n) = 1 to double precision here
  double zeta = 1.0 + std::pow(2.0, -n) + std::pow(3.0, -n);
  double mag = 2.0 * zeta * std::exp(-n * std::log(2.0 * pi));
  return ((n / 2) % 2 == 1) ? mag : -mag;
}

/// Bernoulli polynomial B_n(lambda), normalised by
/// e^{lambda z}/(e^z - 1) = 1/z + sum_{n>=1} B_n(lambda)/n! z^{n-1}. B_0 = 1.
inline double bernoulli_poly(int n, double lambda) {
  if (n < 0) throw Error(ErrorKind::Domain, "bernoulli_poly requires n >= 0");
  if (n > detail::kExactBernoulli)
    throw Error(ErrorKind::Domain, "bernoulli_poly supports n <= 64");
  const auto& b = detail::bernoulli_number_table();
  // Horner in lambda: sum_k binom(n,k) B_k lambda^{n-k}
  long double acc = 0.0L;
  long double coeff = 1.0L;  // binom(n, k) built incrementally
  std::vector<long double> terms(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    terms[static_cast<std::size_t>(k)] = coeff * b[static_cast<std::size_t>(k)];
    coeff = coeff * (n - k) / (k + 1);
  }
  for (int k = 0; k <= n; ++k) acc = acc * lambda + terms[static_cast<std::size_t>(k)];
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------
// Determinant and Pfaffian

/// Determinant by LU with partial pivoting.
inline cplx determinant(ComplexMatrix m) {
  const std::size_t n = m.dim();
  if (n == 0) return 1.0;
  cplx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      m.swap_rows(piv, k);
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = m(i, k) / m(k, k);
      if (f == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

namespace detail {

// Sum over pair partitions, expanded along the lowest remaining index.
inline cplx pfaffian_pairings(const ComplexMatrix& m, std::vector<std::size_t>& idx) {
  if (idx.empty()) return 1.0;
  const std::size_t first = idx.front();
  cplx total = 0.0;
  for (std::size_t p = 1; p < idx.size(); ++p) {
    const std::size_t partner = idx[p];
    std::vector<std::size_t> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t q = 1; q < idx.size(); ++q)
      if (q != p) rest.push_back(idx[q]);
    const double sign = (p % 2 == 1) ? 1.0 : -1.0;
    total += sign * m(first, partner) * pfaffian_pairings(m, rest);
  }
  return total;
}

// Skew LTL^T elimination with pivoting (Parlett-Reid), O(n^3).
inline cplx pfaffian_elimination(ComplexMatrix a) {
  const std::size_t n = a.dim();
  cplx pf = 1.0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    std::size_t kp = k + 1;
    double best = std::abs(a(k + 1, k));
    for (std::size_t i = k + 2; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        kp = i;
      }
    }
    if (kp != k + 1) {
      a.swap_rows(k + 1, kp);
      a.swap_cols(k + 1, kp);
      pf = -pf;
    }
    if (a(k + 1, k) == cplx{}) return 0.0;
    const cplx pivot = a(k, k + 1);
    pf *= pivot;
    if (k + 2 < n) {
      std::vector<cplx> tau(n - k - 2);
      for (std::size_t j = k + 2; j < n; ++j) tau[j - k - 2] = a(k, j) / pivot;
      for (std::size_t i = k + 2; i < n; ++i) {
        for (std::size_t j = k + 2; j < n; ++j) {
          a(i, j) += tau[i - k - 2] * a(j, k + 1) - a(i, k + 1) * tau[j - k - 2];
        }
      }
    }
  }
  return pf;
}

}  // namespace detail

/// Pfaffian with Pf([[0,a],[-a,0]]) = a. Uses the pair-partition sum up to
/// dimension 8 and skew Gaussian elimination above that.
///
/// Throws OddDimension, or NotAntisymmetric when ||M + M^T||_max exceeds
/// 10 * tol * max(1, ||M||_max).
inline cplx pfaffian(const ComplexMatrix& m, double tol = TruncationConfig{}.tol) {
  const std::size_t n = m.dim();
  if (n % 2 == 1)
    throw Error(ErrorKind::OddDimension, "pfaffian of " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  const double asym = m.asymmetry();
  if (asym > 10.0 * tol * std::max(1.0, m.max_abs()))
    throw Error(ErrorKind::NotAntisymmetric, "max |M + M^T| = " + std::to_string(asym));
  if (n == 0) return 1.0;
  if (n <= 8) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return detail::pfaffian_pairings(m, idx);
  }
  return detail::pfaffian_elimination(m);
}

}  // namespace twisted
