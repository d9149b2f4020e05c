#pragma once

// Independent reference computations used by the unit tests. None of these
// call into the library's own algorithms.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "twisted/numeric.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

/// Bernoulli numbers B_0..B_n from Taylor division of x/(e^x - 1):
/// (e^x - 1)/x = Σ x^j/(j+1)!, so B_m/m! are the coefficients of its inverse.
inline std::vector<long double> bernoulli_by_division(int n) {
  std::vector<long double> a(n + 1), b(n + 1);
  long double f = 1.0L;
  for (int j = 0; j <= n; ++j) {
    f *= static_cast<long double>(j + 1);
    a[j] = 1.0L / f;
  }
  for (int m = 0; m <= n; ++m) {
    long double s = m == 0 ? 1.0L : 0.0L;
    for (int j = 1; j <= m; ++j) s -= a[j] * b[m - j];
    b[m] = s / a[0];
  }
  long double fact = 1.0L;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) fact *= m;
    b[m] *= fact;
  }
  return b;
}

/// B_n(λ) = Σ binom(n,k) B_k λ^{n-k} with the B_k from Taylor division.
inline double bernoulli_poly(int n, double lam) {
  const auto b = bernoulli_by_division(n);
  long double s = 0.0L;
  long double c = 1.0L;
  for (int k = 0; k <= n; ++k) {
    s += c * b[k] * std::pow(static_cast<long double>(lam), n - k);
    c = c * (n - k) / (k + 1);
  }
  return static_cast<double>(s);
}

/// Laplace expansion along the first row.
inline cplx cofactor_det(const twisted::ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  cplx s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * m(0, j) * cofactor_det(m.minor(0, j));
  }
  return s;
}

/// Pf by expansion along the first row: Pf(A) = Σ_j (-1)^{j+1} a_{0j} Pf(A_{0j,0j}).
inline cplx recursive_pf(const twisted::ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  cplx s = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    s += sign * m(0, j) * recursive_pf(m.minor(0, j).minor(j - 1, 0));
  }
  return s;
}

inline twisted::ComplexMatrix random_skew(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  twisted::ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = {u(rng), u(rng)};
      m(j, i) = -m(i, j);
    }
  return m;
}

inline twisted::ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  twisted::ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = {u(rng), u(rng)};
  return m;
}

/// Fourth-order central difference.
inline cplx derivative(const std::function<cplx(cplx)>& f, cplx z, double h = 1e-3) {
  return (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
}

/// Taylor coefficients c_0..c_{count-1} of f about z0 by a DFT on a circle of radius r.
inline std::vector<cplx> taylor(const std::function<cplx(cplx)>& f, cplx z0, double r, int count, int points = 64) {
  std::vector<cplx> samples(points);
  for (int j = 0; j < points; ++j) samples[j] = f(z0 + r * std::polar(1.0, 2.0 * pi * j / points));
  std::vector<cplx> c(count);
  for (int k = 0; k < count; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < points; ++j) s += samples[j] * std::polar(1.0, -2.0 * pi * j * k / points);
    c[k] = s / (static_cast<double>(points) * std::pow(r, k));
  }
  return c;
}

/// θ[a;b](z,τ) = Σ_n exp(iπτ(n+a)² + (n+a)(z + 2πib)), fixed symmetric window.
inline cplx theta(double a, double b, cplx z, cplx tau, int range = 60) {
  const cplx i(0.0, 1.0);
  cplx s = 0.0;
  for (int n = -range; n <= range; ++n) {
    const double m = n + a;
    s += std::exp(i * pi * tau * m * m + m * (z + 2.0 * pi * i * b));
  }
  return s;
}

/// η(τ) = q^{1/24} Π (1 - q^n), fixed 400 factors.
inline cplx eta(cplx tau) {
  const cplx i(0.0, 1.0);
  const cplx q = std::exp(2.0 * pi * i * tau);
  cplx p = std::exp(2.0 * pi * i * tau / 24.0);
  cplx qn = 1.0;
  for (int n = 1; n <= 400; ++n) {
    qn *= q;
    p *= 1.0 - qn;
  }
  return p;
}

/// E_n(τ) = -B_n/n! + (2/(n-1)!) Σ σ_{n-1}(r) q^r for even n, from explicit divisor sums.
inline cplx eisenstein_divisor(int n, cplx tau, int terms = 200) {
  const cplx i(0.0, 1.0);
  const cplx q = std::exp(2.0 * pi * i * tau);
  const auto b = bernoulli_by_division(n);
  long double fact = 1.0L;
  for (int j = 2; j <= n; ++j) fact *= j;
  cplx s = static_cast<double>(-b[n] / fact);
  cplx qr = 1.0;
  for (int r = 1; r <= terms; ++r) {
    qr *= q;
    double sigma = 0.0;
    for (int d = 1; d <= r; ++d)
      if (r % d == 0) sigma += std::pow(static_cast<double>(d), n - 1);
    s += 2.0 * static_cast<double>(n / fact) * sigma * qr;
  }
  return s;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle
