#pragma once

// Untwisted elliptic functions on the torus with periods 2πi and 2πiτ:
// theta with characteristics, Dedekind eta, Eisenstein series, P_k, P_0 and
// the prime form K.

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "twisted/error.hpp"
#include "twisted/numeric.hpp"

namespace twisted {

/// A point of the upper half plane.
class TauPoint {
 public:
  explicit TauPoint(cplx tau) : tau_(tau) {
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
      throw Error(ErrorKind::Domain, "tau must satisfy Im(tau) > 0");
  }
  cplx value() const noexcept { return tau_; }
  double im() const noexcept { return tau_.imag(); }
  cplx q() const { return std::exp(two_pi_i * tau_); }
  /// q^s := exp(2πiτ s).
  cplx q_pow(double s) const { return std::exp(two_pi_i * tau_ * s); }
  /// Real width 2π Im τ of the annulus |q| < |q_z| < 1 in the Re z direction.
  double strip_width() const noexcept { return 2.0 * pi * tau_.imag(); }

 private:
  cplx tau_;
};

struct ThetaChar {
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

// Terminates a one-sided series once `needed` consecutive terms have fallen
// below the threshold.
class TailCounter {
 public:
  explicit TailCounter(int needed = 3) : needed_(needed) {}
  bool push(double term_abs, double threshold) {
    run_ = (term_abs < threshold) ? run_ + 1 : 0;
    return run_ >= needed_;
  }

 private:
  int needed_;
  int run_ = 0;
};

inline double scale_of(cplx acc) { return std::max(1.0, std::abs(acc)); }

inline bool in_annulus(cplx z, const TauPoint& tau) {
  return z.real() < 0.0 && z.real() > -tau.strip_width();
}

inline void require_annulus(cplx z, const TauPoint& tau, const char* who) {
  if (!in_annulus(z, tau))
    throw Error(ErrorKind::Domain, std::string(who) + ": need |q| < |q_z| < 1, got Re z = " +
                                       std::to_string(z.real()) + " outside (" +
                                       std::to_string(-tau.strip_width()) + ", 0)");
}

// Twisted P_k q-series at phases (mu, lam); theta = e^{-2πi mu}. Requires the
// annulus. Positive-n and negative-n halves are summed separately; for n < 0
// the summand is rewritten so nothing overflows.
inline cplx pk_qseries(int k, double mu, double lam, bool trivial, cplx z, const TauPoint& tau,
                       const TruncationConfig& cfg) {
  if (k < 1) throw Error(ErrorKind::Domain, "P_k requires k >= 1");
  require_annulus(z, tau, "P_k");
  const cplx theta = std::exp(cplx(0.0, -2.0 * pi * mu));
  const cplx t = tau.value();
  double fact = 1.0;
  for (int j = 2; j < k; ++j) fact *= j;
  const double pref = ((k % 2 == 0) ? 1.0 : -1.0) / fact;
  const int cap = 16 * cfg.q_order;

  auto guard = [](cplx denom) {
    if (std::abs(denom) < 1e-12) throw Error(ErrorKind::NearPole, "|1 - θ^{-1} q^n| < 1e-12");
  };

  cplx up = 0.0;
  {
    TailCounter tail;
    bool done = false;
    for (int r = 0; r <= cap; ++r) {
      const double n = r + lam;
      if (trivial && r == 0) continue;
      const cplx qn = std::exp(two_pi_i * t * n);
      const cplx denom = 1.0 - qn / theta;
      guard(denom);
      const cplx term = std::pow(n, k - 1) * std::exp(n * z) / denom;
      up += term;
      if (tail.push(std::abs(pref * term), cfg.tol * 1e-2 * scale_of(pref * up))) {
        done = true;
        break;
      }
    }
    if (!done) throw Error(ErrorKind::NotConverged, "P_k: positive-n window exhausted");
  }
  cplx down = 0.0;
  {
    TailCounter tail;
    bool done = false;
    for (int r = 1; r <= cap; ++r) {
      const double n = lam - r;  // negative
      // q_z^n / (1 - θ^{-1} q^n) = -θ q_z^n q^{-n} / (1 - θ q^{-n})
      const cplx qm = std::exp(-two_pi_i * t * n);
      const cplx denom = 1.0 - theta * qm;
      guard(denom);
      const cplx term = -std::pow(n, k - 1) * theta * std::exp(n * z) * qm / denom;
      down += term;
      if (tail.push(std::abs(pref * term), cfg.tol * 1e-2 * scale_of(pref * (up + down)))) {
        done = true;
        break;
      }
    }
    if (!done) throw Error(ErrorKind::NotConverged, "P_k: negative-n window exhausted");
  }
  return pref * (up + down);
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Jacobi theta with characteristics:
/// Σ_n exp(iπ(n+a)²τ + (n+a)(z + 2πib)). The window is centred on the peak
/// term and doubled until the edge terms drop below tol.
inline cplx theta_char(const ThetaChar& ch, cplx z, const TauPoint& tau,
                       const TruncationConfig& cfg = {}, int derivative = 0) {
  const cplx t = tau.value();
  const cplx w = z + two_pi_i * ch.b;
  // real part of the exponent is maximal at n + a = Re(z)/(2π Im τ)
  const double peak = z.real() / tau.strip_width() - ch.a;
  if (!std::isfinite(peak)) throw Error(ErrorKind::Domain, "theta_char: non-finite argument");
  const long centre = std::lround(peak);
  auto term = [&](long n) {
    const double m = static_cast<double>(n) + ch.a;
    const cplx e = std::exp(cplx(0.0, pi) * m * m * t + m * w);
    return derivative == 0 ? e : std::pow(m, derivative) * e;
  };
  const long cap = 16L * cfg.theta_range;
  long width = cfg.theta_range;
  cplx sum = term(centre);
  long have = 0;
  while (true) {
    for (long j = have + 1; j <= width; ++j) sum += term(centre + j) + term(centre - j);
    have = width;
    const double edge = std::max(std::abs(term(centre + width)), std::abs(term(centre - width)));
    if (edge < cfg.tol * 1e-2 * detail::scale_of(sum)) return sum;
    if (width >= cap) throw Error(ErrorKind::NotConverged, "theta_char: window cap reached");
    width = std::min(2 * width, cap);
  }
}

/// z-derivative of theta_char, summed termwise.
inline cplx theta_char_dz(const ThetaChar& ch, cplx z, const TauPoint& tau,
                          const TruncationConfig& cfg = {}) {
  return theta_char(ch, z, tau, cfg, 1);
}

/// Dedekind eta, q^{1/24} Π_{n≥1} (1 - q^n).
inline cplx dedekind_eta(const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx q = tau.q();
  cplx prod = tau.q_pow(1.0 / 24.0);
  cplx qn = 1.0;
  for (int n = 1; n <= cfg.q_order; ++n) {
    qn *= q;
    prod *= 1.0 - qn;
    if (std::abs(qn) < cfg.tol * 1e-4) return prod;
  }
  if (std::abs(qn) > cfg.tol) throw Error(ErrorKind::NotConverged, "dedekind_eta: q_order too small");
  return prod;
}

/// Classical Eisenstein series E_n(τ); zero for odd n.
inline cplx eisenstein(int n, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (n < 2) throw Error(ErrorKind::Domain, "eisenstein requires n >= 2");
  if (n % 2 == 1) return 0.0;
  const cplx q = tau.q();
  const double log_fact = std::lgamma(static_cast<double>(n));  // log (n-1)!
  cplx sum = 0.0;
  cplx qr = 1.0;
  detail::TailCounter tail;
  const cplx base = -bernoulli_scaled(n);
  // peak of r^{n-1}|q|^r sits near (n-1)/(2π Im τ); do not stop before it
  const double peak = (n - 1) / tau.strip_width();
  for (int r = 1; r <= cfg.q_order; ++r) {
    qr *= q;
    const double coeff = 2.0 * std::exp((n - 1) * std::log(static_cast<double>(r)) - log_fact);
    const cplx term = coeff * qr / (1.0 - qr);
    sum += term;
    if (r > peak && tail.push(std::abs(term), cfg.tol * 1e-2 * detail::scale_of(base + sum)))
      return base + sum;
  }
  throw Error(ErrorKind::NotConverged, "eisenstein: q_order exhausted for n = " + std::to_string(n));
}

/// Weierstrass-type P_k(z,τ) from the q-series. For k = 1 this is the
/// derivative of log K, with no constant term.
inline cplx weierstrass_pk(int k, cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx v = detail::pk_qseries(k, 0.0, 0.0, true, z, tau, cfg);
  return k == 1 ? v - 0.5 : v;
}

/// 2π times the length of the shortest nonzero vector of ℤ + τℤ; the radius of
/// convergence of the P_0 series about z = 0.
inline double lattice_radius(const TauPoint& tau) {
  const cplx t = tau.value();
  double best = std::numeric_limits<double>::infinity();
  const int span = 2 + static_cast<int>(std::ceil(1.0 / tau.im()));
  const int mspan = span + 1 + static_cast<int>(std::ceil(std::abs(t.real()) * span));
  for (int n = -span; n <= span; ++n)
    for (int m = -mspan; m <= mspan; ++m)
      if (m != 0 || n != 0) best = std::min(best, std::abs(static_cast<double>(m) + static_cast<double>(n) * t));
  return 2.0 * pi * best;
}

/// P_0(z,τ) = -log z + Σ_{k≥2} E_k z^k / k, principal branch of log.
inline cplx p0(cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const double radius = lattice_radius(tau);
  if (z == cplx{}) throw Error(ErrorKind::Domain, "p0: z = 0");
  if (std::abs(z) >= radius)
    throw Error(ErrorKind::Domain, "p0: |z| must be below " + std::to_string(radius));
  cplx sum = -std::log(z);
  cplx zk = 1.0;
  detail::TailCounter tail;
  for (int k = 2; k <= 2000; k += 2) {
    zk *= z * z;  // z^k
    const cplx term = eisenstein(k, tau, cfg) * zk / static_cast<double>(k);
    sum += term;
    if (tail.push(std::abs(term), cfg.tol * 1e-2 * detail::scale_of(sum))) return sum;
  }
  throw Error(ErrorKind::NotConverged, "p0: series did not converge");
}

/// Prime form K(z,τ) = exp(-P_0(z,τ)); same domain as p0.
inline cplx prime_form(cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  return std::exp(-p0(z, tau, cfg));
}

/// Prime form from (-i/η³) θ[½;½](z,τ); entire in z.
inline cplx prime_form_theta(cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx eta = dedekind_eta(tau, cfg);
  return cplx(0.0, -1.0) / (eta * eta * eta) * theta_char({0.5, 0.5}, z, tau, cfg);
}

}  // namespace twisted
