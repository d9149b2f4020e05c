#pragma once

// Twisted Weierstrass functions P_k[θ;φ], twisted Eisenstein series
// E_n[θ;φ], their expansion coefficients C and D, lattice-sum oracles and the
// SL(2,ℤ) actions on (z,τ) and on twists.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "twisted/classical.hpp"
#include "twisted/error.hpp"
#include "twisted/numeric.hpp"

namespace twisted {

/// A point (θ,φ) of U(1)×U(1), stored as phases μ, λ ∈ [0,1) with
/// θ = e^{-2πiμ} and φ = e^{2πiλ}.
class TwistPair {
 public:
  static constexpr double kPhaseTol = 1e-12;

  TwistPair() = default;
  TwistPair(double mu, double lambda) : mu_(reduce(mu)), lambda_(reduce(lambda)) {}

  static TwistPair trivial() { return {}; }
  static TwistPair from_multipliers(cplx theta, cplx phi) {
    return {-std::arg(theta) / (2.0 * pi), std::arg(phi) / (2.0 * pi)};
  }

  double mu() const noexcept { return mu_; }
  double lambda() const noexcept { return lambda_; }
  cplx theta() const { return std::exp(cplx(0.0, -2.0 * pi * mu_)); }
  cplx phi() const { return std::exp(cplx(0.0, 2.0 * pi * lambda_)); }
  bool theta_trivial() const noexcept { return mu_ == 0.0; }
  bool phi_trivial() const noexcept { return lambda_ == 0.0; }
  bool is_trivial() const noexcept { return theta_trivial() && phi_trivial(); }

  /// (θ^{-1}, φ^{-1}).
  TwistPair inverse() const { return {-mu_, -lambda_}; }

  friend bool operator==(const TwistPair& x, const TwistPair& y) {
    return phase_distance(x.mu_, y.mu_) <= kPhaseTol && phase_distance(x.lambda_, y.lambda_) <= kPhaseTol;
  }

 private:
  static double reduce(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Domain, "twist phase must be finite");
    double r = x - std::floor(x);
    if (r < kPhaseTol || r > 1.0 - kPhaseTol) r = 0.0;
    return r;
  }
  static double phase_distance(double x, double y) {
    const double d = std::abs(x - y);
    return std::min(d, 1.0 - d);
  }

  double mu_ = 0.0;
  double lambda_ = 0.0;
};

/// Element of SL(2,ℤ).
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(long a, long b, long c, long d) : a_(a), b_(b), c_(c), d_(d) {
    if (a * d - b * c != 1) throw Error(ErrorKind::Domain, "group element must have ad - bc = 1");
  }
  static GroupElement identity() { return {1, 0, 0, 1}; }
  static GroupElement S() { return {0, 1, -1, 0}; }
  static GroupElement T() { return {1, 1, 0, 1}; }

  long a() const noexcept { return a_; }
  long b() const noexcept { return b_; }
  long c() const noexcept { return c_; }
  long d() const noexcept { return d_; }

  GroupElement inverse() const { return {d_, -b_, -c_, a_}; }
  /// c τ + d.
  cplx automorphy(cplx tau) const { return static_cast<double>(c_) * tau + static_cast<double>(d_); }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return {x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_, x.c_ * y.a_ + x.d_ * y.c_,
            x.c_ * y.b_ + x.d_ * y.d_};
  }
  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  long a_ = 1, b_ = 0, c_ = 0, d_ = 1;
};

// ---------------------------------------------------------------------------
// Group actions

/// (z, τ) ↦ (z/(cτ+d), (aτ+b)/(cτ+d)).
inline std::pair<cplx, TauPoint> gamma_act_point(const GroupElement& g, cplx z, const TauPoint& tau) {
  const cplx t = tau.value();
  const cplx j = g.automorphy(t);
  return {z / j, TauPoint((static_cast<double>(g.a()) * t + static_cast<double>(g.b())) / j)};
}

/// (θ,φ) ↦ (θ^a φ^b, θ^c φ^d), on phases (μ,λ) ↦ (aμ - bλ, dλ - cμ).
inline TwistPair gamma_act_twist(const GroupElement& g, const TwistPair& tw) {
  const double mu = tw.mu();
  const double lam = tw.lambda();
  // integer multiples of phases in [0,1): reduce each product first to keep precision
  auto frac = [](long n, double x) {
    const double y = static_cast<double>(n) * x;
    return y - std::floor(y);
  };
  return {frac(g.a(), mu) - frac(g.b(), lam), frac(g.d(), lam) - frac(g.c(), mu)};
}

// ---------------------------------------------------------------------------
// Twisted P_k

/// P_k[θ;φ](z,τ) from its q-series; requires |q| < |q_z| < 1.
inline cplx twisted_pk(int k, const TwistPair& tw, cplx z, const TauPoint& tau,
                       const TruncationConfig& cfg = {}) {
  return detail::pk_qseries(k, tw.mu(), tw.lambda(), tw.is_trivial(), z, tau, cfg);
}

/// P_k[θ;φ] at any z off the lines Re z ∈ 2π Im τ ℤ, by moving z into the
/// annulus with P_k(z + 2πiτ) = θ P_k(z) - δ_{k1} δ_{tw,trivial}.
inline cplx twisted_pk_continued(int k, const TwistPair& tw, cplx z, const TauPoint& tau,
                                 const TruncationConfig& cfg = {}) {
  const double s = z.real() / tau.strip_width();
  const double j = std::floor(s) + 1.0;
  if (std::abs(s - std::round(s)) < 1e-9)
    throw Error(ErrorKind::Domain, "P_k: Re z lies on a boundary line of the q-series annulus");
  const cplx shifted = z + j * two_pi_i * tau.value();
  cplx v = twisted_pk(k, tw, shifted, tau, cfg);
  if (k == 1 && tw.is_trivial()) v += j;
  return v * std::exp(cplx(0.0, 2.0 * pi * tw.mu() * j));  // θ^{-j}
}

/// Classical P_k away from the annulus, via twisted_pk_continued.
inline cplx weierstrass_pk_continued(int k, cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx v = twisted_pk_continued(k, TwistPair::trivial(), z, tau, cfg);
  return k == 1 ? v - 0.5 : v;
}

namespace detail {

// d^order/dx^order of e^{λx}/(e^x - 1), as e^{λx} Σ_j c_j u^j with
// u = 1/(e^x - 1) and u' = -u - u².
inline std::vector<double> s_derivative_coeffs(int order, double lam) {
  std::vector<double> c{0.0, 1.0};
  for (int step = 0; step < order; ++step) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j] += lam * c[j];
      if (j >= 1) {
        next[j] -= static_cast<double>(j) * c[j];
        next[j + 1] -= static_cast<double>(j) * c[j];
      }
    }
    c = std::move(next);
  }
  return c;
}

inline cplx s_derivative_eval(const std::vector<double>& c, double lam, cplx x) {
  cplx sum = 0.0;
  if (x.real() <= 0.0) {
    const cplx e = std::exp(lam * x);
    const cplx u = 1.0 / (std::exp(x) - 1.0);
    cplx uj = 1.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      uj *= u;
      if (c[j] != 0.0) sum += c[j] * uj;
    }
    return e * sum;
  }
  // e^{λx} u^j = e^{(λ-j)x} v^j with v = 1/(1 - e^{-x})
  const cplx v = 1.0 / (1.0 - std::exp(-x));
  cplx vj = 1.0;
  for (std::size_t j = 1; j < c.size(); ++j) {
    vj *= v;
    if (c[j] != 0.0) sum += c[j] * std::exp((lam - static_cast<double>(j)) * x) * vj;
  }
  return sum;
}

// Σ_{m ≠ 0 or all m} w^m f(x0 + m step), summed outward until both tails
// have three consecutive negligible terms.
template <class F>
cplx lattice_sum(F&& f, cplx w, bool include_zero, const TruncationConfig& cfg, const char* who) {
  cplx sum = include_zero ? f(0) : cplx{};
  TailCounter up, down;
  bool up_done = false, down_done = false;
  const long cap = 64L * cfg.lattice_range;
  for (long m = 1; m <= cap; ++m) {
    if (!up_done) {
      const cplx t = std::pow(w, static_cast<double>(m)) * f(m);
      sum += t;
      up_done = up.push(std::abs(t), cfg.tol * 1e-2 * scale_of(sum)) && m >= 2;
    }
    if (!down_done) {
      const cplx t = std::pow(w, -static_cast<double>(m)) * f(-m);
      sum += t;
      down_done = down.push(std::abs(t), cfg.tol * 1e-2 * scale_of(sum)) && m >= 2;
    }
    if (up_done && down_done) return sum;
  }
  throw Error(ErrorKind::NotConverged, std::string(who) + ": lattice window exhausted");
}

inline double inv_factorial(int n) { return std::exp(-std::lgamma(static_cast<double>(n) + 1.0)); }

}  // namespace detail

/// Which collapsed double sum an oracle uses.
enum class OracleRoute {
  Auto,            // phi route when φ ≠ 1, otherwise theta route
  PhiNontrivial,   // sum over the τ-direction, needs φ ≠ 1
  ThetaNontrivial, // sum over the 2πi-direction after z ↦ z/τ, needs θ ≠ 1
};

namespace detail {

inline OracleRoute pick_route(const TwistPair& tw, OracleRoute route) {
  if (route == OracleRoute::Auto) {
    if (!tw.phi_trivial()) return OracleRoute::PhiNontrivial;
    if (!tw.theta_trivial()) return OracleRoute::ThetaNontrivial;
    throw Error(ErrorKind::RouteUnavailable, "both twist components are trivial");
  }
  if (route == OracleRoute::PhiNontrivial && tw.phi_trivial())
    throw Error(ErrorKind::RouteUnavailable, "phi route needs φ ≠ 1");
  if (route == OracleRoute::ThetaNontrivial && tw.theta_trivial())
    throw Error(ErrorKind::RouteUnavailable, "theta route needs θ ≠ 1");
  return route;
}

}  // namespace detail

/// P_k[θ;φ](z,τ) as a single lattice sum over closed-form inner sums. Valid
/// for every z off the lattice; slow.
inline cplx twisted_pk_oracle(int k, const TwistPair& tw, cplx z, const TauPoint& tau,
                              const TruncationConfig& cfg = {}, OracleRoute route = OracleRoute::Auto) {
  if (k < 1) throw Error(ErrorKind::Domain, "P_k requires k >= 1");
  route = detail::pick_route(tw, route);
  const cplx t = tau.value();
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k-1}
  const double pref = sign * detail::inv_factorial(k - 1);
  if (route == OracleRoute::PhiNontrivial) {
    const double lam = tw.lambda();
    const auto c = detail::s_derivative_coeffs(k - 1, lam);
    auto f = [&](long m) { return detail::s_derivative_eval(c, lam, z - two_pi_i * static_cast<double>(m) * t); };
    return pref * detail::lattice_sum(f, tw.theta(), true, cfg, "twisted_pk_oracle");
  }
  const double lam = tw.inverse().mu();  // θ viewed as a φ-type phase: (-μ) mod 1
  const auto c = detail::s_derivative_coeffs(k - 1, lam);
  auto f = [&](long n) { return detail::s_derivative_eval(c, lam, (z - two_pi_i * static_cast<double>(n)) / t); };
  return pref * std::pow(t, -k) * detail::lattice_sum(f, tw.phi(), true, cfg, "twisted_pk_oracle");
}

// ---------------------------------------------------------------------------
// Twisted Eisenstein series

/// E_n[θ;φ](τ) from its q-series.
inline cplx twisted_eisenstein(int n, const TwistPair& tw, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (n < 1) throw Error(ErrorKind::Domain, "twisted_eisenstein requires n >= 1");
  const double lam = tw.lambda();
  const cplx theta = tw.theta();
  const cplx t = tau.value();
  const double log_fact = std::lgamma(static_cast<double>(n));  // log (n-1)!
  auto coeff = [&](double base) {
    if (n == 1) return 1.0;
    if (base == 0.0) return 0.0;
    return std::exp((n - 1) * std::log(base) - log_fact);
  };
  auto guard = [](cplx denom) {
    if (std::abs(denom) < 1e-12) throw Error(ErrorKind::NearPole, "twisted_eisenstein: denominator below 1e-12");
  };
  const double peak = (n - 1) / tau.strip_width() + 1.0;
  const cplx base = -bernoulli_poly(n, lam) * detail::inv_factorial(n);

  cplx first = 0.0;
  {
    detail::TailCounter tail;
    bool done = false;
    for (int r = 0; r <= cfg.q_order; ++r) {
      if (r == 0 && tw.is_trivial()) continue;
      const cplx x = std::exp(two_pi_i * t * (r + lam)) / theta;
      guard(1.0 - x);
      const cplx term = coeff(r + lam) * x / (1.0 - x);
      first += term;
      if (r > peak && tail.push(std::abs(term), cfg.tol * 1e-2 * detail::scale_of(base + first))) {
        done = true;
        break;
      }
    }
    if (!done) throw Error(ErrorKind::NotConverged, "twisted_eisenstein: q_order exhausted");
  }
  cplx second = 0.0;
  {
    detail::TailCounter tail;
    bool done = false;
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    for (int r = 1; r <= cfg.q_order; ++r) {
      const cplx x = theta * std::exp(two_pi_i * t * (r - lam));
      guard(1.0 - x);
      const cplx term = sgn * coeff(r - lam) * x / (1.0 - x);
      second += term;
      if (r > peak && tail.push(std::abs(term), cfg.tol * 1e-2 * detail::scale_of(base + first + second))) {
        done = true;
        break;
      }
    }
    if (!done) throw Error(ErrorKind::NotConverged, "twisted_eisenstein: q_order exhausted");
  }
  return base + first + second;
}

/// E_n[θ;φ](τ) from the lattice-sum form, i.e. the Laurent coefficients of
/// the P_1 oracle at z = 0.
inline cplx twisted_eisenstein_oracle(int n, const TwistPair& tw, const TauPoint& tau,
                                      const TruncationConfig& cfg = {}, OracleRoute route = OracleRoute::Auto) {
  if (n < 1) throw Error(ErrorKind::Domain, "twisted_eisenstein requires n >= 1");
  route = detail::pick_route(tw, route);
  const cplx t = tau.value();
  const double inv_fact = detail::inv_factorial(n - 1);
  if (route == OracleRoute::PhiNontrivial) {
    const double lam = tw.lambda();
    const auto c = detail::s_derivative_coeffs(n - 1, lam);
    auto f = [&](long m) { return detail::s_derivative_eval(c, lam, -two_pi_i * static_cast<double>(m) * t); };
    const cplx tail = detail::lattice_sum(f, tw.theta(), false, cfg, "twisted_eisenstein_oracle");
    return -bernoulli_poly(n, lam) * detail::inv_factorial(n) - inv_fact * tail;
  }
  const double lam = tw.inverse().mu();
  const auto c = detail::s_derivative_coeffs(n - 1, lam);
  auto f = [&](long j) { return detail::s_derivative_eval(c, lam, -two_pi_i * static_cast<double>(j) / t); };
  const cplx tail = detail::lattice_sum(f, tw.phi(), false, cfg, "twisted_eisenstein_oracle");
  return -std::pow(t, -n) * (bernoulli_poly(n, lam) * detail::inv_factorial(n) + inv_fact * tail);
}

// ---------------------------------------------------------------------------
// Expansion coefficients

/// C[θ;φ](k,l) = (-1)^l binom(k+l-2, k-1) E_{k+l-1}[θ;φ].
inline cplx coeff_C(int k, int l, const TwistPair& tw, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (k < 1 || l < 1) throw Error(ErrorKind::Domain, "coeff_C requires k, l >= 1");
  const double sign = (l % 2 == 0) ? 1.0 : -1.0;
  return sign * static_cast<double>(binomial(k + l - 2, k - 1)) * twisted_eisenstein(k + l - 1, tw, tau, cfg);
}

/// D[θ;φ](k,l,z) = (-1)^{k+1} binom(k+l-2, k-1) P_{k+l-1}[θ;φ](z,τ), evaluated
/// off the annulus boundary lines.
inline cplx coeff_D(int k, int l, const TwistPair& tw, cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (k < 1 || l < 1) throw Error(ErrorKind::Domain, "coeff_D requires k, l >= 1");
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * static_cast<double>(binomial(k + l - 2, k - 1)) * twisted_pk_continued(k + l - 1, tw, z, tau, cfg);
}

// ---------------------------------------------------------------------------
// Theta-function form of P_1

/// P_1[θ;φ] from theta functions and the prime form. For a nontrivial twist
/// θ[λ+½;μ+½](z)/(θ[λ+½;μ+½](0) K(z)); for the trivial twist θ'/θ at
/// characteristic [½;½] plus ½.
inline cplx twisted_p1_theta_form(const TwistPair& tw, cplx z, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (tw.is_trivial()) {
    const ThetaChar odd{0.5, 0.5};
    return theta_char_dz(odd, z, tau, cfg) / theta_char(odd, z, tau, cfg) + 0.5;
  }
  const ThetaChar ch{tw.lambda() + 0.5, tw.mu() + 0.5};
  const cplx denom = theta_char(ch, 0.0, tau, cfg);
  if (std::abs(denom) < cfg.tol) throw Error(ErrorKind::DegenerateTheta, "theta constant vanishes");
  return theta_char(ch, z, tau, cfg) / (denom * prime_form_theta(z, tau, cfg));
}

}  // namespace twisted
