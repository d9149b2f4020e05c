#pragma once

// Sampling-based checks of the identities satisfied by the twisted elliptic
// functions and the fermion correlators. Each check draws its inputs from its
// own seeded generator and returns IdentityReports.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "twisted/classical.hpp"
#include "twisted/error.hpp"
#include "twisted/fermion.hpp"
#include "twisted/numeric.hpp"
#include "twisted/twisted_functions.hpp"

namespace twisted {

/// Where a check draws its inputs.
struct SamplePlan {
  std::uint64_t seed = 7;
  int count = 20;
  double re_tau_min = -0.4;
  double re_tau_max = 0.4;
  double im_tau_min = 0.8;
  double im_tau_max = 2.0;
  double annulus_margin = 0.1;   // Re z kept this fraction of 2π Im τ away from the annulus edges
  double min_separation = 0.05;  // distance of point differences from lattice translates of 0
  double twist_margin = 0.05;    // twist phases drawn from [margin, 1 - margin]

  void validate() const {
    if (count < 1) throw Error(ErrorKind::Parse, "count must be >= 1");
    if (!(annulus_margin > 0.0 && annulus_margin < 0.5)) throw Error(ErrorKind::Parse, "annulus_margin must lie in (0, 0.5)");
    if (!(twist_margin > 0.0 && twist_margin < 0.5)) throw Error(ErrorKind::Parse, "twist_margin must lie in (0, 0.5)");
    if (!(min_separation > 0.0)) throw Error(ErrorKind::Parse, "min_separation must be > 0");
    if (!(im_tau_min > 0.0 && im_tau_max >= im_tau_min && re_tau_max >= re_tau_min))
      throw Error(ErrorKind::Parse, "tau box must lie in the upper half plane");
  }
};

enum class SampleStatus { Ok, Skipped, Measured, Error };

inline const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::Skipped: return "skipped";
    case SampleStatus::Measured: return "measured";
    case SampleStatus::Error: return "error";
  }
  return "?";
}

struct Sample {
  std::string input;
  cplx lhs;
  cplx rhs;
  double residual = 0.0;
  SampleStatus status = SampleStatus::Ok;
  std::string note;
};

/// One named identity with its samples and verdict. Skipped and measured
/// samples do not count toward max_residual.
struct IdentityReport {
  std::string identity_name;
  std::vector<Sample> samples;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  TruncationConfig cfg_used;
  std::uint64_t seed = 0;
};

/// |lhs - rhs| / max(1, |lhs|, |rhs|).
inline double residual(cplx lhs, cplx rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(cplx z) { return fmt(z.real()) + (z.imag() < 0 || std::signbit(z.imag()) ? "" : "+") + fmt(z.imag()) + "i"; }

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic input generator. Uniform variates are built from the raw
/// 64-bit engine output so results do not depend on the standard library.
class Sampler {
 public:
  Sampler(const SamplePlan& plan, const std::string& stream) : plan_(plan), rng_(plan.seed ^ detail::fnv1a(stream)) {}

  double uniform(double a, double b) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  TauPoint tau() { return TauPoint({uniform(plan_.re_tau_min, plan_.re_tau_max), uniform(plan_.im_tau_min, plan_.im_tau_max)}); }

  double phase() { return uniform(plan_.twist_margin, 1.0 - plan_.twist_margin); }

  TwistPair twist() { return {phase(), phase()}; }

  OrbifoldParams params() { return {phase(), phase()}; }

  /// z with -(1-m)L < Re z < -mL and |Im z| ≤ π, L = 2π Im τ.
  cplx z_annulus(const TauPoint& tau) {
    const double l = tau.strip_width();
    const double m = plan_.annulus_margin;
    return {uniform(-(1.0 - m) * l, -m * l), uniform(-pi, pi)};
  }

  /// Distance from z to the nearest point of 2πi(ℤ + τℤ).
  static double lattice_distance(cplx z, const TauPoint& tau) {
    const cplx t = tau.value();
    const double n0 = std::round(-z.real() / tau.strip_width());
    double best = std::numeric_limits<double>::infinity();
    for (double n = n0 - 1; n <= n0 + 1; ++n) {
      const cplx w = z - two_pi_i * n * t;
      const double m0 = std::round(w.imag() / (2.0 * pi));
      for (double m = m0 - 1; m <= m0 + 1; ++m) best = std::min(best, std::abs(w - two_pi_i * m));
    }
    return best;
  }

  bool separated(cplx d, const TauPoint& tau) const { return lattice_distance(d, tau) >= plan_.min_separation; }

  /// Re d kept at least `frac` of a strip width away from the lines where the q-series diverges.
  static bool off_boundary(cplx d, const TauPoint& tau, double frac) {
    const double s = d.real() / tau.strip_width();
    return std::abs(s - std::round(s)) >= frac;
  }

  /// n points with Re in [lo, hi]·L, every pairwise difference separated
  /// from the lattice and away from the annulus boundary lines.
  std::vector<cplx> points(const TauPoint& tau, std::size_t n, double lo, double hi) {
    const double l = tau.strip_width();
    for (int attempt = 0; attempt <= 100; ++attempt) {
      std::vector<cplx> zs(n);
      for (auto& z : zs) z = {uniform(lo * l, hi * l), uniform(-pi, pi)};
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i + 1; j < n && ok; ++j)
          ok = separated(zs[i] - zs[j], tau) && off_boundary(zs[i] - zs[j], tau, 0.05);
      if (ok) return zs;
    }
    throw Error(ErrorKind::Domain, "sampler: could not place separated points");
  }

  /// Two point sets with x_i - y_j inside the annulus and all differences separated.
  std::pair<std::vector<cplx>, std::vector<cplx>> point_pairs(const TauPoint& tau, std::size_t nx, std::size_t ny) {
    for (int attempt = 0; attempt <= 100; ++attempt) {
      auto xs = points(tau, nx, -0.8, -0.55);
      auto ys = points(tau, ny, -0.45, -0.2);
      bool ok = true;
      for (const auto& x : xs)
        for (const auto& y : ys) ok = ok && separated(x - y, tau);
      if (ok) return {std::move(xs), std::move(ys)};
    }
    throw Error(ErrorKind::Domain, "sampler: could not place separated point pairs");
  }

  const SamplePlan& plan() const noexcept { return plan_; }

 private:
  SamplePlan plan_;
  std::mt19937_64 rng_;
};

/// Accumulates samples and fixes the verdict.
class ReportBuilder {
 public:
  ReportBuilder(std::string name, double tolerance, const SamplePlan& plan, const TruncationConfig& cfg) {
    report_.identity_name = std::move(name);
    report_.tolerance = tolerance;
    report_.cfg_used = cfg;
    report_.seed = plan.seed;
  }

  void add(std::string input, cplx lhs, cplx rhs, std::string note = {}) {
    report_.samples.push_back({std::move(input), lhs, rhs, residual(lhs, rhs), SampleStatus::Ok, std::move(note)});
  }
  void measure(std::string input, cplx lhs, cplx rhs, std::string note) {
    report_.samples.push_back({std::move(input), lhs, rhs, residual(lhs, rhs), SampleStatus::Measured, std::move(note)});
  }
  void skip(std::string input, std::string note) {
    report_.samples.push_back({std::move(input), 0.0, 0.0, 0.0, SampleStatus::Skipped, std::move(note)});
  }
  void fail(std::string input, std::string note) {
    report_.samples.push_back({std::move(input), 0.0, 0.0, std::numeric_limits<double>::infinity(), SampleStatus::Error,
                               std::move(note)});
  }

  /// Runs `body`; library errors become failing samples instead of aborting the check.
  template <class F>
  void guarded(const std::string& input, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      fail(input, e.what());
    }
  }

  IdentityReport finish() {
    double worst = 0.0;
    bool any = false;
    for (const auto& s : report_.samples) {
      if (s.status == SampleStatus::Ok || s.status == SampleStatus::Error) {
        any = true;
        worst = std::max(worst, s.residual);
      }
    }
    report_.max_residual = worst;
    report_.passed = any && worst <= report_.tolerance;
    return std::move(report_);
  }

 private:
  IdentityReport report_;
};

namespace detail {

inline std::string describe(const TauPoint& tau) { return "tau=" + fmt(tau.value()); }
inline std::string describe(const TwistPair& tw) { return "mu=" + fmt(tw.mu()) + " lambda=" + fmt(tw.lambda()); }
inline std::string describe(const OrbifoldParams& p) { return "alpha=" + fmt(p.alpha) + " beta=" + fmt(p.beta); }
inline std::string describe(const char* name, const std::vector<cplx>& zs) {
  std::string out = std::string(name) + "=[";
  for (std::size_t i = 0; i < zs.size(); ++i) out += (i ? "," : "") + fmt(zs[i]);
  return out + "]";
}

inline double sign_of_order(std::size_t n) { return ((n * (n - 1) / 2) % 2 == 1) ? -1.0 : 1.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Twisted elliptic functions

/// q-series P_k[θ;φ] against both lattice-sum routes.
inline IdentityReport check_doublesum(int k, const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "doublesum_k" + std::to_string(k);
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-9, plan, cfg);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const TwistPair tw = rng.twist();
    const cplx z = rng.z_annulus(tau);
    const std::string in = detail::describe(tau) + " " + detail::describe(tw) + " z=" + fmt(z);
    rep.guarded(in, [&] {
      const cplx series = twisted_pk(k, tw, z, tau, cfg);
      rep.add(in + " route=phi", series, twisted_pk_oracle(k, tw, z, tau, cfg, OracleRoute::PhiNontrivial));
      rep.add(in + " route=theta", series, twisted_pk_oracle(k, tw, z, tau, cfg, OracleRoute::ThetaNontrivial));
    });
  }
  // one-sided twists reach only one route each
  const TauPoint tau = rng.tau();
  const cplx z = rng.z_annulus(tau);
  for (const TwistPair& tw : {TwistPair(0.0, rng.phase()), TwistPair(rng.phase(), 0.0), TwistPair(0.0, 0.5)}) {
    const std::string in = detail::describe(tau) + " " + detail::describe(tw) + " z=" + fmt(z);
    rep.guarded(in, [&] { rep.add(in + " route=auto", twisted_pk(k, tw, z, tau, cfg), twisted_pk_oracle(k, tw, z, tau, cfg)); });
  }
  const std::string in = detail::describe(tau) + " mu=0 lambda=0 z=" + fmt(z);
  try {
    twisted_pk_oracle(k, TwistPair::trivial(), z, tau, cfg);
    rep.fail(in, "trivial twist unexpectedly accepted by the oracle");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RouteUnavailable) throw;
    rep.skip(in, e.what());
  }
  return rep.finish();
}

/// Twisted Eisenstein q-series against the lattice-sum forms; the trivial
/// twist against the classical series.
inline IdentityReport check_eisenstein_lattice(int n, const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "eisenstein_lattice_n" + std::to_string(n);
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-9, plan, cfg);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const TwistPair tw = rng.twist();
    const std::string in = detail::describe(tau) + " " + detail::describe(tw);
    rep.guarded(in, [&] {
      const cplx series = twisted_eisenstein(n, tw, tau, cfg);
      rep.add(in + " route=phi", series, twisted_eisenstein_oracle(n, tw, tau, cfg, OracleRoute::PhiNontrivial));
      rep.add(in + " route=theta", series, twisted_eisenstein_oracle(n, tw, tau, cfg, OracleRoute::ThetaNontrivial));
    });
  }
  const TauPoint tau = rng.tau();
  const std::string in = detail::describe(tau) + " mu=0 lambda=0";
  rep.guarded(in, [&] {
    const cplx expected = (n % 2 == 0) ? eisenstein(n, tau, cfg) : cplx(n == 1 ? 0.5 : 0.0);
    rep.add(in, twisted_eisenstein(n, TwistPair::trivial(), tau, cfg), expected, "trivial twist");
  });
  return rep.finish();
}

/// Laurent coefficients of P_1[θ;φ](z) - 1/z, extracted by a 64-point DFT on
/// |z| = series_radius, against -E_1 … -E_5.
inline IdentityReport check_laurent(const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "laurent";
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-6, plan, cfg);
  constexpr int kPoints = 64;
  constexpr int kCoeffs = 5;
  auto extract = [&](const TwistPair& tw, const TauPoint& tau) {
    const double r = cfg.series_radius;
    std::vector<cplx> vals(kPoints);
    for (int j = 0; j < kPoints; ++j) {
      const cplx z = std::polar(r, 2.0 * pi * j / kPoints);
      const cplx p1 = tw.is_trivial() ? twisted_p1_theta_form(tw, z, tau, cfg) : twisted_pk_oracle(1, tw, z, tau, cfg);
      vals[static_cast<std::size_t>(j)] = p1 - 1.0 / z;
    }
    std::vector<cplx> coeffs(kCoeffs);
    for (int m = 0; m < kCoeffs; ++m) {
      cplx acc = 0.0;
      for (int j = 0; j < kPoints; ++j) acc += vals[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * pi * m * j / kPoints);
      coeffs[static_cast<std::size_t>(m)] = acc / (kPoints * std::pow(r, m));
    }
    return coeffs;
  };
  for (int i = 0; i <= plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const TwistPair tw = i < plan.count ? rng.twist() : TwistPair::trivial();
    const std::string in = detail::describe(tau) + " " + detail::describe(tw);
    rep.guarded(in, [&] {
      const auto coeffs = extract(tw, tau);
      for (int m = 0; m < kCoeffs; ++m) {
        cplx expected = -twisted_eisenstein(m + 1, tw, tau, cfg);
        if (m == 0 && tw.is_trivial()) expected += 1.0;  // P_1[1;1] = 1/z + ½ + …
        rep.add(in + " coeff=" + std::to_string(m), coeffs[static_cast<std::size_t>(m)], expected);
      }
      // E_n[θ^{-1};φ^{-1}] = (-1)^n E_n[θ;φ]; the trivial twist breaks this at n = 1 by its ½
      for (int n = tw.is_trivial() ? 2 : 1; n <= kCoeffs; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        rep.add(in + " reflect n=" + std::to_string(n), twisted_eisenstein(n, tw.inverse(), tau, cfg),
                sign * twisted_eisenstein(n, tw, tau, cfg));
      }
    });
  }
  return rep.finish();
}

/// Quasi-periodicity along 2πi and 2πiτ: twisted P_k, classical P_1 and K, and theta.
inline std::vector<IdentityReport> check_periodicity(const SamplePlan& plan, const TruncationConfig& cfg) {
  std::vector<IdentityReport> out;
  {
    const std::string name = "periodicity_twisted";
    Sampler rng(plan, name);
    ReportBuilder rep(name, 1e-10, plan, cfg);
    for (int i = 0; i < plan.count; ++i) {
      const TauPoint tau = rng.tau();
      const TwistPair tw = rng.twist();
      const cplx z = rng.z_annulus(tau);
      const std::string in = detail::describe(tau) + " " + detail::describe(tw) + " z=" + fmt(z);
      rep.guarded(in, [&] {
        for (int k = 1; k <= 3; ++k) {
          const cplx base = twisted_pk(k, tw, z, tau, cfg);
          rep.add(in + " k=" + std::to_string(k) + " shift=2pi i", twisted_pk(k, tw, z + two_pi_i, tau, cfg), tw.phi() * base);
          rep.add(in + " k=" + std::to_string(k) + " shift=2pi i tau",
                  twisted_pk_oracle(k, tw, z + two_pi_i * tau.value(), tau, cfg), tw.theta() * base);
        }
      });
    }
    out.push_back(rep.finish());
  }
  {
    const std::string name = "periodicity_classical";
    Sampler rng(plan, name);
    ReportBuilder rep(name, 1e-10, plan, cfg);
    for (int i = 0; i < plan.count; ++i) {
      const TauPoint tau = rng.tau();
      const cplx z = rng.z_annulus(tau);
      const std::string in = detail::describe(tau) + " z=" + fmt(z);
      rep.guarded(in, [&] {
        const cplx p1 = weierstrass_pk(1, z, tau, cfg);
        const cplx p1_theta = twisted_p1_theta_form(TwistPair::trivial(), z + two_pi_i * tau.value(), tau, cfg) - 0.5;
        rep.add(in + " P1 shift=2pi i", weierstrass_pk(1, z + two_pi_i, tau, cfg), p1);
        rep.add(in + " P1 shift=2pi i tau", p1_theta, p1 - 1.0);
        rep.add(in + " P2 shift=2pi i", weierstrass_pk(2, z + two_pi_i, tau, cfg), weierstrass_pk(2, z, tau, cfg));
        const cplx k = prime_form_theta(z, tau, cfg);
        rep.add(in + " K shift=2pi i", prime_form_theta(z + two_pi_i, tau, cfg), -k);
        rep.add(in + " K shift=2pi i tau", prime_form_theta(z + two_pi_i * tau.value(), tau, cfg),
                -std::exp(-z) * tau.q_pow(-0.5) * k);
      });
    }
    out.push_back(rep.finish());
  }
  {
    const std::string name = "periodicity_theta";
    Sampler rng(plan, name);
    ReportBuilder rep(name, 1e-10, plan, cfg);
    for (int i = 0; i < plan.count; ++i) {
      const TauPoint tau = rng.tau();
      const ThetaChar ch{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const cplx z{rng.uniform(-3.0, 3.0), rng.uniform(-pi, pi)};
      const std::string in = detail::describe(tau) + " a=" + fmt(ch.a) + " b=" + fmt(ch.b) + " z=" + fmt(z);
      rep.guarded(in, [&] {
        const cplx base = theta_char(ch, z, tau, cfg);
        rep.add(in + " shift=2pi i", theta_char(ch, z + two_pi_i, tau, cfg), std::exp(two_pi_i * ch.a) * base);
        rep.add(in + " shift=2pi i tau", theta_char(ch, z + two_pi_i * tau.value(), tau, cfg),
                std::exp(-cplx(0.0, pi) * tau.value() - z - two_pi_i * ch.b) * base);
      });
    }
    out.push_back(rep.finish());
  }
  return out;
}

/// Covariance of P_k[θ;φ] and E_k[θ;φ] under S, T and TS, the classical
/// E_4, E_6 laws, the exceptional E_2 law and the relation (ST)³ = 1.
inline std::vector<IdentityReport> check_modular_twisted(const SamplePlan& plan, const TruncationConfig& cfg) {
  std::vector<IdentityReport> out;
  const std::vector<std::pair<std::string, GroupElement>> gammas{
      {"S", GroupElement::S()}, {"T", GroupElement::T()}, {"TS", GroupElement::T() * GroupElement::S()}};
  {
    const std::string name = "modular_twisted";
    Sampler rng(plan, name);
    ReportBuilder rep(name, 1e-8, plan, cfg);
    for (int i = 0; i < plan.count; ++i) {
      const TauPoint tau = rng.tau();
      const TwistPair tw = rng.twist();
      const cplx z = rng.z_annulus(tau);
      for (const auto& [gname, g] : gammas) {
        const std::string in = detail::describe(tau) + " " + detail::describe(tw) + " z=" + fmt(z) + " gamma=" + gname;
        rep.guarded(in, [&] {
          const auto [gz, gtau] = gamma_act_point(g, z, tau);
          const TwistPair gtw = gamma_act_twist(g, tw);
          const cplx j = g.automorphy(tau.value());
          if (!Sampler::off_boundary(gz, gtau, 0.05)) {
            rep.skip(in, "transformed point too close to an annulus boundary line");
            return;
          }
          for (int k = 1; k <= 3; ++k)
            rep.add(in + " P" + std::to_string(k), twisted_pk_continued(k, gtw, gz, gtau, cfg),
                    std::pow(j, k) * twisted_pk(k, tw, z, tau, cfg));
          for (int k = 1; k <= 4; ++k)
            rep.add(in + " E" + std::to_string(k), twisted_eisenstein(k, gtw, gtau, cfg),
                    std::pow(j, k) * twisted_eisenstein(k, tw, tau, cfg));
        });
      }
    }
    // (ST)³ acts trivially on (z, τ, θ, φ)
    const GroupElement st = GroupElement::S() * GroupElement::T();
    const GroupElement st3 = st * st * st;
    const TauPoint tau = rng.tau();
    const TwistPair tw = rng.twist();
    const cplx z = rng.z_annulus(tau);
    const auto [gz, gtau] = gamma_act_point(st3, z, tau);
    const TwistPair gtw = gamma_act_twist(st3, tw);
    const std::string in = detail::describe(tau) + " " + detail::describe(tw) + " z=" + fmt(z) + " gamma=(ST)^3";
    rep.add(in + " z", gz, z);
    rep.add(in + " tau", gtau.value(), tau.value());
    rep.add(in + " twist", cplx(gtw.mu(), gtw.lambda()), cplx(tw.mu(), tw.lambda()));
    out.push_back(rep.finish());
  }
  {
    const std::string name = "modular_eisenstein_classical";
    Sampler rng(plan, name);
    ReportBuilder rep(name, 1e-9, plan, cfg);
    for (int i = 0; i < plan.count; ++i) {
      const TauPoint tau = rng.tau();
      const std::string in = detail::describe(tau);
      rep.guarded(in, [&] {
        const cplx t = tau.value();
        const TauPoint s(-1.0 / t);
        rep.add(in + " E2 exceptional", eisenstein(2, s, cfg), t * t * eisenstein(2, tau, cfg) - t / two_pi_i);
        rep.add(in + " E4", eisenstein(4, s, cfg), std::pow(t, 4) * eisenstein(4, tau, cfg));
        rep.add(in + " E6", eisenstein(6, s, cfg), std::pow(t, 6) * eisenstein(6, tau, cfg));
      });
    }
    out.push_back(rep.finish());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fermion correlators

/// Product and theta-series forms of the rank-two partition function.
inline IdentityReport check_jacobi_triple_product(const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "jacobi_triple_product";
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-10, plan, cfg);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const OrbifoldParams p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    const std::string in = detail::describe(tau) + " " + detail::describe(p);
    rep.guarded(in, [&] { rep.add(in, rank2_partition(p, tau, cfg), rank2_partition_theta(p, tau, cfg)); });
  }
  const TauPoint tau = rng.tau();
  const std::string in0 = detail::describe(tau) + " alpha=0 beta=0";
  rep.guarded(in0, [&] {
    rep.add(in0 + " product", rank2_partition({0.0, 0.0}, tau, cfg), 0.0);
    rep.add(in0 + " theta", rank2_partition_theta({0.0, 0.0}, tau, cfg), 0.0);
  });
  // β ↦ β + 1 is reported, not asserted
  for (int i = 0; i < 3; ++i) {
    const OrbifoldParams p = rng.params();
    const OrbifoldParams shifted{p.alpha, p.beta + 1.0};
    const std::string in = detail::describe(tau) + " " + detail::describe(p) + " beta->beta+1";
    rep.guarded(in, [&] {
      rep.measure(in + " product", rank2_partition(shifted, tau, cfg), rank2_partition(p, tau, cfg), "product form, shifted vs unshifted");
      rep.measure(in + " product vs theta", rank2_partition(shifted, tau, cfg), rank2_partition_theta(shifted, tau, cfg),
                  "both forms at the shifted beta");
    });
  }
  return rep.finish();
}

/// det(P_1[θ;φ](x_i - y_j)) Z_{V,h} against its theta/prime-form expression.
inline IdentityReport check_fay_trisecant(int n, const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "fay_trisecant_n" + std::to_string(n);
  Sampler rng(plan, name);
  ReportBuilder rep(name, n <= 2 ? 1e-8 : 1e-7, plan, cfg);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const OrbifoldParams p = rng.params();
    const auto [xs, ys] = rng.point_pairs(tau, static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    const std::string in = detail::describe(tau) + " " + detail::describe(p) + " " + detail::describe("x", xs) + " " +
                           detail::describe("y", ys);
    rep.guarded(in, [&] { rep.add(in, rank2_generating(p, xs, ys, tau, cfg), rank2_generating_boson(p, xs, ys, tau, cfg)); });
    if (n == 1) {
      rep.guarded(in, [&] {
        rep.add(in + " theta form", twisted_pk(1, p.twist(), xs[0] - ys[0], tau, cfg),
                twisted_p1_theta_form(p.twist(), xs[0] - ys[0], tau, cfg));
      });
    }
  }
  return rep.finish();
}

/// Trivial-twist analogue: det Q η² against the prime-form expression, plus
/// translation invariance of det Q.
inline IdentityReport check_k_secant(int n, const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "k_secant_n" + std::to_string(n);
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-8, plan, cfg);
  const OrbifoldParams p{0.0, 0.0};
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    auto [xs, ys] = rng.point_pairs(tau, static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    const std::string in = detail::describe(tau) + " " + detail::describe("x", xs) + " " + detail::describe("y", ys);
    rep.guarded(in, [&] {
      rep.add(in, rank2_generating(p, xs, ys, tau, cfg), rank2_generating_boson(p, xs, ys, tau, cfg));
      const cplx shift{0.0, rng.uniform(-pi, pi)};
      auto xs2 = xs, ys2 = ys;
      for (auto& x : xs2) x += shift;
      for (auto& y : ys2) y += shift;
      rep.add(in + " translate=" + fmt(shift), determinant(rank2_generating_matrix(p, xs2, ys2, tau, cfg)),
              determinant(rank2_generating_matrix(p, xs, ys, tau, cfg)));
    });
  }
  return rep.finish();
}

/// Block determinant of D[θ;φ](i, j, x_a - y_b) against the lattice n-point function.
inline IdentityReport check_generalized_trisecant(const std::vector<int>& ms, const std::vector<int>& ns,
                                                  const SamplePlan& plan, const TruncationConfig& cfg) {
  auto shape = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += std::to_string(x);
    return s;
  };
  const std::string name = "generalized_trisecant_m" + shape(ms) + "_n" + shape(ns);
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-7, plan, cfg);
  std::size_t total = 0;
  for (int m : ms) total += static_cast<std::size_t>(m);
  const double sign = detail::sign_of_order(total);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const OrbifoldParams p = rng.params();
    const auto [xs, ys] = rng.point_pairs(tau, ms.size(), ns.size());
    const std::string in = detail::describe(tau) + " " + detail::describe(p) + " " + detail::describe("x", xs) + " " +
                           detail::describe("y", ys);
    rep.guarded(in, [&] {
      const cplx lhs = determinant(trisecant_block_matrix(p.twist(), ms, xs, ns, ys, tau, cfg)) * rank2_partition(p, tau, cfg);
      rep.add(in, lhs, sign * lattice_npoint(p, ms, xs, ns, ys, tau, cfg));
    });
  }
  return rep.finish();
}

/// Rank-two a-state determinant at θ = -1 against the square of the rank-one
/// Pfaffian: φ = -1 pairs with g = σ, φ = 1 with the σ-twisted module.
inline std::vector<IdentityReport> check_rank1_square(const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "rank1_square";
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-9, plan, cfg);
  ReportBuilder odd("rank1_square_odd", 1e-12, plan, cfg);
  const std::vector<std::pair<OrbifoldParams, std::string>> cases{{{0.5, 0.5}, "theta=-1 phi=-1"}, {{0.5, 0.0}, "theta=-1 phi=1"}};
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    for (const auto& [p, label] : cases) {
      for (std::size_t n : {std::size_t{2}, std::size_t{4}, std::size_t{3}}) {
        const auto zs = rng.points(tau, n, -0.9, -0.1);
        const std::string in = detail::describe(tau) + " " + label + " " + detail::describe("z", zs);
        const std::vector<FockLabelRank2> labels(n, FockLabelRank2({1}, {1}));
        auto& target = n % 2 == 1 ? odd : rep;
        target.guarded(in, [&] {
          const cplx det = determinant(rank2_fock_matrix(labels, zs, p.twist(), tau, cfg));
          if (n % 2 == 1) {
            odd.add(in + " det M", det, 0.0);
            return;
          }
          cplx pf;
          if (p.beta != 0.0) {
            pf = rank1_generating(GSelector::Sigma, zs, tau, cfg) / rank1_partition(GSelector::Sigma, tau, cfg);
          } else {
            const cplx norm = dedekind_eta(TauPoint(2.0 * tau.value()), cfg) / dedekind_eta(tau, cfg);
            pf = rank1_sigma_twisted_generating(zs, tau, cfg) / norm;
          }
          rep.add(in, det, pf * pf);
        });
      }
    }
    for (const auto& [p, label] : cases) {
      const std::string in = detail::describe(tau) + " " + label;
      odd.guarded(in, [&] { odd.add(in + " E1", twisted_eisenstein(1, p.twist(), tau, cfg), 0.0); });
    }
  }
  return {rep.finish(), odd.finish()};
}

/// Partition covariance with multipliers ε_γ, weight-n covariance of the
/// generating function for both twist classes, and the weight-1 a-state.
inline IdentityReport check_modular_correlators(const SamplePlan& plan, const TruncationConfig& cfg) {
  const std::string name = "modular_correlators";
  Sampler rng(plan, name);
  ReportBuilder rep(name, 1e-8, plan, cfg);
  const std::vector<std::pair<std::string, GroupElement>> gammas{
      {"S", GroupElement::S()}, {"T", GroupElement::T()}, {"ST", GroupElement::S() * GroupElement::T()},
      {"T^-1", GroupElement::T().inverse()}};
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const OrbifoldParams p = rng.params();
    for (const auto& [gname, g] : gammas) {
      const std::string in = detail::describe(tau) + " " + detail::describe(p) + " gamma=" + gname;
      rep.guarded(in, [&] {
        const auto [eps, gp] = modular_multiplier(g, p);
        const auto [unused, gtau] = gamma_act_point(g, 0.0, tau);
        const cplx j = g.automorphy(tau.value());
        rep.add(in + " Z", rank2_partition(gp, gtau, cfg), eps * rank2_partition(p, tau, cfg));
        for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
          std::vector<cplx> xs, ys, gxs, gys;
          // transformed differences must stay clear of the q-series boundary lines
          for (int attempt = 0;; ++attempt) {
            std::tie(xs, ys) = rng.point_pairs(tau, n, n);
            gxs.clear();
            gys.clear();
            for (const auto& x : xs) gxs.push_back(gamma_act_point(g, x, tau).first);
            for (const auto& y : ys) gys.push_back(gamma_act_point(g, y, tau).first);
            bool ok = true;
            for (const auto& gx : gxs)
              for (const auto& gy : gys) ok = ok && Sampler::off_boundary(gx - gy, gtau, 0.05);
            if (ok) break;
            if (attempt == 100) throw Error(ErrorKind::Domain, "sampler: no transformed points off the boundary lines");
          }
          const std::string pin = in + " " + detail::describe("x", xs) + " " + detail::describe("y", ys);
          const cplx w = std::pow(j, static_cast<double>(n));
          rep.add(pin + " G", rank2_generating(gp, gxs, gys, gtau, cfg), w * eps * rank2_generating(p, xs, ys, tau, cfg));
          const OrbifoldParams triv{0.0, 0.0};
          const auto [eps0, gtriv] = modular_multiplier(g, triv);
          rep.add(pin + " G trivial", rank2_generating(gtriv, gxs, gys, gtau, cfg),
                  w * eps0 * rank2_generating(triv, xs, ys, tau, cfg));
        }
        const std::vector<FockLabelRank2> a_state{FockLabelRank2({1}, {1})};
        const cplx z0{0.0, 0.0};
        rep.add(in + " a-state", rank2_fock_npoint(a_state, {z0}, gp, gtau, cfg),
                j * eps * rank2_fock_npoint(a_state, {z0}, p, tau, cfg));
      });
    }
  }
  return rep.finish();
}

/// Algebraic structure of the correlator kernels: Pf² = det, antisymmetry and
/// odd vanishing of the rank-one generating function, and expansion of Pf(P)
/// along its first row.
inline std::vector<IdentityReport> check_correlator_structure(const SamplePlan& plan, const TruncationConfig& cfg) {
  Sampler rng(plan, "correlator_structure");
  ReportBuilder square("pfaffian_square", 1e-10, plan, cfg);
  ReportBuilder anti("rank1_antisymmetry", 1e-12, plan, cfg);
  ReportBuilder zhu("pfaffian_row_expansion", 1e-12, plan, cfg);
  for (int i = 0; i < plan.count; ++i) {
    const TauPoint tau = rng.tau();
    const GSelector g = i % 2 == 0 ? GSelector::Identity : GSelector::Sigma;
    const TwistPair tw = rank1_twist(g);
    for (std::size_t n : {std::size_t{2}, std::size_t{4}, std::size_t{6}}) {
      const auto zs = rng.points(tau, n, -0.9, -0.1);
      const std::string in = detail::describe(tau) + (g == GSelector::Identity ? " g=1 " : " g=sigma ") + detail::describe("z", zs);
      square.guarded(in, [&] {
        const ComplexMatrix m = detail::p1_skew_matrix(tw, zs, tau, cfg);
        const cplx pf = pfaffian(m, cfg.tol);
        square.add(in + " P", pf * pf, determinant(m));
        if (n >= 4) {
          // first-row expansion against the elimination kernel
          cplx sum = 0.0;
          for (std::size_t r = 1; r < n; ++r) {
            const ComplexMatrix minor = m.minor(r, r).minor(0, 0);
            const double sign = (r % 2 == 1) ? 1.0 : -1.0;
            sum += sign * m(0, r) * pfaffian(minor, cfg.tol);
          }
          zhu.add(in, detail::pfaffian_elimination(m), sum);
        }
      });
      anti.guarded(in, [&] {
        const cplx base = rank1_generating(g, zs, tau, cfg);
        for (std::size_t s = 0; s + 1 < n; ++s) {
          auto swapped = zs;
          std::swap(swapped[s], swapped[s + 1]);
          anti.add(in + " swap=" + std::to_string(s), rank1_generating(g, swapped, tau, cfg), -base);
        }
        std::vector<cplx> odd_points(zs.begin(), zs.end() - 1);
        anti.add(in + " odd n", rank1_generating(g, odd_points, tau, cfg), 0.0);
      });
    }
    // random complex skew matrices of every even size up to 12
    for (std::size_t n = 2; n <= 12; n += 2) {
      ComplexMatrix m(n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) {
          m(r, c) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
          m(c, r) = -m(r, c);
        }
      const cplx pf = pfaffian(m, cfg.tol);
      const cplx det = determinant(m);
      square.add("random skew dim=" + std::to_string(n), pf * pf, det);
    }
    // rank-two generating function is alternating in the x's
    const OrbifoldParams p = rng.params();
    const auto [xs, ys] = rng.point_pairs(tau, 3, 3);
    const std::string in = detail::describe(tau) + " " + detail::describe(p) + " " + detail::describe("x", xs);
    anti.guarded(in, [&] {
      auto swapped = xs;
      std::swap(swapped[0], swapped[2]);
      anti.add(in + " rank2 swap x0 x2", rank2_generating(p, swapped, ys, tau, cfg), -rank2_generating(p, xs, ys, tau, cfg));
    });
  }
  return {square.finish(), anti.finish(), zhu.finish()};
}

// ---------------------------------------------------------------------------
// Suite registry

struct SuiteEntry {
  std::string name;
  std::function<std::vector<IdentityReport>(const SamplePlan&, const TruncationConfig&)> run;
};

/// All suites in their fixed execution order. `n` selects the size for
/// suites that take one (Fay, K-secant); 0 means the default sizes.
inline std::vector<SuiteEntry> suite_registry(int n = 0) {
  auto one = [](auto f) {
    return [f](const SamplePlan& p, const TruncationConfig& c) { return std::vector<IdentityReport>{f(p, c)}; };
  };
  auto sizes = [n](std::vector<int> defaults) { return n > 0 ? std::vector<int>{n} : defaults; };
  std::vector<SuiteEntry> reg;
  reg.push_back({"doublesum", [sizes](const SamplePlan& p, const TruncationConfig& c) {
                   std::vector<IdentityReport> out;
                   for (int k : sizes({1, 2, 3})) out.push_back(check_doublesum(k, p, c));
                   return out;
                 }});
  reg.push_back({"eisenstein_lattice", [sizes](const SamplePlan& p, const TruncationConfig& c) {
                   std::vector<IdentityReport> out;
                   for (int k : sizes({1, 2, 3})) out.push_back(check_eisenstein_lattice(k, p, c));
                   return out;
                 }});
  reg.push_back({"laurent", one([](const SamplePlan& p, const TruncationConfig& c) { return check_laurent(p, c); })});
  reg.push_back({"periodicity", check_periodicity});
  reg.push_back({"modular_twisted", check_modular_twisted});
  reg.push_back({"jacobi_triple_product",
                 one([](const SamplePlan& p, const TruncationConfig& c) { return check_jacobi_triple_product(p, c); })});
  reg.push_back({"fay_trisecant", [sizes](const SamplePlan& p, const TruncationConfig& c) {
                   std::vector<IdentityReport> out;
                   for (int k : sizes({1, 2, 3})) out.push_back(check_fay_trisecant(k, p, c));
                   return out;
                 }});
  reg.push_back({"k_secant", [sizes](const SamplePlan& p, const TruncationConfig& c) {
                   std::vector<IdentityReport> out;
                   for (int k : sizes({1, 2})) out.push_back(check_k_secant(k, p, c));
                   return out;
                 }});
  reg.push_back({"generalized_trisecant", [](const SamplePlan& p, const TruncationConfig& c) {
                   return std::vector<IdentityReport>{check_generalized_trisecant({1}, {1}, p, c),
                                                      check_generalized_trisecant({2}, {2}, p, c),
                                                      check_generalized_trisecant({2, 1}, {1, 2}, p, c)};
                 }});
  reg.push_back({"rank1_square", check_rank1_square});
  reg.push_back({"modular_correlators",
                 one([](const SamplePlan& p, const TruncationConfig& c) { return check_modular_correlators(p, c); })});
  reg.push_back({"correlator_structure", check_correlator_structure});
  return reg;
}

/// Runs the selected suites (all when `names` is empty) and concatenates
/// their reports in registry order. With `parallel`, suites run on separate
/// threads; results are identical either way.
inline std::vector<IdentityReport> run_suites(const std::vector<std::string>& names, const SamplePlan& plan,
                                              const TruncationConfig& cfg, int n = 0, bool parallel = false) {
  plan.validate();
  cfg.validate();
  std::vector<SuiteEntry> chosen;
  for (auto& entry : suite_registry(n)) {
    bool want = names.empty();
    for (const auto& s : names) want = want || s == entry.name || s == "all";
    if (want) chosen.push_back(std::move(entry));
  }
  for (const auto& s : names) {
    bool known = s == "all";
    for (const auto& entry : suite_registry(n)) known = known || entry.name == s;
    if (!known) throw Error(ErrorKind::Parse, "unknown suite '" + s + "'");
  }
  std::vector<IdentityReport> out;
  if (parallel) {
    std::vector<std::future<std::vector<IdentityReport>>> jobs;
    for (const auto& entry : chosen) jobs.push_back(std::async(std::launch::async, entry.run, plan, cfg));
    for (auto& j : jobs)
      for (auto& r : j.get()) out.push_back(std::move(r));
  } else {
    for (const auto& entry : chosen)
      for (auto& r : entry.run(plan, cfg)) out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<IdentityReport> run_all(const SamplePlan& plan, const TruncationConfig& cfg, bool parallel = false) {
  return run_suites({}, plan, cfg, 0, parallel);
}

}  // namespace twisted
