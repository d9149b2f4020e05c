#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twisted/classical.hpp"
#include "twisted/twisted_functions.hpp"

using namespace twisted;

namespace {

const cplx I(0.0, 1.0);

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Parse;
}

}  // namespace

TEST(TauPoint, RejectsLowerHalfPlane) {
  EXPECT_EQ(kind_of([] { TauPoint t(cplx(0.3, -1.0)); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { TauPoint t(cplx(0.3, 0.0)); }), ErrorKind::Domain);
  EXPECT_NEAR(TauPoint(I).strip_width(), 2.0 * pi, 1e-15);
}

TEST(Eisenstein, OddVanishes) {
  EXPECT_EQ(eisenstein(3, TauPoint(cplx(0.2, 1.1))), cplx(0.0));
  EXPECT_EQ(eisenstein(7, TauPoint(I)), cplx(0.0));
}

TEST(Eisenstein, CuspLimit) {
  const TauPoint far(cplx(0.1, 12.0));
  EXPECT_LT(std::abs(eisenstein(2, far) + 1.0 / 12.0), 1e-14);
  EXPECT_LT(std::abs(eisenstein(4, far) - oracle::bernoulli_poly(4, 0.0) / -24.0), 1e-14);
}

TEST(Eisenstein, MatchesDivisorSums) {
  for (cplx t : {I, cplx(0.31, 0.9), cplx(-0.45, 1.7)})
    for (int n : {2, 4, 6, 8, 10})
      EXPECT_LT(oracle::rel(eisenstein(n, TauPoint(t)), oracle::eisenstein_divisor(n, t)), 1e-12) << n << " " << t;
}

TEST(Eisenstein, ModularWeight) {
  for (cplx t : {I, cplx(0.2, 1.3), cplx(-0.35, 0.95)}) {
    const TauPoint tau(t), s(-1.0 / t);
    EXPECT_LT(oracle::rel(eisenstein(4, s), std::pow(t, 4) * eisenstein(4, tau)), 1e-12);
    EXPECT_LT(oracle::rel(eisenstein(6, s), std::pow(t, 6) * eisenstein(6, tau)), 1e-12);
    EXPECT_LT(oracle::rel(eisenstein(2, s), t * t * eisenstein(2, tau) - t / (2.0 * pi * I)), 1e-12);
  }
}

TEST(Eisenstein, NotConvergedWhenTruncationTooShort) {
  TruncationConfig cfg;
  cfg.q_order = 3;
  EXPECT_EQ(kind_of([&] { eisenstein(4, TauPoint(cplx(0.0, 0.3)), cfg); }), ErrorKind::NotConverged);
}

TEST(Theta, MatchesDirectSum) {
  for (cplx t : {I, cplx(0.3, 0.8)})
    for (auto [a, b] : {std::pair{0.5, 0.5}, {0.0, 0.0}, {0.2, 0.7}, {-0.3, 0.45}})
      for (cplx z : {cplx(0.0), cplx(-1.3, 0.4), cplx(2.5, -3.0)}) {
        const cplx got = theta_char({a, b}, z, TauPoint(t));
        EXPECT_LT(oracle::rel(got, oracle::theta(a, b, z, t)), 1e-12) << a << " " << b << " " << z;
      }
}

TEST(Theta, OddCharacteristicVanishesAtOrigin) {
  EXPECT_LT(std::abs(theta_char({0.5, 0.5}, 0.0, TauPoint(I))), 1e-15);
  EXPECT_LT(std::abs(theta_char({0.5, 0.5}, 0.0, TauPoint(cplx(0.4, 0.7)))), 1e-14);
}

TEST(Theta, Periods) {
  const TauPoint tau(cplx(0.17, 1.05));
  const cplx t = tau.value();
  const double a = 0.3, b = -0.2;
  for (cplx z : {cplx(-0.7, 0.2), cplx(1.1, -2.0)}) {
    const cplx th = theta_char({a, b}, z, tau);
    EXPECT_LT(oracle::rel(theta_char({a, b}, z + 2.0 * pi * I, tau), std::exp(2.0 * pi * I * a) * th), 1e-12);
    const cplx factor = std::exp(-I * pi * t - z - 2.0 * pi * I * b);
    EXPECT_LT(oracle::rel(theta_char({a, b}, z + 2.0 * pi * I * t, tau), factor * th), 1e-12);
  }
}

TEST(Theta, SModularity) {
  // θ[a;b](-z/τ,-1/τ) = (-iτ)^{1/2} e^{2πiab} e^{-iz²/4πτ} θ[-b;a](z,τ), with z in 2πi units
  const cplx t(0.21, 1.2);
  const double a = 0.35, b = 0.15;
  for (cplx z : {cplx(-0.5, 0.3), cplx(0.8, 1.1)}) {
    const cplx lhs = theta_char({a, b}, -z / t, TauPoint(-1.0 / t));
    const cplx rhs = std::sqrt(-I * t) * std::exp(2.0 * pi * I * a * b) * std::exp(z * z / (4.0 * pi * I * t)) *
                     theta_char({-b, a}, z, TauPoint(t));
    EXPECT_LT(oracle::rel(lhs, rhs), 1e-12) << z;
  }
}

TEST(Theta, DerivativeMatchesFiniteDifference) {
  const TauPoint tau(cplx(-0.1, 0.9));
  const ThetaChar ch{0.25, 0.6};
  const cplx z(-0.4, 0.7);
  const cplx fd = oracle::derivative([&](cplx w) { return theta_char(ch, w, tau); }, z);
  EXPECT_LT(oracle::rel(theta_char_dz(ch, z, tau), fd), 1e-9);
}

TEST(Eta, Values) {
  EXPECT_LT(std::abs(dedekind_eta(TauPoint(cplx(0.0, 15.0))) / std::exp(-2.0 * pi * 15.0 / 24.0) - 1.0), 1e-15);
  const cplx e = dedekind_eta(TauPoint(I));
  EXPECT_GT(e.real(), 0.0);
  EXPECT_LT(std::abs(e.imag()), 1e-16);
  // η(i) = Γ(1/4) / (2 π^{3/4})
  EXPECT_NEAR(e.real(), std::tgamma(0.25) / (2.0 * std::pow(pi, 0.75)), 1e-14);
  for (cplx t : {cplx(0.3, 0.6), cplx(-0.2, 1.4)}) EXPECT_LT(oracle::rel(dedekind_eta(TauPoint(t)), oracle::eta(t)), 1e-13);
}

TEST(Eta, CubeIsThetaDerivative) {
  for (cplx t : {I, cplx(0.25, 0.8)}) {
    const TauPoint tau(t);
    const cplx eta = dedekind_eta(tau);
    const cplx fd = oracle::derivative([&](cplx w) { return theta_char({0.5, 0.5}, w, tau); }, 0.0);
    // K = (-i/η³)θ[½;½] has unit slope at 0, so θ'(0) = iη³
    EXPECT_LT(oracle::rel(eta * eta * eta, -I * fd), 1e-9);
  }
}

TEST(WeierstrassP, SmallZExpansion) {
  const TauPoint tau(cplx(0.1, 1.0));
  const cplx z(-0.3, 0.1);
  // P_1 = 1/z - Σ_{k≥1} E_{2k} z^{2k-1}
  cplx series = 1.0 / z;
  for (int k = 2; k <= 16; k += 2) series -= eisenstein(k, tau) * std::pow(z, k - 1);
  EXPECT_LT(std::abs(weierstrass_pk(1, z, tau) - series), 1e-12);
}

TEST(WeierstrassP, Periods) {
  const TauPoint tau(cplx(-0.2, 1.1));
  const cplx t = tau.value();
  const cplx z(-2.0, 0.7);
  for (int k = 1; k <= 4; ++k)
    EXPECT_LT(oracle::rel(weierstrass_pk(k, z + 2.0 * pi * I, tau), weierstrass_pk(k, z, tau)), 1e-12);
  EXPECT_LT(oracle::rel(weierstrass_pk_continued(1, z + 2.0 * pi * I * t, tau), weierstrass_pk(1, z, tau) - 1.0), 1e-12);
  EXPECT_LT(oracle::rel(weierstrass_pk_continued(2, z + 2.0 * pi * I * t, tau), weierstrass_pk(2, z, tau)), 1e-12);
}

TEST(WeierstrassP, HigherKAreDerivatives) {
  // P_{k+1} = -(1/k) d/dz P_k
  const TauPoint tau(cplx(0.3, 0.9));
  const cplx z(-2.2, 0.4);
  for (int k = 1; k <= 3; ++k) {
    const cplx fd = oracle::derivative([&](cplx w) { return weierstrass_pk(k, w, tau); }, z);
    EXPECT_LT(oracle::rel(weierstrass_pk(k + 1, z, tau), -fd / static_cast<double>(k)), 1e-8) << k;
  }
}

TEST(WeierstrassP, DomainError) {
  const TauPoint tau(I);
  EXPECT_EQ(kind_of([&] { weierstrass_pk(1, cplx(0.5, 0.0), tau); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { weierstrass_pk(1, cplx(-7.0, 0.0), tau); }), ErrorKind::Domain);
}

TEST(P0, Values) {
  const TauPoint tau(cplx(0.05, 1.2));
  const cplx z(0.02, -0.01);
  EXPECT_LT(std::abs(p0(z, tau) + std::log(z)), 1e-3);
  const cplx w(-0.6, 0.9);
  const cplx fd = oracle::derivative([&](cplx u) { return p0(u, tau); }, w);
  EXPECT_LT(oracle::rel(fd, -weierstrass_pk(1, w, tau)), 1e-9);
  EXPECT_LT(oracle::rel(std::exp(-p0(w, tau)), prime_form(w, tau)), 1e-15);
  EXPECT_EQ(kind_of([&] { p0(0.0, tau); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { p0(cplx(7.0, 0.0), tau); }), ErrorKind::Domain);
}

TEST(PrimeForm, Properties) {
  const TauPoint tau(cplx(0.15, 0.95));
  const cplx t = tau.value();
  const cplx small(1e-5, 2e-5);
  EXPECT_LT(std::abs(prime_form_theta(small, tau) / small - 1.0), 1e-8);
  const cplx z(-0.9, 0.4);
  EXPECT_LT(oracle::rel(prime_form_theta(z, tau), prime_form(z, tau)), 1e-12);
  const cplx k = prime_form_theta(z, tau);
  EXPECT_LT(oracle::rel(prime_form_theta(z + 2.0 * pi * I, tau), -k), 1e-12);
  const cplx factor = -std::exp(-z) * std::exp(-pi * I * t);
  EXPECT_LT(oracle::rel(prime_form_theta(z + 2.0 * pi * I * t, tau), factor * k), 1e-12);
}
