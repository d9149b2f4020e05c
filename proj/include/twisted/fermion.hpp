#pragma once

// Free-fermion torus correlators: rank-one Pfaffians, the σ-twisted sector,
// rank-two determinants, bosonized theta/prime-form forms and modular
// multipliers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "twisted/classical.hpp"
#include "twisted/error.hpp"
#include "twisted/numeric.hpp"
#include "twisted/twisted_functions.hpp"

namespace twisted {

namespace detail {

inline void require_increasing(const std::vector<int>& ks, const char* what) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw Error(ErrorKind::Domain, std::string(what) + ": mode indices must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1])
      throw Error(ErrorKind::Domain, std::string(what) + ": mode indices must be strictly increasing");
  }
}

}  // namespace detail

/// Rank-one Fock label Ψ[-k_1, ..., -k_m].
class FockLabelRank1 {
 public:
  explicit FockLabelRank1(std::vector<int> ks) : ks_(std::move(ks)) { detail::require_increasing(ks_, "FockLabelRank1"); }
  const std::vector<int>& ks() const noexcept { return ks_; }
  std::size_t size() const noexcept { return ks_.size(); }

 private:
  std::vector<int> ks_;
};

/// Rank-two Fock label: ψ⁺ modes ks and ψ⁻ modes ls.
class FockLabelRank2 {
 public:
  FockLabelRank2(std::vector<int> ks, std::vector<int> ls) : ks_(std::move(ks)), ls_(std::move(ls)) {
    detail::require_increasing(ks_, "FockLabelRank2");
    detail::require_increasing(ls_, "FockLabelRank2");
  }
  const std::vector<int>& ks() const noexcept { return ks_; }
  const std::vector<int>& ls() const noexcept { return ls_; }

 private:
  std::vector<int> ks_;
  std::vector<int> ls_;
};

/// Rank-two orbifold parameters. θ = e^{-2πiα}, φ = e^{-2πiβ}, κ = β + ½.
struct OrbifoldParams {
  double alpha = 0.0;
  double beta = 0.0;

  cplx theta() const { return std::exp(cplx(0.0, -2.0 * pi * alpha)); }
  cplx phi() const { return std::exp(cplx(0.0, -2.0 * pi * beta)); }
  double kappa() const noexcept { return beta + 0.5; }
  TwistPair twist() const { return {alpha, -beta}; }
  bool is_trivial_twist() const { return twist().is_trivial(); }
};

/// Rank-one supertrace insertion g.
enum class GSelector { Identity, Sigma };

/// (θ,φ) for the rank-one theory: φ = -1 always, θ = 1 or -1.
inline TwistPair rank1_twist(GSelector g) { return {g == GSelector::Identity ? 0.0 : 0.5, 0.5}; }

namespace detail {

inline void require_distinct(const std::vector<cplx>& zs, const char* who) {
  for (std::size_t i = 0; i < zs.size(); ++i)
    for (std::size_t j = i + 1; j < zs.size(); ++j)
      if (zs[i] == zs[j]) throw Error(ErrorKind::Domain, std::string(who) + ": insertion points must be distinct");
}

// Skew matrix P(i,j) = P_1[tw](z_i - z_j), zero diagonal.
inline ComplexMatrix p1_skew_matrix(const TwistPair& tw, const std::vector<cplx>& zs, const TauPoint& tau,
                                    const TruncationConfig& cfg) {
  const std::size_t n = zs.size();
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) m(i, j) = twisted_pk_continued(1, tw, zs[i] - zs[j], tau, cfg);
  return m;
}

// Permutation parity of `perm` (a rearrangement of 0..n-1).
inline int permutation_sign(std::vector<std::size_t> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    while (perm[i] != i) {
      std::swap(perm[i], perm[perm[i]]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rank one

/// Z_V(g,τ): η(τ/2)/η(τ) for g = 1, η(τ)²/(η(2τ)η(τ/2)) for g = σ.
inline cplx rank1_partition(GSelector g, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx t = tau.value();
  const cplx eta1 = dedekind_eta(tau, cfg);
  const cplx eta_half = dedekind_eta(TauPoint(t / 2.0), cfg);
  if (g == GSelector::Identity) return eta_half / eta1;
  return eta1 * eta1 / (dedekind_eta(TauPoint(2.0 * t), cfg) * eta_half);
}

/// q^{-1/48} Π_{n≥1} (1 ∓ q^{n-½}), - for g = 1 and + for g = σ.
inline cplx rank1_partition_product(GSelector g, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const double sign = g == GSelector::Identity ? -1.0 : 1.0;
  cplx prod = tau.q_pow(-1.0 / 48.0);
  for (int n = 1; n <= cfg.q_order; ++n) {
    const cplx qn = tau.q_pow(n - 0.5);
    prod *= 1.0 + sign * qn;
    if (std::abs(qn) < cfg.tol * 1e-4) return prod;
  }
  throw Error(ErrorKind::NotConverged, "rank1_partition_product: q_order too small");
}

/// Generating function G_n(g; z_1..z_n) = Pf(P_1[θ;-1](z_ij)) Z_V(g); zero for odd n.
inline cplx rank1_generating(GSelector g, const std::vector<cplx>& zs, const TauPoint& tau,
                             const TruncationConfig& cfg = {}) {
  detail::require_distinct(zs, "rank1_generating");
  if (zs.size() % 2 == 1) return 0.0;
  const TwistPair tw = rank1_twist(g);
  return pfaffian(detail::p1_skew_matrix(tw, zs, tau, cfg), cfg.tol) * rank1_partition(g, tau, cfg);
}

/// Block matrix of the rank-one Fock n-point function: C blocks on the
/// diagonal, D blocks off it.
inline ComplexMatrix rank1_fock_matrix(const std::vector<FockLabelRank1>& labels, const std::vector<cplx>& zs,
                                       const TwistPair& tw, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (labels.size() != zs.size()) throw Error(ErrorKind::Domain, "rank1_fock: labels and points differ in length");
  struct Slot {
    std::size_t vec;
    int k;
  };
  std::vector<Slot> slots;
  for (std::size_t a = 0; a < labels.size(); ++a)
    for (int k : labels[a].ks()) slots.push_back({a, k});
  ComplexMatrix m(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const Slot& r = slots[i];
      const Slot& c = slots[j];
      m(i, j) = r.vec == c.vec ? coeff_C(r.k, c.k, tw, tau, cfg) : coeff_D(r.k, c.k, tw, zs[r.vec] - zs[c.vec], tau, cfg);
    }
  }
  return m;
}

/// Rank-one Fock n-point function Pf(M) Z_V(g); zero for odd total mode count.
inline cplx rank1_fock_npoint(const std::vector<FockLabelRank1>& labels, const std::vector<cplx>& zs, GSelector g,
                              const TauPoint& tau, const TruncationConfig& cfg = {}) {
  detail::require_distinct(zs, "rank1_fock_npoint");
  std::size_t total = 0;
  for (const auto& l : labels) total += l.size();
  if (total % 2 == 1) return 0.0;
  const ComplexMatrix m = rank1_fock_matrix(labels, zs, rank1_twist(g), tau, cfg);
  return pfaffian(m, cfg.tol) * rank1_partition(g, tau, cfg);
}

/// Generating function on the σ-twisted module: Pf(P_1[-1;1](z_ij)) η(2τ)/η(τ); zero for odd n.
inline cplx rank1_sigma_twisted_generating(const std::vector<cplx>& zs, const TauPoint& tau,
                                           const TruncationConfig& cfg = {}) {
  detail::require_distinct(zs, "rank1_sigma_twisted_generating");
  if (zs.size() % 2 == 1) return 0.0;
  const TwistPair tw(0.5, 0.0);
  const cplx z = dedekind_eta(TauPoint(2.0 * tau.value()), cfg) / dedekind_eta(tau, cfg);
  return pfaffian(detail::p1_skew_matrix(tw, zs, tau, cfg), cfg.tol) * z;
}

// ---------------------------------------------------------------------------
// Rank two

/// Z_{V,h}: q^{κ²/2-1/24} Π_{l≥1} (1 - θ^{-1} q^{l-½-κ})(1 - θ q^{l-½+κ}); exactly 0 for the trivial twist.
inline cplx rank2_partition(const OrbifoldParams& p, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (p.is_trivial_twist()) return 0.0;
  const double kappa = p.kappa();
  const cplx theta = p.theta();
  cplx prod = tau.q_pow(kappa * kappa / 2.0 - 1.0 / 24.0);
  const int cap = cfg.q_order + static_cast<int>(std::ceil(std::abs(kappa)));
  for (int l = 1; l <= cap; ++l) {
    const cplx a = tau.q_pow(l - 0.5 - kappa);
    const cplx b = tau.q_pow(l - 0.5 + kappa);
    prod *= (1.0 - a / theta) * (1.0 - theta * b);
    if (l > kappa && std::abs(a) < cfg.tol * 1e-4 && std::abs(b) < cfg.tol * 1e-4) return prod;
  }
  throw Error(ErrorKind::NotConverged, "rank2_partition: q_order too small");
}

/// e^{2πi(α+½)(β+½)}/η(τ).
inline cplx rank2_prefactor(const OrbifoldParams& p, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  return std::exp(cplx(0.0, 2.0 * pi * (p.alpha + 0.5) * (p.beta + 0.5))) / dedekind_eta(tau, cfg);
}

inline ThetaChar rank2_char(const OrbifoldParams& p) { return {-p.beta + 0.5, p.alpha + 0.5}; }

/// Z_{V,h} from the theta series: e^{2πi(α+½)(β+½)}/η · θ[-β+½; α+½](0,τ).
inline cplx rank2_partition_theta(const OrbifoldParams& p, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  return rank2_prefactor(p, tau, cfg) * theta_char(rank2_char(p), 0.0, tau, cfg);
}

namespace detail {

inline void require_pairs(const std::vector<cplx>& xs, const std::vector<cplx>& ys, const char* who) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::Domain, std::string(who) + ": xs and ys differ in length");
  if (xs.empty()) throw Error(ErrorKind::Domain, std::string(who) + ": need at least one pair");
  require_distinct(xs, who);
  require_distinct(ys, who);
}

}  // namespace detail

/// The determinant matrix of the rank-two generating function: P_1[θ;φ](x_i - y_j)
/// for a nontrivial twist, or the bordered classical matrix Q for the trivial one.
inline ComplexMatrix rank2_generating_matrix(const OrbifoldParams& p, const std::vector<cplx>& xs,
                                             const std::vector<cplx>& ys, const TauPoint& tau,
                                             const TruncationConfig& cfg = {}) {
  detail::require_pairs(xs, ys, "rank2_generating");
  const std::size_t n = xs.size();
  if (!p.is_trivial_twist()) {
    const TwistPair tw = p.twist();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = twisted_pk_continued(1, tw, xs[i] - ys[j], tau, cfg);
    return m;
  }
  ComplexMatrix q(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q(i, j) = weierstrass_pk_continued(1, xs[i] - ys[j], tau, cfg);
    q(i, n) = 1.0;
    q(n, i) = 1.0;
  }
  q(n, n) = 0.0;
  return q;
}

/// Rank-two generating function: det(P) Z_{V,h}, or det(Q) η² for the trivial twist.
inline cplx rank2_generating(const OrbifoldParams& p, const std::vector<cplx>& xs, const std::vector<cplx>& ys,
                             const TauPoint& tau, const TruncationConfig& cfg = {}) {
  const cplx det = determinant(rank2_generating_matrix(p, xs, ys, tau, cfg));
  if (!p.is_trivial_twist()) return det * rank2_partition(p, tau, cfg);
  const cplx eta = dedekind_eta(tau, cfg);
  return det * eta * eta;
}

/// Sign ε relating the insertion order ψ⁺(vector 1)…, ψ⁻(vector 1)…, ψ⁺(vector 2)…
/// to the alternating order ψ⁺ψ⁻ψ⁺ψ⁻….
inline int rank2_fock_sign(const std::vector<FockLabelRank2>& labels) {
  // position of each operator in the alternating order
  std::vector<std::size_t> target;
  std::size_t plus = 0, minus = 0;
  for (const auto& l : labels) {
    for (std::size_t i = 0; i < l.ks().size(); ++i) target.push_back(2 * plus++);
    for (std::size_t i = 0; i < l.ls().size(); ++i) target.push_back(2 * minus++ + 1);
  }
  std::vector<std::size_t> rank(target.size());
  std::vector<std::size_t> order(target.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return target[x] < target[y]; });
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return detail::permutation_sign(rank);
}

/// Block matrix M of the rank-two Fock n-point function: rows are ψ⁺ modes,
/// columns ψ⁻ modes; C blocks within a vector, D blocks between vectors.
inline ComplexMatrix rank2_fock_matrix(const std::vector<FockLabelRank2>& labels, const std::vector<cplx>& zs,
                                       const TwistPair& tw, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  struct Slot {
    std::size_t vec;
    int k;
  };
  std::vector<Slot> rows, cols;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (int k : labels[a].ks()) rows.push_back({a, k});
    for (int l : labels[a].ls()) cols.push_back({a, l});
  }
  if (rows.size() != cols.size()) throw Error(ErrorKind::Domain, "rank2_fock_matrix: unbalanced labels");
  ComplexMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Slot& r = rows[i];
      const Slot& c = cols[j];
      m(i, j) = r.vec == c.vec ? coeff_C(r.k, c.k, tw, tau, cfg) : coeff_D(r.k, c.k, tw, zs[r.vec] - zs[c.vec], tau, cfg);
    }
  }
  return m;
}

/// Rank-two Fock n-point function ε det(M) Z_{V,h}; zero unless Σ(s_a - t_a) = 0.
inline cplx rank2_fock_npoint(const std::vector<FockLabelRank2>& labels, const std::vector<cplx>& zs,
                              const OrbifoldParams& p, const TauPoint& tau, const TruncationConfig& cfg = {}) {
  if (labels.size() != zs.size()) throw Error(ErrorKind::Domain, "rank2_fock_npoint: labels and points differ in length");
  detail::require_distinct(zs, "rank2_fock_npoint");
  if (p.is_trivial_twist())
    throw Error(ErrorKind::UnsupportedTwist, "rank-two Fock correlators need a nontrivial twist");
  long charge = 0;
  for (const auto& l : labels) charge += static_cast<long>(l.ks().size()) - static_cast<long>(l.ls().size());
  if (charge != 0) return 0.0;
  const ComplexMatrix m = rank2_fock_matrix(labels, zs, p.twist(), tau, cfg);
  return static_cast<double>(rank2_fock_sign(labels)) * determinant(m) * rank2_partition(p, tau, cfg);
}

/// Bosonized generating function
/// (-1)^{n(n-1)/2} e^{2πi(α+½)(β+½)}/η θ[-β+½;α+½](Σ(x_i - y_i)) Π_{i<j} K(x_ij) K(y_ij) / Π_{i,j} K(x_i - y_j).
/// The sign puts the result in the same operator order as rank2_generating.
inline cplx rank2_generating_boson(const OrbifoldParams& p, const std::vector<cplx>& xs, const std::vector<cplx>& ys,
                                   const TauPoint& tau, const TruncationConfig& cfg = {}) {
  detail::require_pairs(xs, ys, "rank2_generating_boson");
  const std::size_t n = xs.size();
  cplx shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) shift += xs[i] - ys[i];
  cplx value = rank2_prefactor(p, tau, cfg) * theta_char(rank2_char(p), shift, tau, cfg);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j)
      value *= prime_form_theta(xs[i] - xs[j], tau, cfg) * prime_form_theta(ys[i] - ys[j], tau, cfg);
    for (std::size_t j = 0; j < n; ++j) value /= prime_form_theta(xs[i] - ys[j], tau, cfg);
  }
  return ((n * (n - 1) / 2) % 2 == 1) ? -value : value;
}

/// Block matrix of D[θ;φ](i, j, x_a - y_b), block (a,b) of size m_a × n_b;
/// the determinant side of the generalized trisecant identity.
inline ComplexMatrix trisecant_block_matrix(const TwistPair& tw, const std::vector<int>& ms, const std::vector<cplx>& xs,
                                            const std::vector<int>& ns, const std::vector<cplx>& ys, const TauPoint& tau,
                                            const TruncationConfig& cfg = {}) {
  if (ms.size() != xs.size() || ns.size() != ys.size())
    throw Error(ErrorKind::Domain, "trisecant_block_matrix: charges and points differ in length");
  struct Slot {
    std::size_t point;
    int index;
  };
  std::vector<Slot> rows, cols;
  for (std::size_t a = 0; a < ms.size(); ++a)
    for (int i = 1; i <= ms[a]; ++i) rows.push_back({a, i});
  for (std::size_t b = 0; b < ns.size(); ++b)
    for (int j = 1; j <= ns[b]; ++j) cols.push_back({b, j});
  if (rows.size() != cols.size()) throw Error(ErrorKind::Balance, "trisecant_block_matrix: Σm ≠ Σn");
  ComplexMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      m(r, c) = coeff_D(rows[r].index, cols[c].index, tw, xs[rows[r].point] - ys[cols[c].point], tau, cfg);
  return m;
}

/// General lattice n-point function for charges m_i at x_i and n_j at y_j.
inline cplx lattice_npoint(const OrbifoldParams& p, const std::vector<int>& ms, const std::vector<cplx>& xs,
                           const std::vector<int>& ns, const std::vector<cplx>& ys, const TauPoint& tau,
                           const TruncationConfig& cfg = {}) {
  if (ms.size() != xs.size() || ns.size() != ys.size())
    throw Error(ErrorKind::Domain, "lattice_npoint: charges and points differ in length");
  long sm = 0, sn = 0;
  for (int m : ms) {
    if (m < 1) throw Error(ErrorKind::Domain, "lattice_npoint: charges must be positive");
    sm += m;
  }
  for (int n : ns) {
    if (n < 1) throw Error(ErrorKind::Domain, "lattice_npoint: charges must be positive");
    sn += n;
  }
  if (sm != sn) throw Error(ErrorKind::Balance, "lattice_npoint: Σm = " + std::to_string(sm) + " but Σn = " + std::to_string(sn));
  detail::require_distinct(xs, "lattice_npoint");
  detail::require_distinct(ys, "lattice_npoint");
  cplx shift = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) shift += static_cast<double>(ms[i]) * xs[i];
  for (std::size_t j = 0; j < ys.size(); ++j) shift -= static_cast<double>(ns[j]) * ys[j];
  cplx value = rank2_prefactor(p, tau, cfg) * theta_char(rank2_char(p), shift, tau, cfg);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = i + 1; k < xs.size(); ++k)
      value *= std::pow(prime_form_theta(xs[i] - xs[k], tau, cfg), ms[i] * ms[k]);
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t l = j + 1; l < ys.size(); ++l)
      value *= std::pow(prime_form_theta(ys[j] - ys[l], tau, cfg), ns[j] * ns[l]);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      value /= std::pow(prime_form_theta(xs[i] - ys[j], tau, cfg), ms[i] * ns[j]);
  return value;
}

// ---------------------------------------------------------------------------
// Modular multipliers

/// (α,β) ↦ (aα + bβ, cα + dβ).
inline OrbifoldParams gamma_act_params(const GroupElement& g, const OrbifoldParams& p) {
  return {static_cast<double>(g.a()) * p.alpha + static_cast<double>(g.b()) * p.beta,
          static_cast<double>(g.c()) * p.alpha + static_cast<double>(g.d()) * p.beta};
}

inline cplx multiplier_S(const OrbifoldParams& p) {
  return std::exp(cplx(0.0, 2.0 * pi * (0.5 + p.beta) * (0.5 - p.alpha)));
}

inline cplx multiplier_T(const OrbifoldParams& p) {
  return std::exp(cplx(0.0, pi * (p.beta * (p.beta + 1.0) + 1.0 / 6.0)));
}

/// Word in S, T^{±1} whose product is γ, leftmost letter first.
enum class Generator { S, T, Tinv };

inline std::vector<Generator> decompose(const GroupElement& g) {
  std::vector<Generator> word;
  GroupElement rest = g;
  auto push_t = [&](long k) {
    for (long i = 0; i < std::abs(k); ++i) word.push_back(k > 0 ? Generator::T : Generator::Tinv);
  };
  while (rest.c() != 0) {
    // rest = T^k S rest'' with rest'' = [[-c, -d], [a - kc, b - kd]]
    const long a = rest.a(), b = rest.b(), c = rest.c(), d = rest.d();
    const long k = static_cast<long>(std::floor(static_cast<double>(a) / static_cast<double>(c)));
    push_t(k);
    word.push_back(Generator::S);
    rest = GroupElement(-c, -d, a - k * c, b - k * d);
  }
  if (rest.a() == 1) {
    push_t(rest.b());
  } else {  // -T^{-b} = S² T^{-b}
    word.push_back(Generator::S);
    word.push_back(Generator::S);
    push_t(-rest.b());
  }
  return word;
}

/// Multiplier ε_γ at (α,β) and the transformed parameters γ(α,β). Letters of
/// the word act right to left, each multiplier taken at the current
/// parameters before they are updated.
inline std::pair<cplx, OrbifoldParams> modular_multiplier(const GroupElement& g, const OrbifoldParams& p) {
  const auto word = decompose(g);
  cplx eps = 1.0;
  OrbifoldParams cur = p;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    switch (*it) {
      case Generator::S:
        eps *= multiplier_S(cur);
        cur = gamma_act_params(GroupElement::S(), cur);
        break;
      case Generator::T:
        eps *= multiplier_T(cur);
        cur = gamma_act_params(GroupElement::T(), cur);
        break;
      case Generator::Tinv:
        cur = gamma_act_params(GroupElement::T().inverse(), cur);
        eps /= multiplier_T(cur);
        break;
    }
  }
  return {eps, cur};
}

}  // namespace twisted
