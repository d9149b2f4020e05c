#pragma once

// Argument parsing and the function registry behind `twisted_cli eval`.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "twisted/all.hpp"

namespace twisted::cli {

/// Parses "a+bi", "a-bi", "bi", "i", "-i", "2.5i" or a plain real.
inline cplx parse_complex(std::string s) {
  std::string t;
  for (char c : s)
    if (c != ' ') t += c;
  if (t.empty()) throw Error(ErrorKind::Parse, "empty complex value");
  auto number = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad number '" + part + "' in '" + s + "'");
    }
    if (used != part.size()) throw Error(ErrorKind::Parse, "bad number '" + part + "' in '" + s + "'");
    return v;
  };
  if (t.back() != 'i') return {number(t), 0.0};
  t.pop_back();
  // split at the last sign that is not an exponent sign or the leading sign
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(t)};
  return {number(t.substr(0, split)), number(t.substr(split))};
}

inline double parse_real(const std::string& s) {
  const cplx z = parse_complex(s);
  if (z.imag() != 0.0) throw Error(ErrorKind::Parse, "expected a real value, got '" + s + "'");
  return z.real();
}

inline long parse_int(const std::string& s) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw Error(ErrorKind::Parse, "expected an integer, got '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string strip_brackets(std::string s) {
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  return s;
}

/// "[a,b,c]" or "a,b,c".
inline std::vector<cplx> parse_complex_list(const std::string& s) {
  const std::string body = strip_brackets(s);
  if (body.empty()) return {};
  std::vector<cplx> out;
  for (const auto& item : split(body, ',')) out.push_back(parse_complex(item));
  return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  const std::string body = strip_brackets(s);
  if (body.empty()) return {};
  std::vector<int> out;
  for (const auto& item : split(body, ',')) out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

inline GSelector parse_g(const std::string& s) {
  if (s == "1" || s == "identity" || s == "Identity") return GSelector::Identity;
  if (s == "sigma" || s == "Sigma") return GSelector::Sigma;
  throw Error(ErrorKind::Parse, "g must be 'identity' or 'sigma', got '" + s + "'");
}

/// Rank-one labels "1,2;3": vectors separated by ';'.
inline std::vector<FockLabelRank1> parse_labels_rank1(const std::string& s) {
  std::vector<FockLabelRank1> out;
  for (const auto& part : split(s, ';')) out.emplace_back(parse_int_list(part));
  return out;
}

/// Rank-two labels "1,2/1;2/": ψ⁺ modes, '/', ψ⁻ modes; vectors separated by ';'.
inline std::vector<FockLabelRank2> parse_labels_rank2(const std::string& s) {
  std::vector<FockLabelRank2> out;
  for (const auto& part : split(s, ';')) {
    const auto halves = split(part, '/');
    if (halves.size() != 2) throw Error(ErrorKind::Parse, "rank-two label needs the form ks/ls, got '" + part + "'");
    out.emplace_back(parse_int_list(halves[0]), parse_int_list(halves[1]));
  }
  return out;
}

/// key=value arguments, with a few unicode spellings folded to ASCII.
class Args {
 public:
  static std::string canonical(const std::string& key) {
    static const std::map<std::string, std::string> alias{
        {"τ", "tau"}, {"λ", "lambda"}, {"μ", "mu"}, {"α", "alpha"}, {"β", "beta"}, {"lam", "lambda"}};
    const auto it = alias.find(key);
    return it == alias.end() ? key : it->second;
  }

  static Args parse(const std::vector<std::string>& tokens) {
    Args a;
    for (const auto& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Parse, "argument '" + tok + "' is not key=value");
      const std::string key = canonical(tok.substr(0, eq));
      if (a.values_.count(key)) throw Error(ErrorKind::Parse, "argument '" + key + "' given twice");
      a.order_.push_back(key);
      a.values_[key] = tok.substr(eq + 1);
    }
    return a;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::Parse, "missing argument '" + key + "'");
    return it->second;
  }
  void set(const std::string& key, std::string value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = std::move(value);
  }
  const std::vector<std::string>& keys() const noexcept { return order_; }

  double real(const std::string& k) const { return parse_real(raw(k)); }
  cplx complex(const std::string& k) const { return parse_complex(raw(k)); }
  int integer(const std::string& k) const { return static_cast<int>(parse_int(raw(k))); }
  TauPoint tau() const { return TauPoint(complex("tau")); }
  TwistPair twist() const { return {real("mu"), real("lambda")}; }
  OrbifoldParams params() const { return {real("alpha"), real("beta")}; }
  std::vector<cplx> list(const std::string& k) const { return parse_complex_list(raw(k)); }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

struct EvalResult {
  cplx value;
  std::vector<std::pair<std::string, double>> extra;
};

struct FunctionSpec {
  std::vector<std::string> params;
  std::function<EvalResult(const Args&, const TruncationConfig&)> eval;
};

inline ComplexMatrix square_matrix(const std::vector<cplx>& flat) {
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
  if (dim * dim != flat.size()) throw Error(ErrorKind::Parse, "matrix entries must form a square (row-major list)");
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = flat[i * dim + j];
  return m;
}

/// Every function reachable from `eval` and `table`, with its parameter names.
inline const std::map<std::string, FunctionSpec>& registry() {
  static const std::map<std::string, FunctionSpec> reg = [] {
    std::map<std::string, FunctionSpec> r;
    auto val = [](cplx v) { return EvalResult{v, {}}; };
    r["bernoulli_poly"] = {{"n", "lambda"}, [val](const Args& a, const TruncationConfig&) {
                             return val(bernoulli_poly(a.integer("n"), a.real("lambda")));
                           }};
    r["binomial"] = {{"n", "k"}, [val](const Args& a, const TruncationConfig&) {
                       return val(static_cast<double>(binomial(a.integer("n"), a.integer("k"))));
                     }};
    r["q_exp"] = {{"z", "s"}, [val](const Args& a, const TruncationConfig&) { return val(q_exp(a.complex("z"), a.complex("s"))); }};
    r["pfaffian"] = {{"m"}, [val](const Args& a, const TruncationConfig& c) { return val(pfaffian(square_matrix(a.list("m")), c.tol)); }};
    r["determinant"] = {{"m"}, [val](const Args& a, const TruncationConfig&) { return val(determinant(square_matrix(a.list("m")))); }};
    r["eisenstein"] = {{"n", "tau"}, [val](const Args& a, const TruncationConfig& c) { return val(eisenstein(a.integer("n"), a.tau(), c)); }};
    r["weierstrass_pk"] = {{"k", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                             return val(weierstrass_pk(a.integer("k"), a.complex("z"), a.tau(), c));
                           }};
    r["p0"] = {{"z", "tau"}, [val](const Args& a, const TruncationConfig& c) { return val(p0(a.complex("z"), a.tau(), c)); }};
    r["prime_form"] = {{"z", "tau"}, [val](const Args& a, const TruncationConfig& c) { return val(prime_form(a.complex("z"), a.tau(), c)); }};
    r["prime_form_theta"] = {{"z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                               return val(prime_form_theta(a.complex("z"), a.tau(), c));
                             }};
    r["theta_char"] = {{"a", "b", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                         return val(theta_char({a.real("a"), a.real("b")}, a.complex("z"), a.tau(), c));
                       }};
    r["dedekind_eta"] = {{"tau"}, [val](const Args& a, const TruncationConfig& c) { return val(dedekind_eta(a.tau(), c)); }};
    r["twisted_pk"] = {{"k", "mu", "lambda", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                         return val(twisted_pk(a.integer("k"), a.twist(), a.complex("z"), a.tau(), c));
                       }};
    r["twisted_pk_continued"] = {{"k", "mu", "lambda", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                   return val(twisted_pk_continued(a.integer("k"), a.twist(), a.complex("z"), a.tau(), c));
                                 }};
    r["twisted_pk_oracle"] = {{"k", "mu", "lambda", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                return val(twisted_pk_oracle(a.integer("k"), a.twist(), a.complex("z"), a.tau(), c));
                              }};
    r["twisted_eisenstein"] = {{"n", "mu", "lambda", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                 return val(twisted_eisenstein(a.integer("n"), a.twist(), a.tau(), c));
                               }};
    r["twisted_eisenstein_oracle"] = {{"n", "mu", "lambda", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                        return val(twisted_eisenstein_oracle(a.integer("n"), a.twist(), a.tau(), c));
                                      }};
    r["coeff_C"] = {{"k", "l", "mu", "lambda", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                      return val(coeff_C(a.integer("k"), a.integer("l"), a.twist(), a.tau(), c));
                    }};
    r["coeff_D"] = {{"k", "l", "mu", "lambda", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                      return val(coeff_D(a.integer("k"), a.integer("l"), a.twist(), a.complex("z"), a.tau(), c));
                    }};
    r["twisted_p1_theta_form"] = {{"mu", "lambda", "z", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                    return val(twisted_p1_theta_form(a.twist(), a.complex("z"), a.tau(), c));
                                  }};
    r["rank1_partition"] = {{"g", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                              return val(rank1_partition(parse_g(a.raw("g")), a.tau(), c));
                            }};
    r["rank1_generating"] = {{"g", "zs", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                               return val(rank1_generating(parse_g(a.raw("g")), a.list("zs"), a.tau(), c));
                             }};
    r["rank1_fock_npoint"] = {{"labels", "zs", "g", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                return val(rank1_fock_npoint(parse_labels_rank1(a.raw("labels")), a.list("zs"), parse_g(a.raw("g")),
                                                             a.tau(), c));
                              }};
    r["rank1_sigma_twisted_generating"] = {{"zs", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                             return val(rank1_sigma_twisted_generating(a.list("zs"), a.tau(), c));
                                           }};
    r["rank2_partition"] = {{"alpha", "beta", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                              return val(rank2_partition(a.params(), a.tau(), c));
                            }};
    r["rank2_partition_theta"] = {{"alpha", "beta", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                    return val(rank2_partition_theta(a.params(), a.tau(), c));
                                  }};
    r["rank2_generating"] = {{"alpha", "beta", "xs", "ys", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                               return val(rank2_generating(a.params(), a.list("xs"), a.list("ys"), a.tau(), c));
                             }};
    r["rank2_generating_boson"] = {{"alpha", "beta", "xs", "ys", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                     return val(rank2_generating_boson(a.params(), a.list("xs"), a.list("ys"), a.tau(), c));
                                   }};
    r["rank2_fock_npoint"] = {{"labels", "zs", "alpha", "beta", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                                return val(rank2_fock_npoint(parse_labels_rank2(a.raw("labels")), a.list("zs"), a.params(), a.tau(), c));
                              }};
    r["lattice_npoint"] = {{"alpha", "beta", "ms", "xs", "ns", "ys", "tau"}, [val](const Args& a, const TruncationConfig& c) {
                             return val(lattice_npoint(a.params(), parse_int_list(a.raw("ms")), a.list("xs"),
                                                       parse_int_list(a.raw("ns")), a.list("ys"), a.tau(), c));
                           }};
    r["modular_multiplier"] = {{"a", "b", "c", "d", "alpha", "beta"}, [](const Args& a, const TruncationConfig&) {
                                 const GroupElement g(a.integer("a"), a.integer("b"), a.integer("c"), a.integer("d"));
                                 const auto [eps, p] = modular_multiplier(g, a.params());
                                 return EvalResult{eps, {{"alpha", p.alpha}, {"beta", p.beta}}};
                               }};
    return r;
  }();
  return reg;
}

/// Looks up `name` and checks that `args` matches its parameter list exactly.
inline const FunctionSpec& lookup(const std::string& name, const Args& args) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw Error(ErrorKind::Parse, "unknown function '" + name + "'");
  const auto& spec = it->second;
  for (const auto& p : spec.params)
    if (!args.has(p)) throw Error(ErrorKind::Parse, name + ": missing argument '" + p + "'");
  for (const auto& k : args.keys()) {
    bool known = false;
    for (const auto& p : spec.params) known = known || p == k;
    if (!known) throw Error(ErrorKind::Parse, name + ": unexpected argument '" + k + "'");
  }
  return spec;
}

/// Exit code for a library error.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return 1;
    case ErrorKind::NotConverged: return 3;
    default: return 2;
  }
}

}  // namespace twisted::cli
