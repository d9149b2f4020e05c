#include <gtest/gtest.h>

#include "cli_registry.hpp"

using namespace twisted;
using namespace twisted::cli;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Domain;
}

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
  EXPECT_EQ(parse_complex("2.5i"), cplx(0.0, 2.5));
  EXPECT_EQ(parse_complex("0.3+1.2i"), cplx(0.3, 1.2));
  EXPECT_EQ(parse_complex("0.3-i"), cplx(0.3, -1.0));
  EXPECT_EQ(parse_complex("-4"), cplx(-4.0, 0.0));
  EXPECT_EQ(parse_complex("1e-3+2E+1i"), cplx(1e-3, 20.0));
  EXPECT_EQ(parse_complex(" 1 + 2i "), cplx(1.0, 2.0));
  EXPECT_EQ(kind_of([] { parse_complex("abc"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_complex(""); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_real("1+i"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_int("2.5"); }), ErrorKind::Parse);
}

TEST(ParseLists, Forms) {
  EXPECT_EQ(parse_complex_list("[1,2i,-1-i]"), (std::vector<cplx>{1.0, cplx(0, 2), cplx(-1, -1)}));
  EXPECT_EQ(parse_complex_list("3,4").size(), 2u);
  EXPECT_EQ(parse_int_list("[1,2,5]"), (std::vector<int>{1, 2, 5}));
  const auto r1 = parse_labels_rank1("1,2;3");
  ASSERT_EQ(r1.size(), 2u);
  EXPECT_EQ(r1[0].ks(), (std::vector<int>{1, 2}));
  const auto r2 = parse_labels_rank2("1,2/1;/2");
  ASSERT_EQ(r2.size(), 2u);
  EXPECT_TRUE(r2[1].ks().empty());
  EXPECT_EQ(r2[1].ls(), (std::vector<int>{2}));
  EXPECT_EQ(kind_of([] { parse_labels_rank2("1,2"); }), ErrorKind::Parse);
}

TEST(Args, AliasesAndDuplicates) {
  const Args a = Args::parse({"τ=i", "λ=0.25", "n=1"});
  EXPECT_EQ(a.raw("tau"), "i");
  EXPECT_EQ(a.real("lambda"), 0.25);
  EXPECT_EQ(kind_of([] { Args::parse({"n=1", "n=2"}); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { Args::parse({"novalue"}); }), ErrorKind::Parse);
}

TEST(Registry, ArityChecks) {
  const Args ok = Args::parse({"n=1", "lambda=0.25"});
  const auto& spec = lookup("bernoulli_poly", ok);
  EXPECT_EQ(spec.eval(ok, {}).value, cplx(-0.25));
  EXPECT_EQ(kind_of([] { lookup("bernoulli_poly", Args::parse({"n=1"})); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { lookup("bernoulli_poly", Args::parse({"n=1", "lambda=0", "x=2"})); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { lookup("nonexistent", Args::parse({})); }), ErrorKind::Parse);
}

TEST(Registry, EveryEntryEvaluates) {
  const std::map<std::string, std::string> sample{
      {"n", "2"}, {"k", "2"}, {"l", "1"}, {"lambda", "0.3"}, {"mu", "0.2"}, {"z", "-1.5+0.2i"}, {"s", "0.5"},
      {"tau", "0.1+1.1i"}, {"a", "0.3"}, {"b", "0.6"}, {"g", "sigma"}, {"zs", "[-0.5,-2.5+0.3i]"},
      {"labels", "1;1"}, {"alpha", "0.3"}, {"beta", "0.6"}, {"xs", "[-0.5]"}, {"ys", "[-3+0.4i]"}, {"ms", "[1]"},
      {"ns", "[1]"}, {"m", "[0,1,-1,0]"}, {"c", "1"}, {"d", "0"}};
  for (const auto& [name, spec] : registry()) {
    std::vector<std::string> tokens;
    for (const auto& p : spec.params) {
      std::string v = sample.at(p);
      if (name == "modular_multiplier" && p == "a") v = "0";
      if (name == "modular_multiplier" && p == "b") v = "-1";
      if (name == "rank2_fock_npoint" && p == "labels") v = "1/1;1/1";
      if (name == "rank1_fock_npoint" && p == "g") v = "identity";
      if (name == "binomial" && p == "n") v = "4";
      tokens.push_back(p + "=" + v);
    }
    const Args args = Args::parse(tokens);
    const cplx v = lookup(name, args).eval(args, {}).value;
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag())) << name;
  }
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code(ErrorKind::Parse), 1);
  EXPECT_EQ(exit_code(ErrorKind::Domain), 2);
  EXPECT_EQ(exit_code(ErrorKind::NearPole), 2);
  EXPECT_EQ(exit_code(ErrorKind::Balance), 2);
  EXPECT_EQ(exit_code(ErrorKind::NotConverged), 3);
}
