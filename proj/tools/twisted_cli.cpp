#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_registry.hpp"

namespace {

using namespace twisted;
using namespace twisted::cli;

constexpr int kExitVerify = 4;
constexpr int kExitIo = 5;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << "{\"error\": " << detail::json_string(kind) << ", \"message\": " << detail::json_string(message) << "}\n";
}

std::string eval_json(const std::string& function, const EvalResult& r, const TruncationConfig& cfg) {
  std::ostringstream os;
  os << "{\"function\": " << detail::json_string(function) << ", \"re\": " << detail::json_number(r.value.real())
     << ", \"im\": " << detail::json_number(r.value.imag());
  for (const auto& [k, v] : r.extra) os << ", " << detail::json_string(k) << ": " << detail::json_number(v);
  os << ", \"cfg\": " << cfg_json(cfg) << ", \"warnings\": [";
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag())) os << "\"non-finite result\"";
  os << "]}\n";
  return os.str();
}

// ---------------------------------------------------------------- table grid

struct Axis {
  std::string key;
  std::vector<std::string> values;
};

std::string fmt_value(cplx z) { return z.imag() == 0.0 ? fmt(z.real()) : fmt(z); }

// "key=start..stop" (integers) or "key=a:b:count" (linspace, endpoints may be complex).
std::optional<Axis> parse_axis(const std::string& key, const std::string& value) {
  const auto dots = value.find("..");
  if (dots != std::string::npos) {
    const long lo = parse_int(value.substr(0, dots));
    const long hi = parse_int(value.substr(dots + 2));
    Axis ax{key, {}};
    for (long v = lo; v <= hi; ++v) ax.values.push_back(std::to_string(v));
    return ax;
  }
  const auto parts = split(value, ':');
  if (parts.size() == 3) {
    const cplx a = parse_complex(parts[0]);
    const cplx b = parse_complex(parts[1]);
    const long count = parse_int(parts[2]);
    if (count < 0) throw Error(ErrorKind::Parse, "grid count must be >= 0 for '" + key + "'");
    Axis ax{key, {}};
    for (long i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      ax.values.push_back(fmt_value(a + t * (b - a)));
    }
    return ax;
  }
  return std::nullopt;
}

const char* status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotConverged: return "not_converged";
    case ErrorKind::NearPole: return "near_pole";
    case ErrorKind::Parse: return "parse_error";
    default: return "domain_error";
  }
}

int cmd_table(const std::string& function, const std::vector<std::string>& tokens, const TruncationConfig& cfg,
              const std::string& out_path) {
  Args fixed;
  std::vector<Axis> axes;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Parse, "argument '" + tok + "' is not key=value");
    const std::string key = Args::canonical(tok.substr(0, eq));
    const std::string value = tok.substr(eq + 1);
    if (auto ax = parse_axis(key, value)) {
      axes.push_back(std::move(*ax));
    } else {
      fixed.set(key, value);
    }
  }
  if (axes.empty() || axes.size() > 2) throw Error(ErrorKind::Parse, "table needs one or two grid axes");
  for (const auto& ax : axes)
    if (ax.values.empty()) throw Error(ErrorKind::Parse, "grid axis '" + ax.key + "' is empty");

  // validate names and arity once, with the first grid point
  Args probe = fixed;
  for (const auto& ax : axes) probe.set(ax.key, ax.values.front());
  const FunctionSpec& spec = lookup(function, probe);

  std::ostringstream os;
  for (const auto& ax : axes) os << detail::csv_field(ax.key) << ',';
  os << "re,im,status";
  for (const auto& k : fixed.keys()) os << ',' << detail::csv_field(k);
  os << "\r\n";

  const std::size_t n0 = axes[0].values.size();
  const std::size_t n1 = axes.size() > 1 ? axes[1].values.size() : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      Args row = fixed;
      row.set(axes[0].key, axes[0].values[i]);
      if (axes.size() > 1) row.set(axes[1].key, axes[1].values[j]);
      std::string re = "", im = "", status = "ok";
      try {
        const EvalResult r = spec.eval(row, cfg);
        re = fmt(r.value.real());
        im = fmt(r.value.imag());
      } catch (const Error& e) {
        status = status_of(e.kind());
      }
      os << detail::csv_field(axes[0].values[i]) << ',';
      if (axes.size() > 1) os << detail::csv_field(axes[1].values[j]) << ',';
      os << re << ',' << im << ',' << status;
      for (const auto& k : fixed.keys()) os << ',' << detail::csv_field(fixed.raw(k));
      os << "\r\n";
    }
  }

  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + out_path + "' for writing");
    f << os.str();
    if (!f) throw IoError("write to '" + out_path + "' failed");
  }
  return 0;
}

// ---------------------------------------------------------------- verify

void print_summary(std::ostream& os, const std::vector<IdentityReport>& reports) {
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.identity_name.size());
  std::size_t passed = 0;
  char line[256];
  for (const auto& r : reports) {
    std::size_t counted = 0;
    for (const auto& s : r.samples) counted += (s.status == SampleStatus::Ok || s.status == SampleStatus::Error) ? 1 : 0;
    std::snprintf(line, sizeof line, "%-*s  %-4s  max_residual=%-12.3e tol=%-8.1e samples=%zu\n", static_cast<int>(width),
                  r.identity_name.c_str(), r.passed ? "PASS" : "FAIL", r.max_residual, r.tolerance, counted);
    os << line;
    passed += r.passed ? 1 : 0;
  }
  os << passed << "/" << reports.size() << " identities passed\n";
}

int cmd_verify(const std::vector<std::string>& suites_raw, const SamplePlan& plan, const TruncationConfig& cfg, int n,
               const std::string& format, const std::string& out_path, bool parallel) {
  std::vector<std::string> suites;
  for (const auto& s : suites_raw)
    for (const auto& part : split(s, ','))
      if (!part.empty()) suites.push_back(part);
  if (suites.empty()) suites.push_back("all");
  plan.validate();
  cfg.validate();

  const auto reports = run_suites(suites, plan, cfg, n, parallel);

  std::ostringstream body;
  if (format == "csv") {
    write_reports_csv(body, reports);
  } else {
    write_reports_json(body, reports);
  }
  if (out_path.empty()) {
    std::cout << body.str();
    print_summary(std::cerr, reports);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + out_path + "' for writing");
    f << body.str();
    if (!f) throw IoError("write to '" + out_path + "' failed");
    print_summary(std::cout, reports);
  }
  for (const auto& r : reports)
    if (!r.passed) return kExitVerify;
  return 0;
}

// ---------------------------------------------------------------- summary

int cmd_summary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  const auto reports = read_reports_json(f);
  for (const auto& r : reports)
    if (!verdict_consistent(r))
      throw Error(ErrorKind::Parse, "report '" + r.identity_name + "' has a verdict that disagrees with its samples");
  print_summary(std::cout, reports);
  for (const auto& r : reports)
    if (!r.passed) return kExitVerify;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted elliptic functions, fermion correlators and identity checks"};
  app.require_subcommand(1);
  app.fallthrough();

  TruncationConfig cfg;
  app.add_option("--q-order", cfg.q_order, "Highest q power kept in q-series")->capture_default_str();
  app.add_option("--theta-range", cfg.theta_range, "Initial index window for theta sums")->capture_default_str();
  app.add_option("--lattice-range", cfg.lattice_range, "Initial index window for lattice sums")->capture_default_str();
  app.add_option("--tol", cfg.tol, "Target absolute accuracy")->capture_default_str();
  app.add_option("--series-radius", cfg.series_radius, "Contour radius for coefficient extraction")->capture_default_str();

  std::string function;
  std::vector<std::string> eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate one function; arguments are key=value");
  eval->add_option("--function", function, "Function name");
  eval->add_option("args", eval_args, "Function name (unless --function is given) followed by key=value arguments");
  auto* list = app.add_subcommand("list", "List evaluable functions and their parameters");

  std::vector<std::string> suites;
  SamplePlan plan;
  int n_override = 0;
  std::string format = "json";
  std::string out_path;
  bool parallel = false;
  auto* verify = app.add_subcommand("verify", "Run identity checks");
  verify->add_option("--suite", suites, "Suite names, comma separated or repeated; 'all' runs everything");
  verify->add_option("--seed", plan.seed, "Sampling seed")->capture_default_str();
  verify->add_option("--count", plan.count, "Samples per check")->capture_default_str();
  verify->add_option("--n", n_override, "Override the size parameter of sized suites");
  verify->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  verify->add_option("--out", out_path, "Report path (stdout if omitted)");
  verify->add_flag("--parallel", parallel, "Run suites concurrently");

  std::vector<std::string> table_args;
  std::string table_out;
  auto* table = app.add_subcommand("table", "Tabulate a function over a grid, as CSV");
  table->add_option("--function", function, "Function name");
  table->add_option("args", table_args, "Function name then key=value; grid axes as key=a..b or key=start:stop:count");
  table->add_option("--out", table_out, "CSV path (stdout if omitted)");

  std::string summary_path;
  auto* summary = app.add_subcommand("summary", "Re-read a JSON report and print its summary");
  summary->add_option("report", summary_path, "JSON report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("ParseError", e.what());
    return 1;
  }

  // leading positional is the function name when --function is absent
  auto take_function = [&](std::vector<std::string>& args) {
    if (function.empty()) {
      if (args.empty() || args.front().find('=') != std::string::npos)
        throw Error(ErrorKind::Parse, "no function given");
      function = args.front();
      args.erase(args.begin());
    }
  };

  try {
    cfg.validate();
    if (*eval) {
      take_function(eval_args);
      const Args args = Args::parse(eval_args);
      const FunctionSpec& spec = lookup(function, args);
      const EvalResult r = spec.eval(args, cfg);
      std::cout << eval_json(function, r, cfg);
      return 0;
    }
    if (*list) {
      for (const auto& [name, spec] : registry()) {
        std::cout << name;
        for (const auto& p : spec.params) std::cout << ' ' << p;
        std::cout << '\n';
      }
      return 0;
    }
    if (*verify) return cmd_verify(suites, plan, cfg, n_override, format, out_path, parallel);
    if (*table) {
      take_function(table_args);
      return cmd_table(function, table_args, cfg, table_out);
    }
    if (*summary) return cmd_summary(summary_path);
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const IoError& e) {
    print_error("IOError", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    print_error("ParseError", e.what());
    return 1;
  }
  return 1;
}
