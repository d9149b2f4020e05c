#pragma once

// JSON and CSV serialization of identity reports. Numbers are written with
// 17 significant digits; non-finite values become JSON null.

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twisted/error.hpp"
#include "twisted/identity_suite.hpp"

namespace twisted {

namespace detail {

inline std::string json_number(double x) { return std::isfinite(x) ? fmt(x) : "null"; }

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

inline std::string json_complex(cplx z) {
  return "{\"re\": " + json_number(z.real()) + ", \"im\": " + json_number(z.imag()) + "}";
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string cfg_json(const TruncationConfig& cfg) {
  return "{\"q_order\": " + std::to_string(cfg.q_order) + ", \"theta_range\": " + std::to_string(cfg.theta_range) +
         ", \"lattice_range\": " + std::to_string(cfg.lattice_range) + ", \"tol\": " + detail::json_number(cfg.tol) +
         ", \"series_radius\": " + detail::json_number(cfg.series_radius) + "}";
}

inline void write_report_json(std::ostream& os, const IdentityReport& r, const std::string& indent = "    ") {
  os << indent << "{\n";
  os << indent << "  \"identity_name\": " << detail::json_string(r.identity_name) << ",\n";
  os << indent << "  \"tolerance\": " << detail::json_number(r.tolerance) << ",\n";
  os << indent << "  \"max_residual\": " << detail::json_number(r.max_residual) << ",\n";
  os << indent << "  \"passed\": " << (r.passed ? "true" : "false") << ",\n";
  os << indent << "  \"seed\": " << r.seed << ",\n";
  os << indent << "  \"cfg\": " << cfg_json(r.cfg_used) << ",\n";
  os << indent << "  \"samples\": [";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const Sample& s = r.samples[i];
    os << (i ? "," : "") << "\n" << indent << "    {\"input\": " << detail::json_string(s.input)
       << ", \"lhs\": " << detail::json_complex(s.lhs) << ", \"rhs\": " << detail::json_complex(s.rhs)
       << ", \"residual\": " << detail::json_number(s.residual) << ", \"status\": " << detail::json_string(to_string(s.status))
       << ", \"note\": " << detail::json_string(s.note) << "}";
  }
  os << "\n" << indent << "  ]\n" << indent << "}";
}

/// {"reports": [...], "summary": {...}}
inline void write_reports_json(std::ostream& os, const std::vector<IdentityReport>& reports) {
  std::size_t passed = 0;
  for (const auto& r : reports) passed += r.passed ? 1 : 0;
  os << "{\n  \"reports\": [\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    write_report_json(os, reports[i]);
    os << (i + 1 < reports.size() ? ",\n" : "\n");
  }
  os << "  ],\n  \"summary\": {\"total\": " << reports.size() << ", \"passed\": " << passed
     << ", \"all_passed\": " << (passed == reports.size() ? "true" : "false") << "}\n}\n";
}

/// One row per sample, RFC 4180 quoting.
inline void write_reports_csv(std::ostream& os, const std::vector<IdentityReport>& reports) {
  os << "identity_name,input,lhs_re,lhs_im,rhs_re,rhs_im,residual,status,note,tolerance,passed\r\n";
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      os << detail::csv_field(r.identity_name) << ',' << detail::csv_field(s.input) << ',' << fmt(s.lhs.real()) << ','
         << fmt(s.lhs.imag()) << ',' << fmt(s.rhs.real()) << ',' << fmt(s.rhs.imag()) << ',' << fmt(s.residual) << ','
         << to_string(s.status) << ',' << detail::csv_field(s.note) << ',' << fmt(r.tolerance) << ','
         << (r.passed ? "true" : "false") << "\r\n";
    }
  }
}

namespace detail {

inline double json_double(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

inline SampleStatus parse_status(const std::string& s) {
  if (s == "ok") return SampleStatus::Ok;
  if (s == "skipped") return SampleStatus::Skipped;
  if (s == "measured") return SampleStatus::Measured;
  if (s == "error") return SampleStatus::Error;
  throw Error(ErrorKind::Parse, "unknown sample status '" + s + "'");
}

}  // namespace detail

/// Parses the output of write_reports_json.
inline std::vector<IdentityReport> read_reports_json(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
    std::vector<IdentityReport> out;
    for (const auto& jr : doc.at("reports")) {
      IdentityReport r;
      r.identity_name = jr.at("identity_name").get<std::string>();
      r.tolerance = detail::json_double(jr.at("tolerance"));
      r.max_residual = detail::json_double(jr.at("max_residual"));
      r.passed = jr.at("passed").get<bool>();
      r.seed = jr.at("seed").get<std::uint64_t>();
      const auto& jc = jr.at("cfg");
      r.cfg_used.q_order = jc.at("q_order").get<int>();
      r.cfg_used.theta_range = jc.at("theta_range").get<int>();
      r.cfg_used.lattice_range = jc.at("lattice_range").get<int>();
      r.cfg_used.tol = detail::json_double(jc.at("tol"));
      r.cfg_used.series_radius = detail::json_double(jc.at("series_radius"));
      for (const auto& js : jr.at("samples")) {
        Sample s;
        s.input = js.at("input").get<std::string>();
        s.lhs = {detail::json_double(js.at("lhs").at("re")), detail::json_double(js.at("lhs").at("im"))};
        s.rhs = {detail::json_double(js.at("rhs").at("re")), detail::json_double(js.at("rhs").at("im"))};
        s.residual = detail::json_double(js.at("residual"));
        s.status = detail::parse_status(js.at("status").get<std::string>());
        s.note = js.value("note", "");
        r.samples.push_back(std::move(s));
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed report JSON: ") + e.what());
  }
}

/// Recomputes each verdict from the samples and tolerance.
inline bool verdict_consistent(const IdentityReport& r) {
  double worst = 0.0;
  bool any = false;
  for (const auto& s : r.samples) {
    if (s.status == SampleStatus::Ok || s.status == SampleStatus::Error) {
      any = true;
      worst = std::max(worst, s.residual);
    }
  }
  return r.passed == (any && worst <= r.tolerance);
}

}  // namespace twisted
