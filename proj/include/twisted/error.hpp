#pragma once

#include <stdexcept>
#include <string>

namespace twisted {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  Domain,           // argument outside the convergence region of the requested representation
  NotConverged,     // truncation window exhausted before the tail bound was met
  NearPole,         // a series denominator came within 1e-12 of zero
  OddDimension,     // Pfaffian of an odd-dimensional matrix
  NotAntisymmetric, // Pfaffian input fails the antisymmetry tolerance
  RouteUnavailable, // no applicable lattice-sum route for the given twist
  DegenerateTheta,  // theta-constant denominator vanishes
  UnsupportedTwist, // formula not available for this twist class
  Balance,          // lattice charges do not balance
  Parse,            // malformed user input
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::RouteUnavailable: return "RouteUnavailable";
    case ErrorKind::DegenerateTheta: return "DegenerateTheta";
    case ErrorKind::UnsupportedTwist: return "UnsupportedTwist";
    case ErrorKind::Balance: return "BalanceError";
    case ErrorKind::Parse: return "ParseError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace twisted
