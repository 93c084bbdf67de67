#include "epslab/errors.hpp"

#include <cstdio>

namespace epslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::SqrtNotConverged: return "SqrtNotConverged";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::Eval: return "EvalError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::FitDegenerate: return "FitDegenerate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

namespace {
std::string fmt_double(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
}  // namespace

SingularMatrix::SingularMatrix(double pivot, double threshold, const std::string& context)
    : Error(ErrorKind::SingularMatrix,
            (context.empty() ? std::string() : context + ": ") +
                fmt_double("singular matrix (pivot %.3e below threshold %.3e)", pivot, threshold)),
      pivot_(pivot),
      threshold_(threshold) {}

SqrtNotConverged::SqrtNotConverged(int iterations, double residual)
    : Error(ErrorKind::SqrtNotConverged,
            fmt_double("matrix square root did not converge after %.0f iterations (residual %.3e)",
                       iterations, residual)),
      iterations_(iterations),
      residual_(residual) {}

NonPositiveCoefficient::NonPositiveCoefficient(std::size_t node, double y, double value)
    : Error(ErrorKind::NonPositiveCoefficient,
            "coefficient a(y) must be positive; node " + std::to_string(node) +
                fmt_double(" has a(%.6g) = %.6g", y, value)),
      node_(node) {}

static std::string describe_parse(std::size_t offset, const std::vector<std::string>& expected,
                                  const std::string& found) {
  std::string msg = "parse error at offset " + std::to_string(offset) + ": found " + found;
  if (!expected.empty()) {
    msg += ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += "}";
  }
  return msg;
}

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error(ErrorKind::Parse, describe_parse(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownVariable::UnknownVariable(const std::string& name, std::size_t offset)
    : Error(ErrorKind::UnknownVariable,
            "unknown variable '" + name + "' at offset " + std::to_string(offset)),
      name_(name),
      offset_(offset) {}

ConfigError::ConfigError(const std::string& key_path, const std::string& message)
    : Error(ErrorKind::Config, key_path + ": " + message), key_path_(key_path) {}

}  // namespace epslab
