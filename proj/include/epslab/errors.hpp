#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epslab {

enum class ErrorKind {
  SingularMatrix,
  SqrtNotConverged,
  Overflow,
  NonPositiveCoefficient,
  Parse,
  UnknownVariable,
  Eval,
  Config,
  FitDegenerate,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the library. Configuration and parse
/// problems are "validation" errors, the rest are numerical.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  bool is_validation() const noexcept {
    return kind_ == ErrorKind::Parse || kind_ == ErrorKind::UnknownVariable ||
           kind_ == ErrorKind::Config || kind_ == ErrorKind::InvalidArgument ||
           kind_ == ErrorKind::Io || kind_ == ErrorKind::NonPositiveCoefficient;
  }

 private:
  ErrorKind kind_;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(double pivot, double threshold, const std::string& context = "");
  double pivot() const noexcept { return pivot_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double pivot_;
  double threshold_;
};

class SqrtNotConverged : public Error {
 public:
  SqrtNotConverged(int iterations, double residual);
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class Overflow : public Error {
 public:
  explicit Overflow(const std::string& what) : Error(ErrorKind::Overflow, what) {}
};

class NonPositiveCoefficient : public Error {
 public:
  NonPositiveCoefficient(std::size_t node, double y, double value);
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownVariable : public Error {
 public:
  UnknownVariable(const std::string& name, std::size_t offset);
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error(ErrorKind::Eval, what) {}
};

/// A config problem, reported with the offending key path (e.g. "operator.p").
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key_path, const std::string& message);
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class FitDegenerate : public Error {
 public:
  explicit FitDegenerate(const std::string& what) : Error(ErrorKind::FitDegenerate, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

}  // namespace epslab
