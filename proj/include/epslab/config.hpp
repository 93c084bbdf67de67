#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "epslab/elliptic.hpp"
#include "epslab/parabolic.hpp"

namespace epslab {

enum class Mode { Solve, Sweep, Converge, Check };
Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

/// A scenario file: INI sections of key = value. Values are read as JSON
/// when they parse as JSON and as bare strings otherwise, so
/// `lambda = [1, 0.5]`, `n_t = 400` and `f = sin(pi*t)*y` all work.
/// Keys are stored flat as "section.key"; top-level keys have no dot.
class Scenario {
 public:
  static Scenario from_file(const std::string& path);
  static Scenario from_string(const std::string& text, const std::string& default_name = "scenario");

  /// key=value with key a dotted path; the value follows the same rules
  /// as in the file.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const nlohmann::json& value);
  void set_preset(const std::string& name);
  void set_mode(Mode m);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const nlohmann::json& raw(const std::string& key) const;

  /// Typed getters; a missing key without a default is a ConfigError
  /// naming the key.
  double number(const std::string& key) const;
  double number(const std::string& key, double def) const;
  std::size_t count(const std::string& key, std::size_t def) const;
  int integer(const std::string& key, int def) const;
  bool flag(const std::string& key, bool def) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& def) const;
  Complex complex(const std::string& key, Complex def) const;
  std::vector<double> number_list(const std::string& key) const;
  std::vector<Complex> complex_list(const std::string& key) const;

  std::string name() const;
  std::string preset() const;
  Mode mode() const;

  /// Canonical "key = json" lines in key order; the hash is FNV-1a 64 of it.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
  /// "# config_hash=<hex> scenario=<name>"
  std::string header() const;

  const std::map<std::string, nlohmann::json>& values() const noexcept { return values_; }

 private:
  void check_known() const;

  std::map<std::string, nlohmann::json> values_;
  std::string default_name_;
};

/// Everything a run needs, built from a validated scenario.
struct Experiment {
  std::string name;
  std::string preset;
  Mode mode = Mode::Solve;
  std::shared_ptr<const OperatorPair> pair;
  bool positivity_waived = false;
  ProblemSpec problem;
  CauchySpec cauchy;
  expr::Expr a_expr, b_expr, k_expr;  ///< wentzell only
  std::vector<double> eps_list;
  std::vector<Complex> lambda_list;
  std::vector<double> t_samples;  ///< resolvent samples for check_condition_2_1
  double delta = 0.1;             ///< compact window fraction of T
  double layer_t = 0.5;           ///< fraction of T where ||M||, ||N|| are sampled
  std::size_t fit_points = 40;
};

/// Builds operators and data; throws ConfigError / ParseError on bad input.
Experiment build_experiment(const Scenario& sc);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace epslab
