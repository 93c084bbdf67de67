#include "epslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace epslab {

using nlohmann::json;
using expr::Var;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "name", "preset", "mode",
      "operator.a", "operator.b", "operator.K", "operator.b_coeffs", "operator.n_y", "operator.p",
      "operator.phi", "operator.waive_positivity", "operator.positivity_min_decade",
      "operator.positivity_max_decade", "operator.positivity_include_zero", "operator.positivity_cap",
      "problem.eps", "problem.eps0", "problem.T", "problem.lambda", "problem.f", "problem.f0", "problem.u0",
      "problem.delta",
      "boundary.m1", "boundary.m2", "boundary.alpha0", "boundary.alpha1", "boundary.beta0", "boundary.beta1",
      "boundary.f1", "boundary.f2",
      "grid.n_t", "grid.n_x", "grid.L", "grid.layer_points", "grid.max_n_t",
      "sweep.eps_list", "sweep.lambda_list",
      "check.t_samples",
      "layer.t", "layer.fit_points",
      "limits.max_n_t", "limits.max_n_y", "limits.max_n_x",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json parse_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) return json(std::string());
  json j = json::parse(v, nullptr, false);
  if (j.is_discarded()) return json(v);
  return j;
}

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

Scenario from_ptree(const boost::property_tree::ptree& tree, const std::string& default_name) {
  Scenario sc = Scenario::from_string("", default_name);
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      sc.set(key, parse_value(node.data()));
      continue;
    }
    for (const auto& [sub, leaf] : node) {
      if (!leaf.empty()) throw ConfigError(key + "." + sub, "sections nest one level only");
      sc.set(key + "." + sub, parse_value(leaf.data()));
    }
  }
  return sc;
}

}  // namespace

Mode mode_from_string(const std::string& s) {
  if (s == "solve") return Mode::Solve;
  if (s == "sweep") return Mode::Sweep;
  if (s == "converge") return Mode::Converge;
  if (s == "check") return Mode::Check;
  throw ConfigError("mode", "unknown mode '" + s + "' (solve | sweep | converge | check)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Solve: return "solve";
    case Mode::Sweep: return "sweep";
    case Mode::Converge: return "converge";
    case Mode::Check: return "check";
  }
  return "solve";
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = from_string(ss.str(), file_stem(path));
  return sc;
}

Scenario Scenario::from_string(const std::string& text, const std::string& default_name) {
  if (trim(text).empty()) {
    Scenario sc;
    sc.default_name_ = default_name;
    return sc;
  }
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  Scenario sc = from_ptree(tree, default_name);
  sc.check_known();
  return sc;
}

void Scenario::check_known() const {
  for (const auto& [k, v] : values_)
    if (!known_keys().count(k)) throw ConfigError(k, "unknown key");
}

void Scenario::set(const std::string& key, const json& value) { values_[key] = value; }

void Scenario::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override", "expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
  set(key, parse_value(assignment.substr(eq + 1)));
}

void Scenario::set_preset(const std::string& name) {
  if (name != "scalar" && name != "commuting" && name != "wentzell")
    throw ConfigError("preset", "unknown preset '" + name + "' (scalar | commuting | wentzell)");
  set("preset", name);
}

void Scenario::set_mode(Mode m) { set("mode", to_string(m)); }

const json& Scenario::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

double Scenario::number(const std::string& key) const {
  const json& j = raw(key);
  if (!j.is_number()) throw ConfigError(key, "expected a number, got " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "not finite");
  return v;
}

double Scenario::number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

std::size_t Scenario::count(const std::string& key, std::size_t def) const {
  if (!has(key)) return def;
  const json& j = raw(key);
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ConfigError(key, "expected a nonnegative integer, got " + j.dump());
  return j.get<std::size_t>();
}

int Scenario::integer(const std::string& key, int def) const {
  if (!has(key)) return def;
  const json& j = raw(key);
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer, got " + j.dump());
  return j.get<int>();
}

bool Scenario::flag(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const json& j = raw(key);
  if (!j.is_boolean()) throw ConfigError(key, "expected true or false, got " + j.dump());
  return j.get<bool>();
}

std::string Scenario::text(const std::string& key) const {
  const json& j = raw(key);
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ConfigError(key, "expected a string, got " + j.dump());
}

std::string Scenario::text(const std::string& key, const std::string& def) const {
  return has(key) ? text(key) : def;
}

namespace {
Complex to_complex(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(key, "expected a number or [re, im], got " + j.dump());
}
}  // namespace

Complex Scenario::complex(const std::string& key, Complex def) const {
  return has(key) ? to_complex(raw(key), key) : def;
}

std::vector<double> Scenario::number_list(const std::string& key) const {
  const json& j = raw(key);
  if (!j.is_array()) throw ConfigError(key, "expected a list");
  if (j.empty()) throw ConfigError(key, "list is empty");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<Complex> Scenario::complex_list(const std::string& key) const {
  const json& j = raw(key);
  if (!j.is_array()) throw ConfigError(key, "expected a list");
  if (j.empty()) throw ConfigError(key, "list is empty");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_complex(j[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::string Scenario::name() const { return text("name", default_name_); }

std::string Scenario::preset() const {
  const std::string p = text("preset");
  if (p != "scalar" && p != "commuting" && p != "wentzell")
    throw ConfigError("preset", "unknown preset '" + p + "' (scalar | commuting | wentzell)");
  return p;
}

Mode Scenario::mode() const { return mode_from_string(text("mode")); }

std::string Scenario::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v.dump() + "\n";
  return out;
}

std::uint64_t Scenario::hash() const { return fnv1a64(canonical()); }

std::string Scenario::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::string Scenario::header() const { return "# config_hash=" + hash_hex() + " scenario=" + name(); }

// ------------------------------------------------------------------ building

namespace {

expr::Expr expression(const Scenario& sc, const std::string& key, const std::string& def,
                      const std::vector<Var>& allowed) {
  const std::string src = sc.text(key, def);
  try {
    return expr::parse(src, allowed);
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

// A vector in E: a constant (number or [re, im]) or an expression in y.
CVector data_vector(const Scenario& sc, const std::string& key, const SpaceGrid& g) {
  if (!sc.has(key)) return CVector(g.n_y);
  const json& j = sc.raw(key);
  if (j.is_number() || j.is_array()) return CVector(g.n_y, to_complex(j, key));
  const expr::Expr e = expression(sc, key, "0", {Var::y});
  CVector v(g.n_y);
  for (std::size_t i = 0; i < g.n_y; ++i) v[i] = e.eval(expr::Bindings{}.set(Var::y, g.nodes[i]));
  return v;
}

Forcing forcing(const Scenario& sc, const std::string& key, const SpaceGrid& g) {
  if (!sc.has(key)) return Forcing::zero();
  const expr::Expr e = expression(sc, key, "0", {Var::t, Var::y});
  if (e.root()->kind == expr::Node::Kind::Number && e.root()->value == 0.0) return Forcing::zero();
  return forcing_from_expr(e, g);
}

std::size_t capped(const Scenario& sc, const std::string& key, std::size_t def, const std::string& cap_key,
                   std::size_t cap_def) {
  const std::size_t v = sc.count(key, def);
  const std::size_t cap = sc.count(cap_key, cap_def);
  if (v > cap) throw ConfigError(key, std::to_string(v) + " exceeds " + cap_key + " = " + std::to_string(cap));
  return v;
}

}  // namespace

Experiment build_experiment(const Scenario& sc) {
  Experiment ex;
  ex.name = sc.name();
  ex.preset = sc.preset();
  ex.mode = sc.mode();
  const bool scalar = ex.preset == "scalar", wentzell = ex.preset == "wentzell";

  // operator
  const double p = sc.number("operator.p", 2.0);
  if (!(p > 1.0)) throw ConfigError("operator.p", "must be > 1");
  std::size_t n_y = scalar ? 1 : capped(sc, "operator.n_y", wentzell ? 32 : 16, "limits.max_n_y", 512);
  if (scalar && sc.has("operator.n_y") && sc.count("operator.n_y", 1) != 1)
    throw ConfigError("operator.n_y", "the scalar preset has n_y = 1");
  if (n_y < 1) throw ConfigError("operator.n_y", "must be >= 1");
  const SpaceGrid grid = SpaceGrid::uniform(n_y);

  PositivityOptions po;
  if (wentzell) {
    // Constants lie in the kernel of the Wentzell operator: sample |lambda| >= 1.
    po.phi = 0.25 * std::numbers::pi;
    po.min_decade = 0;
    po.include_zero = false;
  }
  po.phi = sc.number("operator.phi", po.phi);
  po.min_decade = sc.integer("operator.positivity_min_decade", po.min_decade);
  po.max_decade = sc.integer("operator.positivity_max_decade", po.max_decade);
  po.include_zero = sc.flag("operator.positivity_include_zero", po.include_zero);
  po.cap = sc.number("operator.positivity_cap", po.cap);
  po.waived = sc.flag("operator.waive_positivity", false);
  if (!(po.phi > 0.0 && po.phi < std::numbers::pi)) throw ConfigError("operator.phi", "must lie in (0, pi)");

  ComplexMatrix a, b;
  if (scalar) {
    a = ComplexMatrix(1);
    b = ComplexMatrix(1);
    a(0, 0) = sc.number("operator.a", 1.0);
    b(0, 0) = sc.number("operator.b", 0.0);
  } else if (ex.preset == "commuting") {
    const auto d = expression(sc, "operator.a", "1 + 9*y", {Var::y});
    const std::vector<double> c = sc.has("operator.b_coeffs") ? sc.number_list("operator.b_coeffs")
                                                              : std::vector<double>{0.3, 0.05};
    std::tie(a, b) = build_commuting_operators(d, c, grid);
  } else {
    ex.a_expr = expression(sc, "operator.a", "1 + y", {Var::y});
    ex.b_expr = expression(sc, "operator.b", "y", {Var::y});
    ex.k_expr = expression(sc, "operator.K", "0.5*(1 + y*tau)", {Var::y, Var::tau});
    a = build_wentzell_operator(ex.a_expr, ex.b_expr, grid);
    b = build_integral_operator(ex.k_expr, grid);
  }
  // Check mode reports a failed positivity test instead of refusing to build.
  PositivityOptions build_po = po;
  if (ex.mode == Mode::Check) build_po.waived = true;
  ex.positivity_waived = po.waived;
  try {
    ex.pair = std::make_shared<const OperatorPair>(std::move(a), std::move(b), grid, p, ex.preset, build_po);
  } catch (const InvalidArgument& e) {
    throw ConfigError("operator", std::string(e.what()) + "; set operator.waive_positivity = true to run anyway");
  }

  // problem
  auto& s = ex.problem;
  s.pair = ex.pair;
  s.eps0 = sc.number("problem.eps0", 1.0);
  s.eps = sc.number("problem.eps", s.eps0);
  s.T = sc.number("problem.T", 1.0);
  s.lambda = sc.complex("problem.lambda", wentzell ? Complex(1.0) : Complex(0.0));
  s.f = forcing(sc, "problem.f", grid);
  const int m1 = sc.integer("boundary.m1", 0), m2 = sc.integer("boundary.m2", 1);
  const Complex a0 = sc.complex("boundary.alpha0", m1 == 0 ? 1.0 : 0.0);
  const Complex a1 = sc.complex("boundary.alpha1", m1 == 1 ? 1.0 : 0.0);
  const Complex b0 = sc.complex("boundary.beta0", m2 == 0 ? 1.0 : 0.0);
  const Complex b1 = sc.complex("boundary.beta1", m2 == 1 ? 1.0 : 0.0);
  try {
    s.bc = BoundaryData::make(m1, m2, a0, a1, b0, b1, data_vector(sc, "boundary.f1", grid),
                              data_vector(sc, "boundary.f2", grid), p);
  } catch (const InvalidArgument& e) {
    throw ConfigError("boundary", e.what());
  }
  s.max_n_t = capped(sc, "grid.max_n_t", 200000, "limits.max_n_t", 200000);
  s.n_t = capped(sc, "grid.n_t", 400, "limits.max_n_t", 200000);
  s.n_x = capped(sc, "grid.n_x", 1024, "limits.max_n_x", std::size_t{1} << 20);
  s.L = sc.number("grid.L", 0.0);
  s.layer_points = sc.number("grid.layer_points", 0.0);

  // Cauchy side of the convergence study
  ex.cauchy.pair = ex.pair;
  ex.cauchy.u0 = data_vector(sc, "problem.u0", grid);
  if (!sc.has("problem.u0")) ex.cauchy.u0 = CVector(n_y, 1.0);
  ex.cauchy.f0 = forcing(sc, "problem.f0", grid);
  ex.cauchy.T = s.T;
  ex.cauchy.n_t = s.n_t;
  ex.delta = sc.number("problem.delta", 0.1);
  if (!(ex.delta > 0.0 && ex.delta < 1.0)) throw ConfigError("problem.delta", "must lie in (0, 1)");
  ex.layer_t = sc.number("layer.t", 0.5);
  if (!(ex.layer_t > 0.0 && ex.layer_t < 1.0)) throw ConfigError("layer.t", "must lie in (0, 1)");
  ex.fit_points = sc.count("layer.fit_points", 40);

  // lists
  if (ex.mode == Mode::Sweep || ex.mode == Mode::Converge) {
    ex.eps_list = sc.number_list("sweep.eps_list");
    for (std::size_t i = 0; i < ex.eps_list.size(); ++i)
      if (!(ex.eps_list[i] > 0.0 && ex.eps_list[i] <= s.eps0))
        throw ConfigError("sweep.eps_list[" + std::to_string(i) + "]", "must lie in (0, eps0]");
  }
  if (ex.mode == Mode::Sweep) ex.lambda_list = sc.complex_list("sweep.lambda_list");
  if (sc.has("check.t_samples")) {
    ex.t_samples = sc.number_list("check.t_samples");
  } else {
    ex.t_samples = log_grid(1e-3, 1e4, 29);
    ex.t_samples.insert(ex.t_samples.begin(), 0.0);
  }

  if (ex.mode == Mode::Solve) {
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("problem", e.what());
    }
  }
  return ex;
}

}  // namespace epslab
