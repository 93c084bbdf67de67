#include "epslab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "epslab/estimates.hpp"
#include "epslab/multiplier.hpp"

namespace epslab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Text output that always starts with the scenario header line.
class Output {
 public:
  Output(const fs::path& dir, const std::string& name, const std::string& header, RunOutcome& outcome)
      : path_(dir / name), out_(path_, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write '" + path_.string() + "'");
    out_ << header << '\n';
    outcome.files.push_back(name);
  }
  template <class... Cols>
  void row(const Cols&... cols) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cols)), ...);
    out_ << line << '\n';
  }
  void line(const std::string& s) { out_ << s << '\n'; }
  ~Output() {
    out_.flush();
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return num(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& dir, const std::string& name, const ojson& j, RunOutcome& outcome) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + (dir / name).string() + "'");
  out << j.dump(2) << '\n';
  outcome.files.push_back(name);
}

ojson meta(const Scenario& sc, const Experiment& ex) {
  ojson m;
  m["config_hash"] = sc.hash_hex();
  m["scenario"] = ex.name;
  m["preset"] = ex.preset;
  m["mode"] = to_string(ex.mode);
  return m;
}

ojson cjson(Complex z) { return ojson::array({z.real(), z.imag()}); }

void plot_script(const fs::path& dir, const std::string& header, const std::vector<std::string>& lines,
                 RunOutcome& outcome) {
  Output gp(dir, "plot.gp", header, outcome);
  gp.line("# gnuplot script for the .dat files of this run");
  gp.line("set terminal pngcairo size 900,600");
  for (const auto& l : lines) gp.line(l);
}

// ---------------------------------------------------------------- solve

int run_solve(const Scenario& sc, const Experiment& ex, const fs::path& dir, RunOutcome& outcome) {
  const auto& s = ex.problem;
  const auto& g = ex.pair->grid();
  const auto res = full_solve(s);
  const auto rep = coercive_report(s, res.u);
  const std::string h = sc.header();

  {
    Output o(dir, "solution.csv", h, outcome);
    o.row("t", "y", "re", "im");
    for (std::size_t i = 0; i < res.u.n_t(); ++i)
      for (std::size_t j = 0; j < g.n_y; ++j) o.row(res.u.t(i), g.nodes[j], res.u(i, j).real(), res.u(i, j).imag());
  }
  {
    // Boundary coefficients for the data (f1, f2) alone.
    const auto q = solve_boundary_system(s, compute_q_system(s));
    Output o(dir, "coefficients.csv", h, outcome);
    o.row("y", "g1_re", "g1_im", "g2_re", "g2_im");
    for (std::size_t j = 0; j < g.n_y; ++j)
      o.row(g.nodes[j], q.g1[j].real(), q.g1[j].imag(), q.g2[j].real(), q.g2[j].imag());
  }
  {
    Output o(dir, "report.csv", h, outcome);
    o.row("eps", "lambda_re", "lambda_im", "term0", "term1", "term2", "au_norm", "lhs_total", "lhs_alt_total",
          "lhs_half_total", "rhs", "ratio", "ratio_alt", "ratio_half", "n_t", "path", "alias_fraction", "status");
    o.row(rep.eps, rep.lambda.real(), rep.lambda.imag(), rep.lhs_terms[0], rep.lhs_terms[1], rep.lhs_terms[2],
          rep.au_norm, rep.lhs_total, rep.lhs_alt_total, rep.lhs_half_total, rep.rhs, rep.ratio, rep.ratio_alt,
          rep.ratio_half, rep.n_t, to_string(res.path), res.alias_fraction, rep.status);
  }
  {
    Output o(dir, "solution_norm.dat", h, outcome);
    o.line("# t ||u(t)||_E");
    for (std::size_t i = 0; i < res.u.n_t(); ++i) o.line(num(res.u.t(i)) + " " + num(g.e_norm(res.u.row(i))));
  }
  plot_script(dir, h, {"set output 'solution_norm.png'", "set xlabel 't'", "set ylabel '||u(t)||'",
                       "plot 'solution_norm.dat' using 1:2 with lines title 'u'"},
              outcome);
  if (!rep.ok) {
    outcome.message = "solve: " + rep.status;
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- sweep

int run_sweep(const Scenario& sc, const Experiment& ex, const fs::path& dir, std::size_t jobs, RunOutcome& outcome) {
  const auto res = uniformity_sweep(ex.problem, ex.eps_list, ex.lambda_list, jobs);
  const std::string h = sc.header();
  std::size_t failed = 0;
  {
    Output o(dir, "sweep.csv", h, outcome);
    o.row("eps", "lambda_re", "lambda_im", "term0", "term1", "term2", "au_norm", "lhs_total", "lhs_alt_total", "rhs",
          "ratio", "status");
    for (const auto& c : res.cells) {
      failed += c.ok ? 0 : 1;
      o.row(c.eps, c.lambda.real(), c.lambda.imag(), c.lhs_terms[0], c.lhs_terms[1], c.lhs_terms[2], c.au_norm,
            c.lhs_total, c.lhs_alt_total, c.rhs, c.ratio, c.status);
    }
  }
  {
    Output o(dir, "sweep_summary.csv", h, outcome);
    o.row("lambda_re", "lambda_im", "max_ratio", "uniformity", "uniformity_alt", "uniformity_half", "failed");
    for (const auto& m : res.summary)
      o.row(m.lambda.real(), m.lambda.imag(), m.max_ratio, m.uniformity, m.uniformity_alt, m.uniformity_half,
            m.failed);
  }
  {
    const auto table = multiplier_bound_scan(ex.eps_list, ex.lambda_list, *ex.pair, default_xi_grid());
    Output o(dir, "multiplier.csv", h, outcome);
    o.row("eps", "lambda_re", "lambda_im", "phi_bound", "aphi_bound", "sigma_bound", "status");
    for (const auto& c : table.cells)
      o.row(c.eps, c.lambda.real(), c.lambda.imag(), c.phi_bound, c.aphi_bound, c.sigma_bound,
            c.ok ? std::string("ok") : c.error);
    Output u(dir, "multiplier_summary.csv", h, outcome);
    u.row("lambda_re", "lambda_im", "phi_uniformity");
    for (std::size_t l = 0; l < ex.lambda_list.size(); ++l)
      u.row(ex.lambda_list[l].real(), ex.lambda_list[l].imag(), table.phi_uniformity[l]);
  }
  {
    // One gnuplot data block per lambda.
    Output o(dir, "ratio_vs_eps.dat", h, outcome);
    const std::size_t nl = ex.lambda_list.size();
    for (std::size_t l = 0; l < nl; ++l) {
      if (l) o.line("\n");
      o.line("# lambda = " + num(ex.lambda_list[l].real()) + " " + num(ex.lambda_list[l].imag()) + "; eps ratio");
      for (std::size_t e = 0; e < ex.eps_list.size(); ++e) {
        const auto& c = res.cells[e * nl + l];
        if (c.ok) o.line(num(c.eps) + " " + num(c.ratio));
      }
    }
  }
  plot_script(dir, h, {"set output 'ratio_vs_eps.png'", "set logscale x", "set xlabel 'eps'", "set ylabel 'ratio'",
                       "plot for [i=0:*] 'ratio_vs_eps.dat' index i using 1:2 with linespoints title sprintf('lambda %d', i)"},
              outcome);
  if (failed) {
    outcome.message = "sweep: " + std::to_string(failed) + " of " + std::to_string(res.cells.size()) +
                      " cells failed (see status column of sweep.csv)";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- converge

int run_converge(const Scenario& sc, const Experiment& ex, const fs::path& dir, std::size_t jobs,
                 RunOutcome& outcome) {
  const auto rec = convergence_study(ex.problem, ex.cauchy, ex.eps_list, ex.delta, jobs);
  const std::string h = sc.header();
  std::size_t failed = 0;
  {
    Output o(dir, "convergence.csv", h, outcome);
    o.row("eps", "x_gap", "sup_gap", "floor", "above_floor");
    for (const auto& r : rec.rows) o.row(r.eps, r.x_gap, r.sup_gap, r.floor, r.above_floor);
    Output d(dir, "convergence_detail.csv", h, outcome);
    d.row("eps", "x_gap", "sup_gap", "floor", "sup_floor", "above_floor", "sup_above_floor", "n_t", "status");
    for (const auto& r : rec.rows) {
      failed += r.ok ? 0 : 1;
      d.row(r.eps, r.x_gap, r.sup_gap, r.floor, r.sup_floor, r.above_floor, r.sup_above_floor, r.n_t, r.status);
    }
  }
  {
    Output o(dir, "convergence_summary.csv", h, outcome);
    o.row("fitted_rate", "sup_fitted_rate", "x_monotone", "sup_monotone", "x_gap_ratio", "sup_gap_ratio");
    o.row(rec.fitted_rate, rec.sup_fitted_rate, rec.x_monotone, rec.sup_monotone, rec.x_gap_ratio, rec.sup_gap_ratio);
  }
  {
    Output o(dir, "decay.csv", h, outcome);
    o.row("eps", "omega", "C1", "residual", "window_lo", "window_hi", "omega_reference", "layer_at_end", "status");
    for (double eps : ex.eps_list) {
      ProblemSpec s = ex.problem;
      s.eps = eps;
      try {
        const auto fit = decay_fit(s, ex.fit_points);
        o.row(eps, fit.omega, fit.C1, fit.residual, fit.window_lo, fit.window_hi, fit.omega_reference,
              fit.layer_at_end, "ok");
      } catch (const Error& e) {
        ++failed;
        const double nan = std::nan("");
        o.row(eps, nan, nan, nan, nan, nan, nan, false, std::string(to_string(e.kind())) + ": " + e.what());
      }
    }
  }
  {
    const auto ln = layer_norm_sweep(ex.problem, ex.eps_list, ex.layer_t * ex.problem.T);
    Output o(dir, "layer_norms.csv", h, outcome);
    o.row("eps", "t", "m_norm", "n_norm");
    for (const auto& r : ln.rows) o.row(r.eps, ln.t, r.m_norm, r.n_norm);
    Output d(dir, "layer_norms.dat", h, outcome);
    d.line("# eps ||M|| ||N||");
    for (const auto& r : ln.rows) d.line(num(r.eps) + " " + num(r.m_norm) + " " + num(r.n_norm));
  }
  {
    Output o(dir, "gaps.dat", h, outcome);
    o.line("# eps x_gap sup_gap floor");
    for (const auto& r : rec.rows)
      if (r.ok) o.line(num(r.eps) + " " + num(r.x_gap) + " " + num(r.sup_gap) + " " + num(r.floor));
  }
  plot_script(dir, h,
              {"set output 'gaps.png'", "set logscale xy", "set xlabel 'eps'",
               "plot 'gaps.dat' using 1:2 with linespoints title 'X gap', '' using 1:3 with linespoints title "
               "'sup gap', '' using 1:4 with lines title 'floor'",
               "set output 'layer_norms.png'",
               "plot 'layer_norms.dat' using 1:2 with linespoints title '||M||', '' using 1:3 with linespoints "
               "title '||N||'"},
              outcome);
  if (failed) {
    outcome.message = "converge: " + std::to_string(failed) + " rows failed (see status columns)";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- check

int run_check(const Scenario& sc, const Experiment& ex, const fs::path& dir, RunOutcome& outcome) {
  ojson j;
  j["_meta"] = meta(sc, ex);

  const auto& pos = ex.pair->positivity();
  {
    ojson d;
    d["phi"] = pos.phi;
    d["bound_M"] = pos.bound_M;
    d["cap"] = pos.cap;
    d["waived"] = ex.positivity_waived;
    ojson samples = ojson::array();
    for (const auto& s : pos.samples) samples.push_back({{"lambda", cjson(s.lambda)}, {"value", s.value}});
    d["samples"] = samples;
    j["positivity"] = {{"passed", pos.passed}, {"details", d}};
  }

  const auto c21 = check_condition_2_1(*ex.pair, ex.t_samples, &ex.problem.bc);
  {
    ojson d;
    d["summary"] = c21.details();
    d["norm_B"] = c21.lhs;
    d["sup_A_resolvent"] = c21.rhs;
    d["d"] = cjson(c21.d);
    d["a_plus_b_nonsingular"] = c21.a_plus_b_nonsingular;
    ojson samples = ojson::array();
    for (const auto& [t, v] : c21.samples) samples.push_back({{"t", t}, {"value", v}});
    d["samples"] = samples;
    j["condition_2_1"] = {{"passed", c21.passed}, {"details", d}};
  }

  const auto c1 = check_condition_1(ex.problem.bc);
  j["condition_1"] = {{"passed", c1.passed}, {"details", {{"summary", c1.details()}, {"d1", cjson(c1.d1)}}}};

  bool c41_passed = true;
  if (ex.preset == "wentzell") {
    const auto c41 = check_condition_4_1(ex.a_expr, ex.b_expr, ex.k_expr, ex.pair->grid());
    c41_passed = c41.passed;
    j["condition_4_1"] = {{"passed", c41.passed},
                          {"details",
                           {{"summary", c41.details()},
                            {"applicable", true},
                            {"min_a", c41.min_a},
                            {"integrability", c41.integrability}}}};
  } else {
    j["condition_4_1"] = {{"passed", true},
                          {"details", {{"summary", "only defined for the wentzell preset"}, {"applicable", false}}}};
  }

  write_json(dir, "conditions.json", j, outcome);
  const bool all = pos.passed && c21.passed && c1.passed && c41_passed;
  if (!all) {
    outcome.message = "check: at least one condition failed (see conditions.json)";
    return 1;
  }
  return 0;
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir, std::size_t jobs) {
  RunOutcome outcome;
  try {
    const Experiment ex = build_experiment(sc);
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create '" + out_dir + "': " + ec.message());
    jobs = std::max<std::size_t>(jobs, 1);
    switch (ex.mode) {
      case Mode::Solve: outcome.exit_code = run_solve(sc, ex, dir, outcome); break;
      case Mode::Sweep: outcome.exit_code = run_sweep(sc, ex, dir, jobs, outcome); break;
      case Mode::Converge: outcome.exit_code = run_converge(sc, ex, dir, jobs, outcome); break;
      case Mode::Check: outcome.exit_code = run_check(sc, ex, dir, outcome); break;
    }
    if (outcome.message.empty()) outcome.message = to_string(ex.mode) + ": ok";
  } catch (const Error& e) {
    outcome.exit_code = e.is_validation() ? 1 : 2;
    outcome.message = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = 2;
    outcome.message = std::string("error: ") + e.what();
  }
  return outcome;
}

}  // namespace epslab
