#pragma once

// Command-line front end. run() is kept separate from main() so tests can
// drive it in-process with captured streams.

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circlepat/circlepat.hpp"

namespace circlepat::cli {

enum Exit : int { kOk = 0, kValidation = 2, kSolver = 3, kCheck = 4 };

inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidAngles:
    case ErrorCode::MissingEdgeClasses:
    case ErrorCode::InvalidMesh:
    case ErrorCode::EuclideanPoint:
    case ErrorCode::Io:
      return kValidation;
    case ErrorCode::NonConvergence:
    case ErrorCode::InconsistentZeroAngle:
    case ErrorCode::DegenerateLayout:
    case ErrorCode::DegenerateCrossRatio:
    case ErrorCode::BranchError:
    case ErrorCode::EuclideanDegenerate:
    case ErrorCode::SingularLaplacian:
    case ErrorCode::UnwrapFailure:
      return kSolver;
    case ErrorCode::NotInW:
    case ErrorCode::CheckFailed:
      return kCheck;
  }
  return kValidation;
}

/// A real number, optionally written as a multiple or fraction of pi ("pi/3", "2*pi/5", "-pi").
inline double parse_number(std::string s) {
  auto bad = [&] { return Error(ErrorCode::InvalidArgument, "cannot parse number '" + s + "'"); };
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  if (s.empty()) throw bad();
  auto plain = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != t.size()) throw bad();
    return v;
  };
  const auto at = s.find("pi");
  if (at == std::string::npos) return plain(s);
  std::string coef = s.substr(0, at), rest = s.substr(at + 2);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double v = kPi;
  if (coef == "-") v = -kPi;
  else if (!coef.empty() && coef != "+") v = plain(coef) * kPi;
  if (!rest.empty()) {
    if (rest[0] != '/') throw bad();
    v /= plain(rest.substr(1));
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item));
  if (out.size() != expected)
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
  return out;
}

struct Axis {
  double lo = 0.0, hi = 0.0;
  int n = 1;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

/// "x0:x1:n,y0:y1:n"
inline std::array<Axis, 2> parse_grid(const std::string& s) {
  std::array<Axis, 2> out;
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "grid must be x0:x1:n,y0:y1:n");
  const std::string parts[2] = {s.substr(0, comma), s.substr(comma + 1)};
  for (int r = 0; r < 2; ++r) {
    std::vector<std::string> f;
    std::stringstream ss(parts[r]);
    for (std::string item; std::getline(ss, item, ':');) f.push_back(item);
    if (f.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid axis must be lo:hi:n");
    out[r].lo = parse_number(f[0]);
    out[r].hi = parse_number(f[1]);
    const double n = parse_number(f[2]);
    if (!(n >= 1 && n == std::floor(n) && n <= 1000))
      throw Error(ErrorCode::InvalidArgument, "grid count must be an integer in [1, 1000]");
    out[r].n = static_cast<int>(n);
  }
  return out;
}

struct Config {
  std::string mesh_path;
  int p = 4, q = 4;
  std::string theta = "pi/3,pi/3,pi/3";
  std::string theta_file;
  std::string A = "0,0";
  double tol = 1e-12;
  double step = 1e-4;
  double R = 10.0;
  int samples = 256;
  std::string grid;
  std::string svg;
  int tile = 2;
  std::string out;
  std::string csv;
  double max_relerr = 1e-4;
};

struct Context {
  const Config& cfg;
  std::ostream& out;

  TorusTriangulation mesh() const {
    if (!cfg.mesh_path.empty()) return load_mesh(cfg.mesh_path);
    return build_lattice_torus(cfg.p, cfg.q);
  }
  AngleStructure theta(const TorusTriangulation& mesh) const {
    if (!cfg.theta_file.empty()) return load_angles(mesh, cfg.theta_file);
    const auto t = parse_list(cfg.theta, 3, "--theta");
    return uniform_angle_structure(mesh, t[0], t[1], t[2]);
  }
  std::array<double, 3> theta_triple() const {
    const auto t = parse_list(cfg.theta, 3, "--theta");
    return {t[0], t[1], t[2]};
  }
  Period A() const {
    const auto a = parse_list(cfg.A, 2, "--A");
    return {a[0], a[1]};
  }
  SolveOptions solve() const {
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
    SolveOptions o;
    o.tol = cfg.tol;
    return o;
  }
  double step() const {
    if (!(cfg.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "--step must be positive");
    return cfg.step;
  }
  /// The report goes to --out if given, otherwise to stdout when print_if_no_out.
  void emit(const Json& doc, bool print_if_no_out) const {
    if (!cfg.out.empty()) write_text(cfg.out, dump_document(doc));
    else if (print_if_no_out) out << dump_document(doc);
  }
  template <class T>
  void line(const std::string& key, const T& value) const {
    out << key << "=" << value << "\n";
  }
};

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline int cmd_mesh_gen(const Context& c) {
  c.emit(mesh_to_json(c.mesh()), true);
  return kOk;
}

inline int cmd_solve(const Context& c) {
  const auto mesh = c.mesh();
  const auto A = c.A();
  const auto pat = make_pattern(mesh, c.theta(mesh), A[0], A[1], c.solve());
  const auto doc = pattern_to_json(pat);
  c.emit(doc, true);
  const auto& r = doc["residuals"];
  const bool ok = r["radii"].get<double>() <= c.cfg.tol && r["product"].get<double>() <= 1e-9 &&
                  r["sum"].get<double>() <= 1e-9 && r["angle"].get<double>() <= 1e-9;
  if (!ok) throw Error(ErrorCode::CheckFailed, "cross-ratio residuals exceed 1e-9");
  return kOk;
}

inline int cmd_develop(const Context& c) {
  const auto mesh = c.mesh();
  const auto A = c.A();
  const auto pat = make_pattern(mesh, c.theta(mesh), A[0], A[1], c.solve());
  c.emit(pattern_to_json(pat), c.cfg.svg.empty());
  if (!c.cfg.svg.empty()) {
    write_text(c.cfg.svg, export_svg(pat, c.cfg.tile));
    c.line("svg", c.cfg.svg);
    c.line("tau_re", fmt(pat.tau().real()));
    c.line("tau_im", fmt(pat.tau().imag()));
  }
  return kOk;
}

inline int cmd_periodmap(const Context& c) {
  const auto mesh = c.mesh();
  const auto A = c.A();
  const auto pat = make_pattern(mesh, c.theta(mesh), A[0], A[1], c.solve());
  if (pat.euclidean()) throw Error(ErrorCode::EuclideanPoint, "period map report needs (A1, A2) != (0, 0)");
  const auto w = cotangent_weights(pat);
  const auto hx = period_map(mesh, w);
  double min_margin = 1e300, min_contraction = 1e300, max_energy_gap = 0.0;
  Json rows = Json::array();
  for (int k = 0; k < 8; ++k) {
    const Period p(std::cos(kPi * k / 4), std::sin(kPi * k / 4));
    const auto ineq = energy_inequality_check(pat, p);
    const double contraction = norm_tau(pat.tau(), p) - norm_tau(pat.tau(), hx * p);
    max_energy_gap = std::max(max_energy_gap, std::abs(ineq.lhs - omega(p, hx * p)));
    min_margin = std::min(min_margin, ineq.margin);
    min_contraction = std::min(min_contraction, contraction);
    rows.push_back({{"p", {p[0], p[1]}}, {"energy", ineq.lhs}, {"margin", ineq.margin}, {"contraction", contraction}});
  }
  Json doc;
  doc["A"] = {A[0], A[1]};
  doc["tau"] = complex_json(pat.tau());
  doc["h_X"] = period_matrix_to_json(hx);
  doc["h_tau"] = matrix_json(h_tau(pat.tau()));
  doc["directions"] = rows;
  doc["min_margin"] = min_margin;
  doc["min_contraction"] = min_contraction;
  doc["max_energy_gap"] = max_energy_gap;
  c.emit(doc, false);
  c.line("trace", fmt(hx.trace()));
  c.line("det", fmt(hx.det()));
  c.line("min_margin", fmt(min_margin));
  c.line("min_contraction", fmt(min_contraction));
  if (!(std::abs(hx.trace()) <= 1e-10 && min_margin > 0.0 && min_contraction > 0.0 && max_energy_gap <= 1e-10))
    throw Error(ErrorCode::CheckFailed, "period map structure check failed");
  return kOk;
}

inline int cmd_symplectic(const Context& c) {
  const auto mesh = c.mesh();
  const auto theta = c.theta(mesh);
  const auto grid = parse_grid(c.cfg.grid.empty() ? "-2:2:9,-2:2:9" : c.cfg.grid);
  Json rows = Json::array();
  std::string csv = "A1,A2,det_hx,lambda\n";
  double min_abs = 1e300;
  for (int j = 0; j < grid[1].n; ++j)
    for (int i = 0; i < grid[0].n; ++i) {
      const double a1 = grid[0].at(i), a2 = grid[1].at(j);
      if (a1 == 0.0 && a2 == 0.0) continue;
      const auto pb = pullback_form(make_pattern(mesh, theta, a1, a2, c.solve()));
      rows.push_back({{"A", {a1, a2}}, {"det_hx", pb.det_hx}, {"lambda", pb.lambda}});
      csv += fmt(a1) + "," + fmt(a2) + "," + fmt(pb.det_hx) + "," + fmt(pb.lambda) + "\n";
      min_abs = std::min(min_abs, std::abs(pb.lambda));
    }
  Json doc;
  doc["rows"] = rows;
  doc["min_abs_lambda"] = min_abs;
  c.emit(doc, false);
  if (!c.cfg.csv.empty()) write_text(c.cfg.csv, csv);
  c.line("points", rows.size());
  c.line("min_abs_lambda", fmt(min_abs));
  if (!(min_abs > 1e-6)) throw Error(ErrorCode::CheckFailed, "|lambda| <= 1e-6 on the grid");
  return kOk;
}

inline int cmd_winding(const Context& c) {
  const auto mesh = c.mesh();
  const auto w = winding_check(mesh, c.theta(mesh), c.cfg.R, c.cfg.samples, c.solve());
  Json doc;
  doc["R"] = c.cfg.R;
  doc["samples"] = c.cfg.samples;
  doc["winding"] = w.winding;
  doc["total_angle"] = w.total_angle;
  doc["closure"] = w.closure;
  doc["tau_euclidean"] = complex_json(w.tau_euclidean);
  Json pts = Json::array();
  for (const auto& z : w.w) pts.push_back(complex_json(z));
  doc["w"] = pts;
  c.emit(doc, false);
  c.line("winding", w.winding);
  c.line("closure", fmt(w.closure));
  if (w.winding != 1) throw Error(ErrorCode::CheckFailed, "winding is " + std::to_string(w.winding) + ", expected 1");
  return kOk;
}

inline int cmd_crosscheck(const Context& c) {
  const auto mesh = c.mesh();
  const auto theta = c.theta(mesh);
  const auto grid = parse_grid(c.cfg.grid.empty() ? "-1:1:5,-1:1:5" : c.cfg.grid);
  const double step = c.step();
  Json rows = Json::array();
  std::string csv = "A1,A2,step,via_penner,via_holonomy,relerr,ratio\n";
  double worst = 0.0;
  for (int j = 0; j < grid[1].n; ++j)
    for (int i = 0; i < grid[0].n; ++i) {
      const double a1 = grid[0].at(i), a2 = grid[1].at(j);
      if (a1 == 0.0 && a2 == 0.0) continue;
      const auto r = crosscheck_pullback(mesh, theta, a1, a2, {1, 0}, {0, 1}, step, c.solve());
      rows.push_back({{"A", {a1, a2}},
                      {"step", step},
                      {"via_penner", r.via_penner},
                      {"via_holonomy", r.via_holonomy},
                      {"relerr", r.relerr},
                      {"ratio", r.ratio}});
      csv += fmt(a1) + "," + fmt(a2) + "," + fmt(step) + "," + fmt(r.via_penner) + "," + fmt(r.via_holonomy) + "," +
             fmt(r.relerr) + "," + fmt(r.ratio) + "\n";
      worst = std::max(worst, r.relerr);
    }
  Json doc;
  doc["rows"] = rows;
  doc["max_relerr"] = worst;
  c.emit(doc, false);
  if (!c.cfg.csv.empty()) write_text(c.cfg.csv, csv);
  c.line("points", rows.size());
  c.line("max_relerr", fmt(worst));
  if (!(worst <= c.cfg.max_relerr))
    throw Error(ErrorCode::CheckFailed, "relative error " + fmt(worst) + " exceeds " + fmt(c.cfg.max_relerr));
  return kOk;
}

inline int cmd_tri_example(const Context& c) {
  const auto mesh = c.mesh();
  const auto t = c.theta_triple();
  const auto r = euclidean_pullback(mesh, t, c.solve());
  Json doc;
  doc["theta"] = {t[0], t[1], t[2]};
  doc["alpha"] = r.point.alpha;
  doc["beta"] = r.point.beta;
  doc["matrix"] = matrix_json(r.matrix);
  doc["off_diagonal"] = r.off_diagonal;
  doc["det"] = r.det;
  c.emit(doc, false);
  c.line("alpha", fmt(r.point.alpha));
  c.line("beta", fmt(r.point.beta));
  c.line("off_diagonal", fmt(r.off_diagonal));
  c.line("det", fmt(r.det));
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circle patterns on tori: solve, develop, period maps and symplectic checks", "circlepat"};
  app.require_subcommand(1);
  Config cfg;

  auto mesh_opts = [&](CLI::App* s) {
    auto* m = s->add_option("--mesh", cfg.mesh_path, "mesh JSON file")->check(CLI::ExistingFile);
    s->add_option("--p", cfg.p, "lattice width")->excludes(m)->check(CLI::Range(2, 1000));
    s->add_option("--q", cfg.q, "lattice height")->excludes(m)->check(CLI::Range(2, 1000));
  };
  auto angle_opts = [&](CLI::App* s) {
    auto* t = s->add_option("--theta", cfg.theta, "class angles a,b,c (pi/3 style allowed)");
    s->add_option("--theta-file", cfg.theta_file, "angle JSON file")->excludes(t)->check(CLI::ExistingFile);
  };
  auto solve_opts = [&](CLI::App* s) { s->add_option("--tol", cfg.tol, "Newton tolerance"); };
  auto out_opt = [&](CLI::App* s) { s->add_option("--out", cfg.out, "output JSON path"); };

  std::vector<std::pair<CLI::App*, std::function<int(const Context&)>>> cmds;
  auto add = [&](const char* name, const char* help, std::function<int(const Context&)> fn) {
    auto* s = app.add_subcommand(name, help);
    cmds.emplace_back(s, std::move(fn));
    return s;
  };

  auto* gen = add("mesh-gen", "write a p x q lattice torus", cmd_mesh_gen);
  gen->add_option("--p", cfg.p, "lattice width")->check(CLI::Range(2, 1000));
  gen->add_option("--q", cfg.q, "lattice height")->check(CLI::Range(2, 1000));
  out_opt(gen);

  for (auto [name, help, fn] : {std::tuple{"solve", "solve radii and write the pattern", cmd_solve},
                                {"develop", "develop the pattern, optionally as SVG", cmd_develop},
                                {"periodmap", "discrete period map and energy checks", cmd_periodmap}}) {
    auto* s = add(name, help, fn);
    mesh_opts(s);
    angle_opts(s);
    solve_opts(s);
    out_opt(s);
    s->add_option("--A", cfg.A, "holonomy stretch A1,A2");
    if (std::string(name) == "develop") {
      s->add_option("--svg", cfg.svg, "SVG output path");
      s->add_option("--tile", cfg.tile, "k x k copies of the fundamental domain")->check(CLI::Range(1, 16));
    }
  }

  auto* sym = add("symplectic", "lambda = 2(1 - det h_X) over a grid", cmd_symplectic);
  auto* cc = add("crosscheck", "Penner form against the holonomy formula over a grid", cmd_crosscheck);
  for (auto* s : {sym, cc}) {
    mesh_opts(s);
    angle_opts(s);
    solve_opts(s);
    out_opt(s);
    s->add_option("--grid", cfg.grid, "x0:x1:n,y0:y1:n");
    s->add_option("--csv", cfg.csv, "CSV output path");
  }
  cc->add_option("--step", cfg.step, "finite-difference step");
  cc->add_option("--max-relerr", cfg.max_relerr, "allowed relative error");

  auto* wind = add("winding", "degree of the half-circle loop in moduli space", cmd_winding);
  mesh_opts(wind);
  angle_opts(wind);
  solve_opts(wind);
  out_opt(wind);
  wind->add_option("--R", cfg.R, "radius in the (A1, A2) plane");
  wind->add_option("--samples", cfg.samples, "samples on the half circle")->check(CLI::Range(64, 100000));

  auto* tri = add("tri-example", "Penner form at the Euclidean point of a lattice torus", cmd_tri_example);
  tri->add_option("--p", cfg.p, "lattice width")->check(CLI::Range(2, 1000));
  tri->add_option("--q", cfg.q, "lattice height")->check(CLI::Range(2, 1000));
  tri->add_option("--theta", cfg.theta, "class angles a,b,c");
  solve_opts(tri);
  out_opt(tri);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  Context ctx{cfg, out};
  for (auto& [sub, fn] : cmds) {
    if (!sub->parsed()) continue;
    try {
      return fn(ctx);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code(e.code());
    }
  }
  return kValidation;
}

}  // namespace circlepat::cli
