#include <uipdg/runner.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace uipdg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// rate column: "-" when undefined (first level)
std::string fmt_rate(double v) {
  return std::isfinite(v) ? fmt("%.4f", v) : std::string("-");
}

// ---- configuration ----------------------------------------------------

[[noreturn]] void bad_key(const std::string& key, const char* what) {
  throw ConfigError("config key \"" + key + "\" " + what);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& prefix) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown config key \"" + prefix + item.key() + "\"");
}

double get_number(const json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) bad_key(key, "must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer()) bad_key(key, "must be an integer");
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) bad_key(key, "must be a boolean");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) bad_key(key, "must be a string");
  return j.at(key).get<std::string>();
}

// single integer or array of integers
std::vector<int> get_int_list(const json& j, const std::string& key,
                              std::vector<int> dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array()) bad_key(key, "must be an integer or array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer())
      bad_key(key, "must contain only integers");
    out.push_back(e.get<int>());
  }
  if (out.empty()) bad_key(key, "must not be empty");
  return out;
}

SchemeKind parse_scheme(const std::string& s) {
  if (s == "uip") return SchemeKind::UIP;
  if (s == "swip") return SchemeKind::SWIP;
  if (s == "ipf" || s == "ip_f") return SchemeKind::IPF;
  throw ConfigError("unknown scheme \"" + s +
                    "\" (expected uip, swip, or ipf)");
}

std::vector<SchemeKind> get_scheme_list(const json& j, const std::string& key,
                                        std::vector<SchemeKind> dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_string()) return {parse_scheme(v.get<std::string>())};
  if (!v.is_array()) bad_key(key, "must be a string or array of strings");
  std::vector<SchemeKind> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad_key(key, "must contain only strings");
    out.push_back(parse_scheme(e.get<std::string>()));
  }
  if (out.empty()) bad_key(key, "must not be empty");
  return out;
}

int resolved_levels(const RunConfig& cfg) {
  if (cfg.levels > 0) return cfg.levels;
  if (cfg.command == "convergence" || cfg.command == "compare") return 4;
  return 1;
}

// scheme/epsilon product honoring the symmetric-only restriction of swip
std::vector<std::pair<SchemeKind, int>> scheme_runs(const RunConfig& cfg) {
  std::vector<std::pair<SchemeKind, int>> runs;
  for (SchemeKind s : cfg.schemes)
    for (int eps : cfg.epsilons) {
      if (s == SchemeKind::SWIP && eps != 1) continue;
      runs.emplace_back(s, eps);
    }
  return runs;
}

// ---- output helpers ---------------------------------------------------

const char* tau_form_name(TauForm f) {
  return f == TauForm::FaceArea ? "face_area" : "diameter";
}

void write_metadata(std::ostream& out, const RunConfig& cfg,
                    const TestCase& tc) {
  out << "# uipdg " << cfg.command << "\n";
  out << "# case=" << tc.name;
  if (tc.name == "test1") out << " lambda=" << fmt("%.17g", tc.lambda);
  out << "\n";
  out << "# alpha0=" << fmt("%.17g", cfg.alpha0)
      << " tau_form=" << tau_form_name(cfg.tau_form)
      << " trace_const_sq=(k+1)(k+2)/2\n";
  out << "# tau: alpha0*trace_const_sq*kappa_n*"
      << (cfg.tau_form == TauForm::FaceArea ? "|F|/|E|" : "1/h_E") << "\n";
  out << "# normalizations: uip omega_i=tau_i/(tau1+tau2) "
         "rho0=tau1*tau2/(tau1+tau2) rho1=1/(tau1+tau2); "
         "swip omega_i=kappa_i/(kappa1+kappa2) "
         "rho0=alpha0*trace_const_sq*(kappa1*kappa2/(kappa1+kappa2))"
         "*mean(|F|/|E|) rho1=0 epsilon=1 only; "
         "ipf omega=(1/2,1/2) rho0=(tau1+tau2)/4 rho1=1/(tau1+tau2)\n";
  out << "# mesh: structured n0=" << cfg.n << " levels=" << resolved_levels(cfg)
      << " partition=quadrant diagonal=alternate\n";
  out << "# solver: tol=" << fmt("%.3e", cfg.solver_tol)
      << " max_iterations=" << cfg.max_iterations << "\n";
  out << "# seed=" << cfg.seed << "\n";
  if (tc.kellogg) {
    const KelloggAssignment& a = *tc.kellogg;
    out << "# kellogg: assignment_shift=" << a.shift << " raw_defects=["
        << fmt("%.3e", a.raw_defects[0]) << "," << fmt("%.3e", a.raw_defects[1])
        << "," << fmt("%.3e", a.raw_defects[2]) << ","
        << fmt("%.3e", a.raw_defects[3])
        << "] refined_defect=" << fmt("%.3e", a.refined_defect) << "\n";
  }
  out << "# note: time_s is wall time and varies between runs; all other "
         "fields are deterministic for a fixed config and seed\n";
}

void write_rows(std::ostream& out, const std::vector<LevelRow>& rows) {
  out << "scheme,epsilon,k,level,h,dofs,err_l2,ecr_l2,err_energy,ecr_energy,"
         "solver_iters,residual,time_s\n";
  for (const LevelRow& r : rows) {
    out << scheme_name(r.scheme) << ',' << r.epsilon << ',' << r.degree << ','
        << r.level << ',' << fmt("%.8e", r.err.h) << ',' << r.err.dofs << ','
        << fmt("%.8e", r.err.err_l2) << ',' << fmt_rate(r.err.ecr_l2) << ','
        << fmt("%.8e", r.err.err_energy) << ',' << fmt_rate(r.err.ecr_energy)
        << ',' << r.solver.iterations << ',' << fmt("%.3e", r.solver.residual)
        << ',' << fmt("%.3f", r.seconds) << '\n';
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("could not open " + path.string() + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write to " + path.string() + " failed");
}

void write_solution_dump(const fs::path& path, const RunConfig& cfg,
                         const TestCase& tc, const DGSpace& space,
                         const DGFunction& u) {
  std::ofstream out = open_out(path);
  const int nk = space.nk();
  out << "UIPDG-SOLUTION 1\n";
  out << "case " << tc.name << "\n";
  out << "scheme " << scheme_name(cfg.schemes[0]) << " epsilon "
      << cfg.epsilons[0] << " degree " << cfg.degrees[0] << "\n";
  out << "elements " << space.mesh().num_triangles() << " coeffs_per_element "
      << nk << "\n";
  for (int e = 0; e < space.mesh().num_triangles(); ++e) {
    out << e;
    for (int i = 0; i < nk; ++i)
      out << ' ' << fmt("%.17g", u.coeffs[e * nk + i]);
    out << '\n';
  }
  finish_out(out, path);
}

void write_grid_samples(const fs::path& path, const Discretization& d,
                        const DGFunction& u, int grid_n) {
  std::ofstream out = open_out(path);
  out << "x,y,u_h\n";
  const Mesh& mesh = *d.mesh;
  BoundingBox box{mesh.vertices[0].x(), mesh.vertices[0].y(),
                  mesh.vertices[0].x(), mesh.vertices[0].y()};
  for (const Vec2& v : mesh.vertices) {
    box.xmin = std::min(box.xmin, v.x());
    box.ymin = std::min(box.ymin, v.y());
    box.xmax = std::max(box.xmax, v.x());
    box.ymax = std::max(box.ymax, v.y());
  }
  PointLocator locator(mesh);
  for (int iy = 0; iy < grid_n; ++iy) {
    const double y = box.ymin + box.height() * iy / (grid_n - 1);
    for (int ix = 0; ix < grid_n; ++ix) {
      const double x = box.xmin + box.width() * ix / (grid_n - 1);
      Vec2 ref;
      const int e = locator.locate(Vec2(x, y), ref);
      const double uh =
          e < 0 ? std::numeric_limits<double>::quiet_NaN()
                : eval(*d.space, u, e, ref);
      out << fmt("%.10g", x) << ',' << fmt("%.10g", y) << ','
          << fmt("%.10e", uh) << '\n';
    }
  }
  finish_out(out, path);
}

// ---- subcommands ------------------------------------------------------

SolveOptions solver_options(const RunConfig& cfg) {
  SolveOptions o;
  o.tol = cfg.solver_tol;
  o.max_iter = cfg.max_iterations;
  return o;
}

int execute_mesh(const RunConfig& cfg) {
  Mesh mesh =
      generate_structured(cfg.mesh_n, cfg.mesh_domain, cfg.mesh_partition);
  for (int r = 0; r < cfg.mesh_refinements; ++r) mesh = refine_uniform(mesh);
  validate(mesh);
  const Skeleton skeleton = build_skeleton(mesh);
  fs::path path(cfg.mesh_output);
  if (path.is_relative()) path = fs::path(cfg.out_dir) / path;
  write_mesh_file(mesh, path.string());
  std::cout << "mesh: " << mesh.num_vertices() << " vertices, "
            << mesh.num_triangles() << " triangles, "
            << skeleton.faces.size() << " faces ("
            << skeleton.interior.size() << " interior) -> " << path.string()
            << "\n";
  return 0;
}

int execute_run(const RunConfig& cfg, const TestCase& tc) {
  const SchemeSpec spec{cfg.schemes[0], cfg.epsilons[0], cfg.alpha0,
                        cfg.degrees[0]};
  validate(spec);
  Discretization d = discretize(tc, spec, cfg.tau_form, cfg.n);
  if (cfg.self_check) {
    run_self_check(d, cfg.seed);
    std::cout << "self_check: ok\n";
  }
  const CaseSolution sol = solve_primal(d, tc, spec, solver_options(cfg));
  LevelRow row;
  row.scheme = spec.scheme;
  row.epsilon = spec.epsilon;
  row.degree = spec.degree;
  row.err = measure(d, tc, sol.u);
  row.solver = sol.solver;
  row.seconds = sol.seconds;
  const OvershootReport os = sample_overshoot(d, tc, sol.u, cfg.grid_samples);

  const fs::path out_dir(cfg.out_dir);
  {
    std::ofstream out = open_out(out_dir / "run.csv");
    write_metadata(out, cfg, tc);
    out << "# overshoot: grid=" << cfg.grid_samples << "x" << cfg.grid_samples
        << " max_overshoot=" << fmt("%.6e", os.max_overshoot)
        << " min_deficit=" << fmt("%.6e", os.min_deficit)
        << " measure=" << fmt("%.6e", os.measure()) << "\n";
    write_rows(out, {row});
    finish_out(out, out_dir / "run.csv");
  }
  write_solution_dump(out_dir / "solution.txt", cfg, tc, *d.space, sol.u);
  write_grid_samples(out_dir / "grid.csv", d, sol.u, cfg.grid_samples);

  std::cout << "run: " << scheme_name(spec.scheme) << " epsilon "
            << spec.epsilon << " k " << spec.degree << " n " << cfg.n
            << " dofs " << row.err.dofs << "\n";
  std::cout << "errors: l2 " << fmt("%.6e", row.err.err_l2) << " energy "
            << fmt("%.6e", row.err.err_energy) << " augmented "
            << fmt("%.6e", row.err.err_augmented) << "\n";
  std::cout << "solver: " << row.solver.method << " iters "
            << row.solver.iterations << " residual "
            << fmt("%.3e", row.solver.residual) << "\n";
  std::cout << "overshoot: max_overshoot " << fmt("%.6e", os.max_overshoot)
            << " min_deficit " << fmt("%.6e", os.min_deficit) << " measure "
            << fmt("%.6e", os.measure()) << "\n";
  std::cout << "wrote " << (out_dir / "run.csv").string() << ", "
            << (out_dir / "solution.txt").string() << ", "
            << (out_dir / "grid.csv").string() << "\n";
  return 0;
}

int execute_ladder(const RunConfig& cfg, const TestCase& tc) {
  const int levels = resolved_levels(cfg);
  const SolveOptions opts = solver_options(cfg);
  std::vector<LevelRow> rows;
  for (int k : cfg.degrees)
    for (const auto& [scheme, eps] : scheme_runs(cfg)) {
      const SchemeSpec spec{scheme, eps, cfg.alpha0, k};
      validate(spec);
      std::vector<LevelRow> ladder =
          convergence_study(tc, spec, cfg.tau_form, cfg.n, levels, opts);
      const LevelRow& last = ladder.back();
      std::cout << scheme_name(scheme) << " epsilon " << eps << " k " << k
                << ": final h " << fmt("%.4e", last.err.h) << " err_energy "
                << fmt("%.6e", last.err.err_energy) << " ecr_energy "
                << fmt_rate(last.err.ecr_energy) << " ecr_l2 "
                << fmt_rate(last.err.ecr_l2) << "\n";
      rows.insert(rows.end(), ladder.begin(), ladder.end());
    }
  const fs::path path =
      fs::path(cfg.out_dir) /
      (cfg.command == "compare" ? "compare.csv" : "convergence.csv");
  std::ofstream out = open_out(path);
  write_metadata(out, cfg, tc);
  write_rows(out, rows);
  finish_out(out, path);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int execute_equivalence(const RunConfig& cfg, const TestCase& tc) {
  const int levels = resolved_levels(cfg);
  const fs::path path = fs::path(cfg.out_dir) / "equivalence.csv";
  std::ofstream out = open_out(path);
  write_metadata(out, cfg, tc);
  out << "epsilon,k,level,h,dofs,skeleton_dofs,discrepancy\n";
  double worst = 0.0;
  for (int k : cfg.degrees)
    for (int eps : cfg.epsilons)
      for (int level = 0; level < levels; ++level) {
        const SchemeSpec spec{SchemeKind::UIP, eps, cfg.alpha0, k};
        validate(spec);
        Discretization d = discretize(tc, spec, cfg.tau_form, cfg.n << level);
        SolveOptions opts = solver_options(cfg);
        opts.symmetric = eps == 1;
        const CaseSolution direct = solve_primal(d, tc, spec, opts);
        const CondensedSystem cs = assemble_hip(
            *d.space, d.diffusion, d.coeffs, spec, tc.source, tc.boundary);
        SolveReport skeleton_report;
        const SkeletonFunction uhat =
            solve_condensed(*d.space, cs, opts, skeleton_report);
        const DGFunction recovered =
            recover_element_solution(*d.space, cs, uhat);
        const double scale =
            std::max(direct.u.coeffs.cwiseAbs().maxCoeff(), 1e-300);
        const double disc =
            (direct.u.coeffs - recovered.coeffs).cwiseAbs().maxCoeff() / scale;
        worst = std::max(worst, disc);
        double h = 0.0;
        for (int e = 0; e < d.mesh->num_triangles(); ++e)
          h = std::max(h, d.mesh->diameter(e));
        out << eps << ',' << k << ',' << level << ',' << fmt("%.8e", h) << ','
            << d.space->num_dofs() << ',' << cs.S.n << ',' << fmt("%.3e", disc)
            << '\n';
        std::cout << "equivalence: epsilon " << eps << " k " << k << " n "
                  << (cfg.n << level) << " discrepancy " << fmt("%.3e", disc)
                  << "\n";
      }
  finish_out(out, path);
  std::cout << "wrote " << path.string() << "\n";
  if (worst > 1e-8) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "hybridized and direct solutions differ by %.3e relative "
                  "(limit 1e-8)",
                  worst);
    throw CheckError(msg);
  }
  return 0;
}

} // namespace

// ---- SplitMix ---------------------------------------------------------

std::uint64_t SplitMix::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix::uniform() {
  return 2.0 * ((next() >> 11) * 0x1.0p-53) - 1.0;
}

// ---- configuration ----------------------------------------------------

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j,
             {"case", "lambda", "schemes", "epsilon", "degree", "n", "levels",
              "alpha0", "tau_form", "solver_tol", "max_iterations",
              "grid_samples", "seed", "self_check", "out_dir", "mesh"},
             "");

  RunConfig cfg;
  cfg.case_name = get_string(j, "case", cfg.case_name);
  if (j.contains("lambda") && cfg.case_name != "test1")
    throw ConfigError("config key \"lambda\" applies to case test1 only");
  cfg.lambda = get_number(j, "lambda", cfg.lambda);
  cfg.schemes = get_scheme_list(j, "schemes", cfg.schemes);
  cfg.epsilons = get_int_list(j, "epsilon", cfg.epsilons);
  cfg.degrees = get_int_list(j, "degree", cfg.degrees);
  cfg.n = get_int(j, "n", cfg.n);
  cfg.levels = get_int(j, "levels", cfg.levels);
  cfg.alpha0 = get_number(j, "alpha0", cfg.alpha0);
  const std::string tf = get_string(j, "tau_form", "face_area");
  if (tf == "face_area")
    cfg.tau_form = TauForm::FaceArea;
  else if (tf == "diameter")
    cfg.tau_form = TauForm::Diameter;
  else
    throw ConfigError("config key \"tau_form\" must be \"face_area\" or "
                      "\"diameter\"");
  cfg.solver_tol = get_number(j, "solver_tol", cfg.solver_tol);
  cfg.max_iterations = get_int(j, "max_iterations", cfg.max_iterations);
  cfg.grid_samples = get_int(j, "grid_samples", cfg.grid_samples);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      bad_key("seed", "must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.self_check = get_bool(j, "self_check", cfg.self_check);
  cfg.out_dir = get_string(j, "out_dir", cfg.out_dir);

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    if (!m.is_object()) bad_key("mesh", "must be an object");
    check_keys(m, {"n", "partition", "refinements", "domain", "output"},
               "mesh.");
    cfg.mesh_n = get_int(m, "n", cfg.mesh_n);
    const std::string part = get_string(m, "partition", "quadrant");
    if (part == "single")
      cfg.mesh_partition = Partition::Single;
    else if (part == "quadrant")
      cfg.mesh_partition = Partition::Quadrant;
    else
      throw ConfigError("config key \"mesh.partition\" must be \"single\" or "
                        "\"quadrant\"");
    cfg.mesh_refinements = get_int(m, "refinements", 0);
    if (m.contains("domain")) {
      const json& dom = m.at("domain");
      if (!dom.is_array() || dom.size() != 4)
        bad_key("mesh.domain", "must be [xmin, ymin, xmax, ymax]");
      for (const auto& e : dom)
        if (!e.is_number()) bad_key("mesh.domain", "must contain numbers");
      cfg.mesh_domain = {dom[0].get<double>(), dom[1].get<double>(),
                         dom[2].get<double>(), dom[3].get<double>()};
    }
    cfg.mesh_output = get_string(m, "output", cfg.mesh_output);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("could not open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
  static const std::set<std::string> commands = {"run", "convergence",
                                                 "compare", "equivalence",
                                                 "mesh"};
  if (!commands.count(cfg.command))
    throw ConfigError("unknown command \"" + cfg.command + "\"");
  if (cfg.case_name != "test1" && cfg.case_name != "kellogg")
    throw ConfigError("config key \"case\" must be \"test1\" or \"kellogg\"");
  if (!(cfg.lambda > 0.0)) bad_key("lambda", "must be positive");
  for (int eps : cfg.epsilons)
    if (eps != -1 && eps != 0 && eps != 1)
      bad_key("epsilon", "must contain only -1, 0, or 1");
  for (int k : cfg.degrees)
    if (k < 1 || k > 8) bad_key("degree", "must be between 1 and 8");
  if (cfg.n < 2 || cfg.n % 2 != 0)
    bad_key("n", "must be even and at least 2 (subdomain interfaces must "
                 "align with mesh lines)");
  if (cfg.levels != -1 && cfg.levels < 1)
    bad_key("levels", "must be at least 1");
  if (!(cfg.alpha0 > 0.0)) bad_key("alpha0", "must be positive");
  if (cfg.alpha0 <= 6.0) {
    if (!cfg.allow_low_penalty)
      throw ConfigError(
          "alpha0 = " + fmt("%g", cfg.alpha0) +
          " is at or below the coercivity threshold 6; pass "
          "--allow-low-penalty to run anyway");
    std::cerr << "warning: alpha0 = " << fmt("%g", cfg.alpha0)
              << " is at or below the coercivity threshold 6; the discrete "
                 "system may be indefinite\n";
  }
  if (!(cfg.solver_tol > 0.0) || cfg.solver_tol > 0.1)
    bad_key("solver_tol", "must lie in (0, 0.1]");
  if (cfg.max_iterations < 1) bad_key("max_iterations", "must be positive");
  if (cfg.grid_samples < 2 || cfg.grid_samples > 4096)
    bad_key("grid_samples", "must be between 2 and 4096");
  if (cfg.command == "run" &&
      (cfg.schemes.size() != 1 || cfg.epsilons.size() != 1 ||
       cfg.degrees.size() != 1))
    throw ConfigError("command run expects a single scheme, epsilon, and "
                      "degree");
  if (cfg.command == "convergence" || cfg.command == "compare") {
    if (scheme_runs(cfg).empty())
      throw ConfigError("no scheme/epsilon combinations to run (swip is "
                        "restricted to epsilon = 1)");
  }
  if (cfg.command == "equivalence")
    for (SchemeKind s : cfg.schemes)
      if (s != SchemeKind::UIP)
        throw ConfigError("command equivalence compares the hybridized "
                          "formulation against uip; set schemes to uip");
  if (cfg.command == "mesh") {
    if (cfg.mesh_n < 1) bad_key("mesh.n", "must be positive");
    if (cfg.mesh_partition == Partition::Quadrant &&
        (cfg.mesh_n < 2 || cfg.mesh_n % 2 != 0))
      bad_key("mesh.n", "must be even for the quadrant partition");
    if (cfg.mesh_refinements < 0 || cfg.mesh_refinements > 12)
      bad_key("mesh.refinements", "must be between 0 and 12");
    if (!(cfg.mesh_domain.width() > 0.0) || !(cfg.mesh_domain.height() > 0.0))
      bad_key("mesh.domain", "must have positive width and height");
    if (cfg.mesh_output.empty()) bad_key("mesh.output", "must not be empty");
  }
}

TestCase make_case(const RunConfig& cfg) {
  if (cfg.case_name == "test1") return make_contrast_case(cfg.lambda);
  if (cfg.case_name == "kellogg") return make_checkerboard_case();
  throw ConfigError("unknown case '" + cfg.case_name + "'");
}

// ---- pipelines --------------------------------------------------------

Discretization discretize(const TestCase& tc, const SchemeSpec& spec,
                          TauForm form, int n) {
  Discretization d;
  d.mesh = std::make_unique<Mesh>(
      generate_structured(n, tc.domain, tc.partition));
  d.skeleton = std::make_unique<Skeleton>(build_skeleton(*d.mesh));
  d.space = std::make_unique<DGSpace>(*d.mesh, *d.skeleton, spec.degree);
  d.diffusion = tc.diffusion;
  d.diffusion.validate_spd();
  d.coeffs = scheme_face_coefficients(spec.scheme, *d.mesh, *d.skeleton,
                                      d.diffusion, spec.degree, spec.alpha0,
                                      form);
  return d;
}

CaseSolution solve_primal(const Discretization& d, const TestCase& tc,
                          const SchemeSpec& spec, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const LinearSystem sys =
      assemble(*d.space, d.diffusion, d.coeffs, spec, tc.source, tc.boundary);
  SolveOptions o = opts;
  o.symmetric = spec.epsilon == 1;
  CaseSolution out;
  out.u.degree = spec.degree;
  out.u.coeffs = solve(sys.A, sys.b, o, out.solver);
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

ErrorReport measure(const Discretization& d, const TestCase& tc,
                    const DGFunction& u) {
  return compute_errors(*d.space, d.diffusion, d.coeffs, u, tc.exact_value,
                        tc.exact_gradient);
}

double OvershootReport::measure() const {
  return std::max({max_overshoot, -min_deficit, 0.0});
}

OvershootReport sample_overshoot(const Discretization& d, const TestCase& tc,
                                 const DGFunction& u, int grid_n) {
  const Mesh& mesh = *d.mesh;
  PointLocator locator(mesh);
  BoundingBox box{mesh.vertices[0].x(), mesh.vertices[0].y(),
                  mesh.vertices[0].x(), mesh.vertices[0].y()};
  for (const Vec2& v : mesh.vertices) {
    box.xmin = std::min(box.xmin, v.x());
    box.ymin = std::min(box.ymin, v.y());
    box.xmax = std::max(box.xmax, v.x());
    box.ymax = std::max(box.ymax, v.y());
  }
  double uh_min = std::numeric_limits<double>::infinity();
  double uh_max = -uh_min, ex_min = uh_min, ex_max = -uh_min;
  for (int iy = 0; iy < grid_n; ++iy) {
    const double y = box.ymin + box.height() * iy / (grid_n - 1);
    for (int ix = 0; ix < grid_n; ++ix) {
      const Vec2 p(box.xmin + box.width() * ix / (grid_n - 1), y);
      Vec2 ref;
      const int e = locator.locate(p, ref);
      if (e < 0) continue;
      const double uh = eval(*d.space, u, e, ref);
      const double ex = tc.exact_value(p, mesh.triangles[e].subdomain);
      uh_min = std::min(uh_min, uh);
      uh_max = std::max(uh_max, uh);
      ex_min = std::min(ex_min, ex);
      ex_max = std::max(ex_max, ex);
    }
  }
  OvershootReport out;
  out.max_overshoot = uh_max - ex_max;
  out.min_deficit = uh_min - ex_min;
  return out;
}

std::vector<LevelRow> convergence_study(const TestCase& tc,
                                        const SchemeSpec& spec, TauForm form,
                                        int n0, int levels,
                                        const SolveOptions& opts) {
  validate(spec);
  std::vector<LevelRow> rows;
  for (int level = 0; level < levels; ++level) {
    const Discretization d = discretize(tc, spec, form, n0 << level);
    const CaseSolution sol = solve_primal(d, tc, spec, opts);
    LevelRow row;
    row.scheme = spec.scheme;
    row.epsilon = spec.epsilon;
    row.degree = spec.degree;
    row.level = level;
    row.err = measure(d, tc, sol.u);
    row.solver = sol.solver;
    row.seconds = sol.seconds;
    if (!rows.empty()) {
      const ErrorReport& prev = rows.back().err;
      row.err.ecr_l2 = ecr(prev.err_l2, row.err.err_l2, prev.h, row.err.h);
      row.err.ecr_energy =
          ecr(prev.err_energy, row.err.err_energy, prev.h, row.err.h);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const RunConfig& cfg, const TestCase& tc,
               const std::vector<LevelRow>& rows) {
  write_metadata(out, cfg, tc);
  write_rows(out, rows);
}

void run_self_check(const Discretization& d, std::uint64_t seed) {
  SplitMix rng(seed);
  const DGSpace& space = *d.space;

  // identity set of the volume scheme's face coefficients; the exactness
  // identities and coefficient bounds are specific to the transmissibility
  // weighting, so check them on a uip table regardless of the run's scheme
  const FaceCoefficientTable uip = face_coefficients(
      *d.mesh, *d.skeleton, d.diffusion, d.coeffs.degree, d.coeffs.alpha0,
      d.coeffs.tau_form);
  double worst = 0.0;
  for (std::size_t f = 0; f < uip.faces.size(); ++f) {
    const FaceCoefficients& c = uip.faces[f];
    const Face& face = d.skeleton->faces[f];
    worst = std::max(worst, std::abs(c.omega1 + c.omega2 - 1.0));
    worst = std::max(worst,
                     std::abs(c.gamma_n - 0.5 * (c.omega1 - c.omega2)));
    if (face.is_boundary()) {
      worst = std::max(worst, std::abs(c.omega1 - 1.0));
      worst = std::max(worst, std::abs(c.omega2));
      worst = std::max(worst, std::abs(c.rho0 - c.tau1));
      worst = std::max(worst, std::abs(c.rho1));
    } else {
      const double scale = std::max(c.tau1, c.tau2);
      worst = std::max(worst, std::abs(c.omega2 * c.omega2 * c.tau1 +
                                       c.omega1 * c.omega1 * c.tau2 - c.rho0) /
                                  scale);
      worst = std::max(worst,
                       std::abs(c.rho0 * c.rho1 - c.omega1 * c.omega2));
      if (c.rho0 > std::min(c.tau1, c.tau2) * (1.0 + 1e-13)) worst = 1.0;
      if (c.rho1 > (1.0 + 1e-13) / std::max(c.tau1, c.tau2)) worst = 1.0;
    }
  }
  if (worst > 1e-13) {
    throw CheckError("face coefficient identities violated by " +
                     fmt("%.3e", worst));
  }

  std::vector<double> omega1(uip.faces.size());
  for (std::size_t f = 0; f < uip.faces.size(); ++f)
    omega1[f] = uip.faces[f].omega1;

  auto random_dg = [&] {
    DGFunction u;
    u.degree = space.degree();
    u.coeffs.resize(space.num_dofs());
    for (int i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = rng.uniform();
    return u;
  };
  for (int trial = 0; trial < 20; ++trial) {
    VectorDGFunction b{random_dg(), random_dg()};
    const DGFunction phi = random_dg();
    SkeletonFunction phi_hat = zero_skeleton_function(space);
    const int m = space.degree() + 1;
    for (int f : d.skeleton->interior)
      for (int i = 0; i < m; ++i)
        phi_hat.coeffs[f * m + i] = rng.uniform();
    const auto [lhs, rhs] =
        identity_relation_check(space, b, phi, phi_hat, omega1);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    if (std::abs(lhs - rhs) / scale > 1e-12)
      throw CheckError("trace rearrangement identity violated: " +
                       fmt("%.6e", lhs) + " vs " + fmt("%.6e", rhs));
  }

  for (int trial = 0; trial < 5; ++trial) {
    const DGFunction v = random_dg();
    const DGFunction w = random_dg();
    const double direct =
        consistency_form(space, d.diffusion, d.coeffs, v, w);
    const double split =
        consistency_form_decomposed(space, d.diffusion, d.coeffs, v, w);
    const double scale = std::max({std::abs(direct), std::abs(split), 1e-30});
    if (std::abs(direct - split) / scale > 1e-12)
      throw CheckError("consistency-form split mismatch: " +
                       fmt("%.6e", direct) + " vs " + fmt("%.6e", split));
  }
}

int execute(const RunConfig& cfg) {
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("could not create output directory " +
                            cfg.out_dir + ": " + ec.message());
  if (cfg.command == "mesh") return execute_mesh(cfg);
  const TestCase tc = make_case(cfg);
  if (cfg.command == "run") return execute_run(cfg, tc);
  if (cfg.command == "equivalence") return execute_equivalence(cfg, tc);
  return execute_ladder(cfg, tc);
}

} // namespace uipdg
