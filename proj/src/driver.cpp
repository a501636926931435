#include "mhd/driver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mhd {

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    int v = std::stoi(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad integer list: " + s);
    out.push_back(v);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s;
}

std::vector<std::string> split_strings(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void set_config_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "problem") c.problem = value;
  else if (key == "mesh") c.mesh = value;
  else if (key == "resolutions") c.resolutions = split_ints(value);
  else if (key == "element") c.element = value;
  else if (key == "tol") c.tol = std::stod(value);
  else if (key == "max-iter") c.max_iter = std::stoi(value);
  else if (key == "out") c.out_dir = value;
  else if (key == "format") c.formats = split_strings(value);
  else if (key == "omega") c.omega = value;
  else if (key == "initial-guess") c.initial_guess = value;
  else if (key == "graded-base") c.graded_base = std::stoi(value);
  else if (key == "dump-matrix") c.dump_matrix = value == "1" || value == "true";
  else throw std::invalid_argument("unknown configuration key: " + key);
}

std::string get_config_key(const RunConfig& c, const std::string& key) {
  if (key == "problem") return c.problem;
  if (key == "mesh") return c.mesh;
  if (key == "resolutions") return join_ints(c.resolutions);
  if (key == "element") return c.element;
  if (key == "tol") {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", c.tol);
    return buf;
  }
  if (key == "max-iter") return std::to_string(c.max_iter);
  if (key == "out") return c.out_dir;
  if (key == "format") return join_strings(c.formats);
  if (key == "omega") return c.omega;
  if (key == "initial-guess") return c.initial_guess;
  if (key == "graded-base") return std::to_string(c.graded_base);
  if (key == "dump-matrix") return c.dump_matrix ? "1" : "0";
  throw std::invalid_argument("unknown configuration key: " + key);
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("configuration line without '=': " + line);
    set_config_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  static const char* keys[] = {"dump-matrix", "element",       "format",
                               "graded-base", "initial-guess", "max-iter",
                               "mesh",        "omega",         "out",
                               "problem",     "resolutions",   "tol"};
  std::string s;
  for (const char* key : keys) s += std::string(key) + "=" + get_config_key(c, key) + "\n";
  return s;
}

void validate_config(const RunConfig& c) {
  if (c.problem != "example41" && c.problem != "example42")
    throw std::invalid_argument("problem must be example41 or example42");
  if (c.mesh != "square" && c.mesh != "lshape" && c.mesh != "lshape-graded")
    throw std::invalid_argument("mesh must be square, lshape or lshape-graded");
  if (c.element != "nedelec1" && c.element != "nedelec2")
    throw std::invalid_argument("element must be nedelec1 or nedelec2");
  if (c.resolutions.empty())
    throw std::invalid_argument("resolutions must be nonempty");
  int prev = std::numeric_limits<int>::min();
  for (int r : c.resolutions) {
    int lower = c.mesh == "lshape-graded" ? 0 : 1;
    if (r < lower) throw std::invalid_argument("invalid resolution " + std::to_string(r));
    if (r <= prev) throw std::invalid_argument("resolutions must be strictly increasing");
    prev = r;
  }
  if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("max-iter must be at least 1");
  for (const std::string& f : c.formats)
    if (f != "csv" && f != "markdown")
      throw std::invalid_argument("format must be csv or markdown");
  if (c.omega != "standard" && c.omega != "paper")
    throw std::invalid_argument("omega must be standard or paper");
  if (c.initial_guess != "auto" && c.initial_guess != "zero" &&
      c.initial_guess != "decoupled")
    throw std::invalid_argument("initial-guess must be auto, zero or decoupled");
  if (c.graded_base < 1) throw std::invalid_argument("graded-base must be >= 1");
  if (c.mesh == "square" && c.problem == "example42")
    throw std::invalid_argument("example42 is posed on the L-shape domain");
  if (c.mesh != "square" && c.problem == "example41")
    throw std::invalid_argument("example41 is posed on the unit square");
}

ElementKind element_kind(const RunConfig& c) {
  return c.element == "nedelec2" ? ElementKind::Nedelec2Low : ElementKind::Nedelec1Low;
}

MeshFamilyKind mesh_family(const RunConfig& c) {
  if (c.mesh == "square") return MeshFamilyKind::UnitSquareUniform;
  if (c.mesh == "lshape") return MeshFamilyKind::LShapeUniform;
  return MeshFamilyKind::LShapeGraded;
}

BenchmarkProblem make_problem(const RunConfig& c) {
  CornerAngle angle =
      c.omega == "paper" ? CornerAngle::PaperPrinted : CornerAngle::Standard;
  return problem_by_name(c.problem, angle);
}

NewtonConfig newton_config(const RunConfig& c) {
  NewtonConfig nc;
  nc.tol = c.tol;
  nc.max_iter = c.max_iter;
  if (c.initial_guess == "zero") {
    nc.initial_guess = InitialGuess::Zero;
  } else if (c.initial_guess == "decoupled") {
    nc.initial_guess = InitialGuess::DecoupledLinear;
  } else {
    // mild data starts from zero; the singular benchmark from the linear seed
    nc.initial_guess = c.problem == "example42" ? InitialGuess::DecoupledLinear
                                                : InitialGuess::Zero;
  }
  if (c.dump_matrix && !c.out_dir.empty()) nc.dump_dir = c.out_dir;
  return nc;
}

namespace {

void ensure_out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) std::filesystem::create_directories(c.out_dir);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
}

std::string file_stem(const RunConfig& c, const std::string& command) {
  return command + "_" + c.problem + "_" + c.element + "_" + c.mesh;
}

}  // namespace

std::vector<SolveOutcome> run_solve(const RunConfig& c) {
  validate_config(c);
  ensure_out_dir(c);
  BenchmarkProblem problem = make_problem(c);
  NewtonConfig nc = newton_config(c);
  std::vector<SolveOutcome> outcomes;
  for (int res : c.resolutions) {
    Mesh mesh = family_mesh(mesh_family(c), res, c.graded_base);
    MhdSpaces spaces = make_spaces(mesh, element_kind(c));
    NewtonResult result = newton_solve(problem, spaces, nc);
    SolveOutcome outcome{res, result.iterations, result.increments};
    outcomes.push_back(outcome);
    if (!c.out_dir.empty()) {
      std::string stem =
          c.out_dir + "/" + file_stem(c, "solve") + "_" + std::to_string(res);
      std::ostringstream coeffs;
      char buf[64];
      auto dump_block = [&](const char* name, const std::vector<double>& v) {
        coeffs << name << ' ' << v.size() << '\n';
        for (double x : v) {
          std::snprintf(buf, sizeof buf, "%.17g\n", x);
          coeffs << buf;
        }
      };
      dump_block("u", result.state.u.coeffs);
      dump_block("p", result.state.p.coeffs);
      dump_block("b", result.state.b.coeffs);
      dump_block("r", result.state.r.coeffs);
      write_file(stem + "_coeffs.txt", coeffs.str());
      write_file(stem + "_field.txt", sample_field_grid(result.state, spaces));
    }
  }
  return outcomes;
}

namespace {

ResultTable table_from_convergence(const ConvergenceReport& report) {
  ResultTable t;
  t.title = "convergence " + report.problem + " " + report.element + " " + report.family;
  t.columns = {"M",           "h",           "dofs",        "err_h1_u",
               "rate_h1_u",   "err_l2_p",    "rate_l2_p",   "err_curl_b",
               "rate_curl_b", "err_h1_r",    "err_l2_u",    "err_hm1_b"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ErrorReport& e = report.entries[i];
    const ErrorReport* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    t.rows.push_back({static_cast<double>(e.resolution), e.h,
                      static_cast<double>(e.dofs), e.h1semi_u,
                      prev ? rate_between(prev->h1semi_u, e.h1semi_u) : nan, e.l2_p,
                      prev ? rate_between(prev->l2_p, e.l2_p) : nan, e.hcurl_b,
                      prev ? rate_between(prev->hcurl_b, e.hcurl_b) : nan, e.h1_r,
                      e.l2_u, e.hminus1_b});
  }
  t.csv = convergence_csv(report);
  t.markdown = convergence_markdown(report);
  return t;
}

ResultTable table_from_projection(const ProjectionReport& report) {
  ResultTable t;
  t.title = "projections " + report.problem + " " + report.element;
  t.columns = {"M",
               "h",
               "err_curl_xib",
               "rate_curl_xib",
               "err_hm1_xib",
               "rate_hm1_xib",
               "err_hm1_curl_xib",
               "rate_hm1_curl_xib",
               "err_h1_xiu",
               "rate_h1_xiu",
               "err_l2_xiu",
               "rate_l2_xiu",
               "r_gap"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ProjectionEntry& e = report.entries[i];
    const ProjectionEntry* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    t.rows.push_back(
        {static_cast<double>(e.resolution), e.h, e.hcurl_xib,
         prev ? rate_between(prev->hcurl_xib, e.hcurl_xib) : nan, e.hminus1_xib,
         prev ? rate_between(prev->hminus1_xib, e.hminus1_xib) : nan,
         e.hminus1_curl_xib,
         prev ? rate_between(prev->hminus1_curl_xib, e.hminus1_curl_xib) : nan,
         e.stokes_h1_xiu, prev ? rate_between(prev->stokes_h1_xiu, e.stokes_h1_xiu) : nan,
         e.stokes_l2_xiu, prev ? rate_between(prev->stokes_l2_xiu, e.stokes_l2_xiu) : nan,
         e.r_gap});
  }
  t.csv = projection_csv(report);
  t.markdown = projection_markdown(report);
  return t;
}

}  // namespace

ResultTable run_convergence(const RunConfig& c) {
  validate_config(c);
  if (c.resolutions.size() < 2)
    throw std::invalid_argument("convergence needs at least 2 resolutions");
  ensure_out_dir(c);
  BenchmarkProblem problem = make_problem(c);
  ConvergenceReport report =
      convergence_study(problem, mesh_family(c), c.resolutions, element_kind(c),
                        newton_config(c), c.graded_base);
  report.problem = c.problem;
  ResultTable table = table_from_convergence(report);
  write_table_files(c, table, file_stem(c, "convergence"));
  if (report.aborted)
    throw std::runtime_error("convergence study aborted: " + report.abort_reason);
  return table;
}

ResultTable run_projections(const RunConfig& c) {
  validate_config(c);
  ensure_out_dir(c);
  BenchmarkProblem problem = make_problem(c);
  ProjectionReport report =
      projection_study(problem, c.resolutions, element_kind(c));
  report.problem = c.problem;
  ResultTable table = table_from_projection(report);
  write_table_files(c, table, file_stem(c, "projections"));
  return table;
}

void run_export_mesh(const RunConfig& c, const std::string& path) {
  validate_config(c);
  Mesh mesh = family_mesh(mesh_family(c), c.resolutions.front(), c.graded_base);
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh_text(mesh, os);
}

std::vector<std::string> write_table_files(const RunConfig& c, const ResultTable& table,
                                           const std::string& stem) {
  std::vector<std::string> written;
  if (c.out_dir.empty()) return written;
  for (const std::string& format : c.formats) {
    std::string path = c.out_dir + "/" + stem + (format == "csv" ? ".csv" : ".md");
    write_file(path, format == "csv" ? table.csv : table.markdown);
    written.push_back(path);
  }
  return written;
}

}  // namespace mhd
