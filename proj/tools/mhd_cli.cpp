// Command-line front end; talks to the solver only through the C API.

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mhd_c.h"

namespace {

struct ConfigHandle {
  mhd_config* ptr = mhd_config_create();
  ~ConfigHandle() { mhd_config_destroy(ptr); }
};

int report(int status) {
  if (status == MHD_OK) return 0;
  std::fprintf(stderr, "error: %s (%s)\n", mhd_last_error(), mhd_status_string(status));
  return status == MHD_ERR_INVALID_ARGUMENT ? 2 : 1;
}

int set_or_die(mhd_config* cfg, const std::string& key, const std::string& value) {
  return report(mhd_config_set(cfg, key.c_str(), value.c_str()));
}

void print_table(mhd_table* table) {
  std::fputs(mhd_table_csv(table), stdout);
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D mixed finite element solver for stationary incompressible MHD"};
  app.require_subcommand(1);

  std::string config_file;
  std::string problem, mesh, element, omega, initial_guess, out_dir, format;
  std::vector<int> resolutions;
  double tol = -1.0;
  int max_iter = -1;
  int graded_base = -1;
  bool dump_matrix = false;

  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--problem", problem, "example41 | example42");
  app.add_option("--mesh", mesh, "square | lshape | lshape-graded");
  app.add_option("--resolutions", resolutions, "mesh resolutions, e.g. 4 8 16")
      ->delimiter(',');
  app.add_option("--element", element, "nedelec1 | nedelec2");
  app.add_option("--tol", tol, "Newton tolerance");
  app.add_option("--max-iter", max_iter, "Newton iteration cap");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv,markdown");
  app.add_option("--omega", omega, "standard | paper (example42 corner reading)");
  app.add_option("--initial-guess", initial_guess, "auto | zero | decoupled");
  app.add_option("--graded-base", graded_base, "graded family base resolution");
  app.add_flag("--dump-matrix", dump_matrix, "dump Newton matrices to the out dir");

  auto* solve = app.add_subcommand("solve", "run one Newton solve per resolution");
  auto* convergence =
      app.add_subcommand("convergence", "run a convergence study and emit tables");
  auto* projections =
      app.add_subcommand("projections", "run the projection rate study");
  auto* export_mesh = app.add_subcommand("export-mesh", "write the mesh as text");
  for (CLI::App* sub : {solve, convergence, projections, export_mesh})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  ConfigHandle cfg;
  if (!config_file.empty()) {
    int rc = report(mhd_config_load(cfg.ptr, config_file.c_str()));
    if (rc) return rc;
  }
  // command-line overrides
  if (!problem.empty() && set_or_die(cfg.ptr, "problem", problem)) return 2;
  if (!mesh.empty() && set_or_die(cfg.ptr, "mesh", mesh)) return 2;
  if (!resolutions.empty() && set_or_die(cfg.ptr, "resolutions", join(resolutions)))
    return 2;
  if (!element.empty() && set_or_die(cfg.ptr, "element", element)) return 2;
  if (tol >= 0.0 && set_or_die(cfg.ptr, "tol", std::to_string(tol))) return 2;
  if (max_iter >= 0 && set_or_die(cfg.ptr, "max-iter", std::to_string(max_iter)))
    return 2;
  if (!out_dir.empty() && set_or_die(cfg.ptr, "out", out_dir)) return 2;
  if (!format.empty() && set_or_die(cfg.ptr, "format", format)) return 2;
  if (!omega.empty() && set_or_die(cfg.ptr, "omega", omega)) return 2;
  if (!initial_guess.empty() && set_or_die(cfg.ptr, "initial-guess", initial_guess))
    return 2;
  if (graded_base >= 0 &&
      set_or_die(cfg.ptr, "graded-base", std::to_string(graded_base)))
    return 2;
  if (dump_matrix && set_or_die(cfg.ptr, "dump-matrix", "1")) return 2;

  if (solve->parsed()) {
    mhd_solve_result* result = nullptr;
    int rc = report(mhd_run_solve(cfg.ptr, &result));
    if (rc) return rc;
    for (int run = 0; run < mhd_solve_result_count(result); ++run) {
      std::printf("resolution %d: %d Newton iterations\n",
                  mhd_solve_result_resolution(result, run),
                  mhd_solve_result_iterations(result, run));
      for (int k = 0; k < mhd_solve_result_iterations(result, run); ++k)
        std::printf("  iter %2d  |grad du| = %.6e\n", k + 1,
                    mhd_solve_result_increment(result, run, k));
    }
    mhd_solve_result_destroy(result);
    return 0;
  }
  if (convergence->parsed()) {
    mhd_table* table = nullptr;
    int rc = report(mhd_run_convergence(cfg.ptr, &table));
    if (table) {
      print_table(table);
      mhd_table_destroy(table);
    }
    return rc;
  }
  if (projections->parsed()) {
    mhd_table* table = nullptr;
    int rc = report(mhd_run_projections(cfg.ptr, &table));
    if (table) {
      print_table(table);
      mhd_table_destroy(table);
    }
    return rc;
  }
  if (export_mesh->parsed()) {
    // each get reuses one scratch buffer, so copy the values out immediately
    std::string mesh_name = mhd_config_get(cfg.ptr, "mesh");
    std::string res_head = mhd_config_get(cfg.ptr, "resolutions");
    res_head = res_head.substr(0, res_head.find(','));
    std::string dir = mhd_config_get(cfg.ptr, "out");
    if (!dir.empty()) dir += "/";
    std::string path = dir + "mesh_" + mesh_name + "_" + res_head + ".txt";
    int rc = report(mhd_export_mesh(cfg.ptr, path.c_str()));
    if (!rc) std::printf("wrote %s\n", path.c_str());
    return rc;
  }
  return 2;
}
