#pragma once

// Run configuration and the command entry points shared by the C API and the
// command-line front end.

#include <string>
#include <vector>

#include "mhd/analysis.hpp"

namespace mhd {

struct RunConfig {
  std::string problem = "example41";    // example41 | example42
  std::string mesh = "square";          // square | lshape | lshape-graded
  std::vector<int> resolutions = {4, 8, 16};
  std::string element = "nedelec1";     // nedelec1 | nedelec2
  double tol = 1e-10;
  int max_iter = 30;
  std::string out_dir;
  std::vector<std::string> formats = {"csv"};  // csv, markdown
  std::string omega = "standard";       // standard | paper
  std::string initial_guess = "auto";   // auto | zero | decoupled
  int graded_base = 1;
  bool dump_matrix = false;

  bool operator==(const RunConfig&) const = default;
};

// Flat key=value text; '#' starts a comment. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);
void set_config_key(RunConfig& config, const std::string& key,
                    const std::string& value);
std::string get_config_key(const RunConfig& config, const std::string& key);

// Throws std::invalid_argument when a field is out of range.
void validate_config(const RunConfig& config);

ElementKind element_kind(const RunConfig& config);
MeshFamilyKind mesh_family(const RunConfig& config);
BenchmarkProblem make_problem(const RunConfig& config);
NewtonConfig newton_config(const RunConfig& config);

struct SolveOutcome {
  int resolution = 0;
  int iterations = 0;
  std::vector<double> increments;
};

// Solves each configured resolution; writes coefficient and field-dump files
// into out_dir when set.
std::vector<SolveOutcome> run_solve(const RunConfig& config);

// A generic numeric table, the interchange type of the study commands.
struct ResultTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN renders as "-"
  std::string csv;                        // pinned byte-exact renderings
  std::string markdown;
};

ResultTable run_convergence(const RunConfig& config);
ResultTable run_projections(const RunConfig& config);
void run_export_mesh(const RunConfig& config, const std::string& path);

// Writes csv/markdown files for a study into out_dir per config.formats;
// returns the written paths.
std::vector<std::string> write_table_files(const RunConfig& config,
                                           const ResultTable& table,
                                           const std::string& stem);

}  // namespace mhd
