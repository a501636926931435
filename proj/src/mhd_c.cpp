#include "mhd_c.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "mhd/driver.hpp"

struct mhd_config_s {
  mhd::RunConfig config;
  std::string scratch;  // backs mhd_config_get
};

struct mhd_table_s {
  mhd::ResultTable table;
};

struct mhd_solve_result_s {
  std::vector<mhd::SolveOutcome> outcomes;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MHD_OK;
  } catch (const std::invalid_argument& e) {
    return fail(MHD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const mhd::NonconvergenceError& e) {
    return fail(MHD_ERR_NONCONVERGENCE, e.what());
  } catch (const mhd::SingularMatrixError& e) {
    return fail(MHD_ERR_SINGULAR, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(MHD_ERR_IO, e.what());
  } catch (const std::exception& e) {
    std::string what = e.what();
    if (what.find("aborted") != std::string::npos)
      return fail(MHD_ERR_NONCONVERGENCE, what);
    if (what.find("cannot open") != std::string::npos)
      return fail(MHD_ERR_IO, what);
    return fail(MHD_ERR_INTERNAL, what);
  }
}

}  // namespace

extern "C" {

const char* mhd_status_string(int status) {
  switch (status) {
    case MHD_OK: return "ok";
    case MHD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MHD_ERR_NONCONVERGENCE: return "nonconvergence";
    case MHD_ERR_SINGULAR: return "singular matrix";
    case MHD_ERR_IO: return "io error";
    case MHD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mhd_last_error(void) { return g_last_error.c_str(); }

mhd_config* mhd_config_create(void) { return new mhd_config_s; }

void mhd_config_destroy(mhd_config* config) { delete config; }

int mhd_config_set(mhd_config* config, const char* key, const char* value) {
  if (!config || !key || !value)
    return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { mhd::set_config_key(config->config, key, value); });
}

const char* mhd_config_get(mhd_config* config, const char* key) {
  if (!config || !key) return nullptr;
  try {
    config->scratch = mhd::get_config_key(config->config, key);
    return config->scratch.c_str();
  } catch (const std::exception&) {
    return nullptr;
  }
}

int mhd_config_load(mhd_config* config, const char* path) {
  if (!config || !path) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("cannot open " + std::string(path));
    std::ostringstream ss;
    ss << is.rdbuf();
    config->config = mhd::parse_config(ss.str());
  });
}

int mhd_config_save(const mhd_config* config, const char* path) {
  if (!config || !path) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + std::string(path));
    os << mhd::serialize_config(config->config);
  });
}

int mhd_run_solve(const mhd_config* config, mhd_solve_result** out) {
  if (!config || !out) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<mhd_solve_result_s>();
    result->outcomes = mhd::run_solve(config->config);
    *out = result.release();
  });
}

int mhd_solve_result_count(const mhd_solve_result* result) {
  return result ? static_cast<int>(result->outcomes.size()) : 0;
}

int mhd_solve_result_resolution(const mhd_solve_result* result, int run) {
  if (!result || run < 0 || run >= mhd_solve_result_count(result)) return -1;
  return result->outcomes[run].resolution;
}

int mhd_solve_result_iterations(const mhd_solve_result* result, int run) {
  if (!result || run < 0 || run >= mhd_solve_result_count(result)) return -1;
  return result->outcomes[run].iterations;
}

double mhd_solve_result_increment(const mhd_solve_result* result, int run, int iter) {
  if (!result || run < 0 || run >= mhd_solve_result_count(result)) return std::nan("");
  const auto& increments = result->outcomes[run].increments;
  if (iter < 0 || iter >= static_cast<int>(increments.size())) return std::nan("");
  return increments[iter];
}

void mhd_solve_result_destroy(mhd_solve_result* result) { delete result; }

int mhd_run_convergence(const mhd_config* config, mhd_table** out) {
  if (!config || !out) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto table = std::make_unique<mhd_table_s>();
    table->table = mhd::run_convergence(config->config);
    *out = table.release();
  });
}

int mhd_run_projections(const mhd_config* config, mhd_table** out) {
  if (!config || !out) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto table = std::make_unique<mhd_table_s>();
    table->table = mhd::run_projections(config->config);
    *out = table.release();
  });
}

int mhd_export_mesh(const mhd_config* config, const char* path) {
  if (!config || !path) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { mhd::run_export_mesh(config->config, path); });
}

int mhd_table_rows(const mhd_table* table) {
  return table ? static_cast<int>(table->table.rows.size()) : 0;
}

int mhd_table_cols(const mhd_table* table) {
  return table ? static_cast<int>(table->table.columns.size()) : 0;
}

const char* mhd_table_column_name(const mhd_table* table, int col) {
  if (!table || col < 0 || col >= mhd_table_cols(table)) return nullptr;
  return table->table.columns[col].c_str();
}

double mhd_table_value(const mhd_table* table, int row, int col) {
  if (!table || row < 0 || row >= mhd_table_rows(table) || col < 0 ||
      col >= mhd_table_cols(table))
    return std::nan("");
  return table->table.rows[row][col];
}

int mhd_table_write_csv(const mhd_table* table, const char* path) {
  if (!table || !path) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + std::string(path));
    os << table->table.csv;
  });
}

int mhd_table_write_markdown(const mhd_table* table, const char* path) {
  if (!table || !path) return fail(MHD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + std::string(path));
    os << table->table.markdown;
  });
}

const char* mhd_table_csv(const mhd_table* table) {
  return table ? table->table.csv.c_str() : nullptr;
}

const char* mhd_table_markdown(const mhd_table* table) {
  return table ? table->table.markdown.c_str() : nullptr;
}

void mhd_table_destroy(mhd_table* table) { delete table; }

}  // extern "C"
