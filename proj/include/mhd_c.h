/* C interface to the 2D mixed finite element MHD solver.
 *
 * All entry points return an mhd_status code; MHD_OK is zero. A failing call
 * records a message retrievable with mhd_last_error(). Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching _destroy function.
 *
 * Configuration keys (flat key=value text, see mhd_config_load):
 *   problem        example41 | example42
 *   mesh           square | lshape | lshape-graded
 *   resolutions    comma-separated increasing integers, e.g. 4,8,16
 *   element        nedelec1 | nedelec2
 *   tol            Newton stopping tolerance (default 1e-10)
 *   max-iter       Newton iteration cap (default 30)
 *   out            output directory (empty: no files written)
 *   format         csv,markdown subset (default csv)
 *   omega          standard | paper (corner-angle reading of example42)
 *   initial-guess  auto | zero | decoupled
 *   graded-base    base resolution of the graded family (default 4)
 *   dump-matrix    0 | 1 (dump Newton matrices into the output directory)
 */

#ifndef MHD_C_H
#define MHD_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mhd_status {
  MHD_OK = 0,
  MHD_ERR_INVALID_ARGUMENT = 1,
  MHD_ERR_NONCONVERGENCE = 2,
  MHD_ERR_SINGULAR = 3,
  MHD_ERR_IO = 4,
  MHD_ERR_INTERNAL = 5
} mhd_status;

typedef struct mhd_config_s mhd_config;
typedef struct mhd_table_s mhd_table;
typedef struct mhd_solve_result_s mhd_solve_result;

const char* mhd_status_string(int status);
/* Message of the most recent failure on this thread; empty string if none. */
const char* mhd_last_error(void);

mhd_config* mhd_config_create(void);
void mhd_config_destroy(mhd_config* config);
int mhd_config_set(mhd_config* config, const char* key, const char* value);
/* Returns NULL for unknown keys. The pointer stays valid until the next call
 * on the same config. */
const char* mhd_config_get(mhd_config* config, const char* key);
int mhd_config_load(mhd_config* config, const char* path);
int mhd_config_save(const mhd_config* config, const char* path);

/* Newton solve on every configured resolution; writes coefficient and field
 * files when the out directory is set. */
int mhd_run_solve(const mhd_config* config, mhd_solve_result** out);
int mhd_solve_result_count(const mhd_solve_result* result);
int mhd_solve_result_resolution(const mhd_solve_result* result, int run);
int mhd_solve_result_iterations(const mhd_solve_result* result, int run);
double mhd_solve_result_increment(const mhd_solve_result* result, int run, int iter);
void mhd_solve_result_destroy(mhd_solve_result* result);

/* Convergence study / projection study; also writes table files when the out
 * directory is set. */
int mhd_run_convergence(const mhd_config* config, mhd_table** out);
int mhd_run_projections(const mhd_config* config, mhd_table** out);

/* Plain-text mesh export of the first configured resolution. */
int mhd_export_mesh(const mhd_config* config, const char* path);

int mhd_table_rows(const mhd_table* table);
int mhd_table_cols(const mhd_table* table);
const char* mhd_table_column_name(const mhd_table* table, int col);
double mhd_table_value(const mhd_table* table, int row, int col);
int mhd_table_write_csv(const mhd_table* table, const char* path);
int mhd_table_write_markdown(const mhd_table* table, const char* path);
/* In-memory renderings (valid while the table lives). */
const char* mhd_table_csv(const mhd_table* table);
const char* mhd_table_markdown(const mhd_table* table);
void mhd_table_destroy(mhd_table* table);

#ifdef __cplusplus
}
#endif

#endif /* MHD_C_H */
