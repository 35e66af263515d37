/* dbsim: drone base-station placement and fair-association simulator.
 *
 * C interface to the simulation core. All functions return a dbsim_status;
 * on failure, dbsim_last_error() holds a human-readable message for the
 * calling thread. Objects are opaque handles released with the matching
 * *_free function; strings returned through char** are released with
 * dbsim_string_free.
 */
#ifndef DBSIM_H
#define DBSIM_H

#include <stdint.h>

#if defined(_WIN32)
#define DBSIM_API __declspec(dllexport)
#else
#define DBSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible function. */
typedef enum dbsim_status {
    DBSIM_OK = 0,
    DBSIM_ERR_INVALID_ARGUMENT = 1, /* bad parameter or config value; key path in the message */
    DBSIM_ERR_PARSE = 2,            /* malformed JSON; line and column in the message */
    DBSIM_ERR_IO = 3,               /* unreadable config or unwritable output; path in the message */
    DBSIM_ERR_RUNTIME = 4           /* solver failure, e.g. no feasible drone layout */
} dbsim_status;

typedef struct dbsim_config dbsim_config;     /* a resolved simulation configuration */
typedef struct dbsim_solution dbsim_solution; /* one audited scenario solution */

/* Library version string. Never fails. */
DBSIM_API const char* dbsim_version(void);

/* Message of the most recent failure on this thread; "" when the last call
 * succeeded. Valid until the next failing dbsim_* call on the same thread. */
DBSIM_API const char* dbsim_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* Fresh configuration holding every built-in default. */
DBSIM_API dbsim_status dbsim_config_create(dbsim_config** out);

/* Parse a JSON config file on top of the defaults. Empty file = defaults. */
DBSIM_API dbsim_status dbsim_config_load(const char* path, dbsim_config** out);

/* Parse JSON text on top of the defaults. Blank text = defaults. */
DBSIM_API dbsim_status dbsim_config_parse(const char* json_text, dbsim_config** out);

/* Apply one dotted-path override, e.g. ("algorithm.theta_b_deg", "60") or
 * ("experiment.num_dbs", "[2,3]"). The value is parsed as JSON when
 * possible; a bare word counts as a string. On failure the configuration is
 * left unchanged. */
DBSIM_API dbsim_status dbsim_config_set(dbsim_config* cfg, const char* key_path,
                                        const char* value);

/* Render every resolved parameter as a stable JSON document. */
DBSIM_API dbsim_status dbsim_config_describe(const dbsim_config* cfg, char** json_out);

DBSIM_API void dbsim_config_free(dbsim_config* cfg);

/* --- batch experiments --------------------------------------------------- */

/* Run cfg's experiment section and write its files into the configured
 * output directory. On success, *files_out (when non-NULL) receives a
 * newline-terminated list of the files written. */
DBSIM_API dbsim_status dbsim_run_experiment(const dbsim_config* cfg, char** files_out);

/* --- single solves ------------------------------------------------------- */

/* Solve one scenario drawn from the configuration's random streams.
 * cov_label NULL selects the experiment's first resolved preset; num_dbs < 0
 * selects the configuration's first num_dbs entry. The returned solution has
 * passed the full constraint audit. */
DBSIM_API dbsim_status dbsim_solve(const dbsim_config* cfg, const char* cov_label, int run_index,
                                   int num_dbs, dbsim_solution** out);

DBSIM_API dbsim_status dbsim_solution_alpha(const dbsim_solution* sol, double* out);
DBSIM_API dbsim_status dbsim_solution_utility(const dbsim_solution* sol, double* out);
DBSIM_API dbsim_status dbsim_solution_num_users(const dbsim_solution* sol, int* out);
DBSIM_API dbsim_status dbsim_solution_num_dbs(const dbsim_solution* sol, int* out);

/* 3D position of drone `index` (0-based). */
DBSIM_API dbsim_status dbsim_solution_dbs_position(const dbsim_solution* sol, int index, double* x,
                                                   double* y, double* z);

/* Serving station of user `user_index`: 0 is the macro station, j >= 1 is
 * drone j. */
DBSIM_API dbsim_status dbsim_solution_assignment(const dbsim_solution* sol, int user_index,
                                                 int* bs_out);

/* Delivered rate of user `user_index` (spectral efficiency share). */
DBSIM_API dbsim_status dbsim_solution_user_rate(const dbsim_solution* sol, int user_index,
                                                double* out);

/* Full solution document; identical bytes to the single-run solution.json. */
DBSIM_API dbsim_status dbsim_solution_to_json(const dbsim_solution* sol, char** json_out);

DBSIM_API void dbsim_solution_free(dbsim_solution* sol);

/* Release a string returned through a char** out-parameter. */
DBSIM_API void dbsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
