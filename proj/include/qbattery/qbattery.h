/* qbattery.h: C interface to the quantum-battery charging simulator.
 *
 * Opaque handles with explicit destructors; every fallible call returns a
 * qb_status and leaves a description retrievable via qb_last_error() on
 * failure. Handles are immutable after creation and safe to share between
 * threads; the error message is thread-local.
 *
 * Conventions: hbar = k_B = 1; joint states order the charger factor first;
 * battery Fock bases are row-major products mode_1 (x) mode_2 (x) ...
 */

#ifndef QBATTERY_H
#define QBATTERY_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int qb_status;

#define QB_OK 0
#define QB_ERR_INVALID_ARGUMENT 1
#define QB_ERR_DIMENSION_MISMATCH 2
#define QB_ERR_DOMAIN 3
#define QB_ERR_INTERNAL 4

/* Last error message of the calling thread; empty string if none. */
const char* qb_last_error(void);
const char* qb_version(void);

/* ------------------------------- models --------------------------------- */

typedef struct qb_model qb_model;

/* Single harmonic mode (d_b levels, energy omega) driven by a qubit charger
 * with excited level nu, Jaynes-Cummings coupling g. */
qb_status qb_model_single_mode(int d_b, double omega, double nu, double g, qb_model** out);

/* n_modes non-degenerate modes coupled to a (n_modes+1)-level charger; mode i
 * talks to the |e0> <-> |ei> transition. charger_levels has n_modes+1 entries,
 * starts at 0 and increases strictly. */
qb_status qb_model_multimode(int n_modes, const int* mode_dims, const double* mode_freqs,
                             const double* charger_levels, double g, qb_model** out);

void qb_model_free(qb_model* m);

int qb_model_charger_dim(const qb_model* m);
int qb_model_battery_dim(const qb_model* m);
int qb_model_joint_dim(const qb_model* m);
int qb_model_mode_count(const qb_model* m);
double qb_model_capacity(const qb_model* m);

/* Newline-separated construction warnings (e.g. detuning outside the studied
 * regime); returns the number of bytes that buf would need. */
size_t qb_model_warnings(const qb_model* m, char* buf, size_t buflen);

/* ------------------------------- states --------------------------------- */

typedef struct qb_state qb_state;

/* Every mode in its ground state. */
qb_status qb_battery_ground(const qb_model* m, qb_state** out);

/* Identical truncated passive mixture (d descending populations) on every
 * mode. */
qb_status qb_battery_truncated(const qb_model* m, const double* populations, int d,
                               qb_state** out);

/* Identical thermal state exp(-beta H_mode)/Z on every mode. */
qb_status qb_battery_thermal(const qb_model* m, double beta, qb_state** out);

/* Parses "ground" | "trunc2:R0" | "trunc3:R0,R1" | "thermal:BETA". */
qb_status qb_battery_init_parse(const qb_model* m, const char* spec, qb_state** out);

/* Charger in the pure level |e_level>. */
qb_status qb_charger_excited(const qb_model* m, int level, qb_state** out);

/* cos(theta/2)|e1> + e^{i phi} sin(theta/2)|e2>; charger must have >= 3
 * levels. */
qb_status qb_charger_superposition(const qb_model* m, double theta, double phi, qb_state** out);

void qb_state_free(qb_state* s);
int qb_state_dim(const qb_state* s);
qb_status qb_state_populations(const qb_state* s, double* out, int len);
qb_status qb_state_entry(const qb_state* s, int row, int col, double* re, double* im);

/* --------------------------- charging cycle ------------------------------ */

qb_status qb_battery_ergotropy(const qb_model* m, const qb_state* battery, double* out);

qb_status qb_charge_once(const qb_model* m, const qb_state* battery, const qb_state* charger,
                         double t, qb_state** out);

/* Maximizes the battery ergotropy over t in (t_lo, t_hi]; pass t_hi <= t_lo
 * to use the model's default window. *found is 0 when the ergotropy vanishes
 * on the whole window. */
qb_status qb_find_tau(const qb_model* m, const qb_state* battery, const qb_state* charger,
                      double t_lo, double t_hi, int* found, double* tau, double* e_max);

qb_status qb_per_mode_ergotropies(const qb_model* m, const qb_state* battery, double* out,
                                  int len);

/* ----------------------- measurement optimization ------------------------ */

typedef struct qb_opt_options {
    int alpha_grid;   /* qubit alpha samples on [0, pi]        (default 181) */
    int gamma_grid;   /* qubit gamma samples on [0, 2 pi)      (default 72)  */
    int multistarts;  /* qudit starts incl. computational basis (default 64) */
    long max_evals;   /* evaluation budget per optimization */
    double param_tol; /* refinement tolerance                  (default 1e-6) */
    unsigned long long seed; /* qudit multistart seed          (default 0)   */
} qb_opt_options;

void qb_opt_options_default(qb_opt_options* o);

#define QB_MAX_BASIS_PARAMS 32

typedef struct qb_daemonic_result {
    double t;
    double ergotropy;
    double daemonic_min;
    double daemonic_max;
    double gap;  /* daemonic_min - ergotropy */
    double gain; /* daemonic_max - ergotropy */
    double band; /* daemonic_max - daemonic_min */
    int n_params;
    double argmin_params[QB_MAX_BASIS_PARAMS];
    double argmax_params[QB_MAX_BASIS_PARAMS];
    int min_converged;
    int max_converged;
} qb_daemonic_result;

/* Evolves charger (x) battery for time t and optimizes the daemonic
 * ergotropy over all projective charger measurements (min and max).
 * opts may be NULL for defaults. */
qb_status qb_daemonic_report(const qb_model* m, const qb_state* battery, const qb_state* charger,
                             double t, const qb_opt_options* opts, qb_daemonic_result* out);

/* Daemonic ergotropy for one fixed qubit measurement basis
 * {cos(a/2)|e0> + e^{ic} sin(a/2)|e1>, ...}. Also reports the plain
 * ergotropy of the reduced battery state. */
qb_status qb_daemonic_qubit_basis(const qb_model* m, const qb_state* battery,
                                  const qb_state* charger, double t, double alpha, double gamma,
                                  double* daemonic, double* ergotropy);

/* Fixed qudit basis from d_a (d_a - 1) rotation angle/phase parameters. */
qb_status qb_daemonic_qudit_basis(const qb_model* m, const qb_state* battery,
                                  const qb_state* charger, double t, const double* params,
                                  int n_params, double* daemonic);

/* --------------------------- repeated charging --------------------------- */

typedef struct qb_trajectory qb_trajectory;

#define QB_TERM_FULL_CHARGE 0
#define QB_TERM_MAX_CYCLES 1
#define QB_TERM_STALLED 2

#define QB_MAX_MODES 8

typedef struct qb_cycle_record {
    int m;
    double tau;
    double e_max;
    int n_modes;                         /* 0 for single-mode models */
    double mode_ergotropy[QB_MAX_MODES];
    int simultaneous;
    int has_daemonic;
    qb_daemonic_result daemonic;
} qb_cycle_record;

/* Repeats the charging cycle with a fresh copy of `charger` per round.
 * with_daemonic != 0 additionally optimizes the daemonic quantities at every
 * round's tau. opts may be NULL. */
qb_status qb_repeat_cycles(const qb_model* m, const qb_state* battery, const qb_state* charger,
                           int max_cycles, int with_daemonic, const qb_opt_options* opts,
                           qb_trajectory** out);

/* Same, with an explicit per-round maximization window; pass t_hi <= t_lo for
 * the model default. */
qb_status qb_repeat_cycles_windowed(const qb_model* m, const qb_state* battery,
                                    const qb_state* charger, int max_cycles, int with_daemonic,
                                    const qb_opt_options* opts, double t_lo, double t_hi,
                                    qb_trajectory** out);

void qb_trajectory_free(qb_trajectory* t);
int qb_trajectory_size(const qb_trajectory* t);
int qb_trajectory_termination(const qb_trajectory* t);
qb_status qb_trajectory_record(const qb_trajectory* t, int index, qb_cycle_record* out);
qb_status qb_trajectory_populations(const qb_trajectory* t, int index, double* out, int len);

/* ----------------------- closed-form reference values -------------------- */

/* Rabi frequency sqrt(g^2 n + delta^2 / 4) of the n-excitation block. */
double qb_jc_rabi(int n, double g, double delta);

/* Block coefficients A_n, B_n and the complex coherence C_n at time t. */
qb_status qb_jc_coeffs(int n, double g, double delta, double t, double* a_n, double* b_n,
                       double* c_re, double* c_im);

/* Ergotropy of the once-charged vacuum; fails for delta^2 > 4 g^2. */
qb_status qb_vacuum_ergotropy(double g, double delta, double omega, double t, double* out);

/* Measurement-independent daemonic ergotropy of the charged vacuum. */
double qb_vacuum_daemonic(double g, double delta, double omega, double t);

/* Daemonic gap at the charging optimum, omega delta^2 / (4 Omega_1^2). */
qb_status qb_vacuum_gap(double g, double delta, double omega, double* out);

/* One charging round on d_b Fock populations. */
qb_status qb_recursion_step(const double* r_prev, int d_b, double g, double delta, double t,
                            double* r_next);

#ifdef __cplusplus
}
#endif

#endif /* QBATTERY_H */
