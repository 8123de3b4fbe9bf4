/* C interface of the noncommutative trace-polynomial toolkit.
 *
 * All functions return a status code; data comes back through out-parameters.
 * Strings and arrays returned by the library are owned by the caller and
 * must be released with the matching *_free function. Error details for the
 * calling thread are available via nct_last_error().
 */
#ifndef NCT_H
#define NCT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NCT_OK 0
#define NCT_EINVAL 2 /* bad input, parse or config error */
#define NCT_EGUARD 3 /* numerical guard or regularity abort */
#define NCT_EFAIL 4  /* internal failure */

const char* nct_version(void);
const char* nct_last_error(void);

void nct_string_free(char* s);
void nct_i64_free(int64_t* p);
void nct_f64_free(double* p);

/* ---- trace polynomials (opaque) ---- */

typedef struct nct_poly nct_poly;

/* dim = 0 infers the alphabet from the text. */
int nct_poly_parse(const char* text, int dim, nct_poly** out);
int nct_poly_print(const nct_poly* p, char** out);
int nct_poly_dim(const nct_poly* p, int* dim);
void nct_poly_free(nct_poly* p);

/* ---- exact oracles ---- */

/* E[tr_N w] as integer coefficients of N^{-2i}; word like "X1*X2*X1*X2". */
int nct_oracle_word_series(const char* word, int max_len, int64_t** coeffs, size_t* n);

/* Complex coefficients of N^{-2i} for a trace polynomial. */
int nct_oracle_poly_series(const nct_poly* p, int max_len, double** re, double** im, size_t* n);

/* Moment in the standard free semicircular family. */
int nct_tau(const nct_poly* p, double* re, double* im);

/* Max |tau(x_e f) - tau (x) tau(d_e f)| over `count` random trace polynomials
 * of degree <= max_degree in `dim` variables. */
int nct_sd_residual_max(uint64_t seed, int count, int max_degree, int dim, double* max_abs);

/* Conditional expectation onto the non-y letters; y_vars lists 1-based
 * letters integrated out as standard semicirculars. */
int nct_cond_exp(const nct_poly* p, const int* y_vars, size_t ny, nct_poly** out);

/* Ball-restricted k-regularity surrogate kappa_R and pass flag. */
int nct_regularity(const nct_poly* W, double R, int k, double* kappa, int* passes);

/* Weighted least squares of value ~ a0 + a1/N^2; residuals has length n. */
int nct_fit_inverse_square(const double* Ns, const double* vals, const double* errs, size_t n,
                           double* a0, double* a1, double* residuals, int* o4_consistent);

/* ---- experiment driver ----
 *
 * config_json follows the documented RunConfig schema; command is one of
 * "sample", "estimate", "transport", "pushforward-check", "strong-conv".
 * On success *csv holds the result rows (observable,N,mean,stderr,M) and
 * *manifest_json the full manifest. */
int nct_run(const char* config_json, const char* command, char** csv, char** manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* NCT_H */
