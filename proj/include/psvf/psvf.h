#ifndef PSVF_H
#define PSVF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSVF_API __declspec(dllexport)
#else
#define PSVF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psvf_status {
  PSVF_OK = 0,
  PSVF_E_INVALID_ARGUMENT = 1,
  PSVF_E_PARSE = 2,
  PSVF_E_NOT_ON_SIGMA = 3,
  PSVF_E_NOT_A_TANGENCY = 4,
  PSVF_E_DEGENERATE_TANGENCY = 5,
  PSVF_E_UNDEFINED_SLIDING = 6,
  PSVF_E_EVENT_LOCATION = 7,
  PSVF_E_BRANCH_BUDGET = 8,
  PSVF_E_INADMISSIBLE_WORD = 9,
  PSVF_E_OFF_INVARIANT_SET = 10,
  PSVF_E_SECTION_NOT_REACHED = 11,
  PSVF_E_ALPHABET_MISMATCH = 12,
  PSVF_E_EMPTY_CURVE = 13,
  PSVF_E_FAMILY_MISMATCH = 14,
  PSVF_E_DEGENERATE_CURVE = 15,
  PSVF_E_SKELETON_MISMATCH = 16,
  PSVF_E_IO = 17,
  PSVF_E_INTERNAL = 99
} psvf_status;

typedef struct psvf_family psvf_family;
typedef struct psvf_field psvf_field;
typedef struct psvf_trajectory psvf_trajectory;

/* Errors.  The message and index refer to the last failing call on the
   calling thread. */
PSVF_API const char* psvf_version(void);
PSVF_API const char* psvf_status_name(psvf_status s);
PSVF_API const char* psvf_last_error(void);
/* Window position of the first forbidden pair after PSVF_E_INADMISSIBLE_WORD,
   else -1. */
PSVF_API long long psvf_last_error_index(void);

/* Strings returned through char** outputs are owned by the caller. */
PSVF_API void psvf_string_free(char* s);

/* Canonical families: "k2".."k40", "inf", "bean".  `window` bounds the fold
   range of the infinite family (ignored otherwise, 0 = default). */
PSVF_API psvf_status psvf_family_create(const char* kind, int window, psvf_family** out);
PSVF_API void psvf_family_destroy(psvf_family* f);
PSVF_API psvf_status psvf_family_label(const psvf_family* f, char** out);
/* 2(k-1) for finite k, 0 for the integer alphabet and the bean field. */
PSVF_API psvf_status psvf_family_alphabet_size(const psvf_family* f, int* out);
PSVF_API psvf_status psvf_family_describe(const psvf_family* f, char** json_out);
PSVF_API psvf_status psvf_family_portrait_svg(const psvf_family* f, char** svg_out);
PSVF_API psvf_status psvf_family_field(const psvf_family* f, psvf_field** out);

/* P_k and its derivatives; exact ascending coefficients as a JSON array of
   "p/q" strings. */
PSVF_API psvf_status psvf_poly_pk(int k, double x, int order, double* out);
PSVF_API psvf_status psvf_poly_pk_coefficients(int k, char** json_out);

/* Fields from JSON: {"upper":{"fx","fy"},"lower":{...},"switching":expr}. */
PSVF_API psvf_status psvf_field_from_json(const char* json, psvf_field** out);
PSVF_API void psvf_field_destroy(psvf_field* z);
PSVF_API psvf_status psvf_field_eval(const psvf_field* z, int upper, double x, double y, double* vx, double* vy);
/* {"region":..., "fold":{...}} for a point of the switching manifold. */
PSVF_API psvf_status psvf_field_classify(const psvf_field* z, double x, double y, char** json_out);
PSVF_API psvf_status psvf_field_sliding(const psvf_field* z, double x, double y, double* vx, double* vy);
PSVF_API psvf_status psvf_field_describe(const psvf_field* z, char** json_out);
PSVF_API psvf_status psvf_field_portrait_svg(const psvf_field* z, char** svg_out);

/* Trajectories. */
PSVF_API void psvf_trajectory_destroy(psvf_trajectory* g);
/* Word: one digit per symbol or comma separated integers; symbol i occupies
   [offset + i, offset + i + 1]. */
PSVF_API psvf_status psvf_traj_synthesize(const psvf_family* f, const char* word, long long offset,
                                          psvf_trajectory** out);
/* Branch tree from (x, y) over `horizon` as JSON.  `slide_stops` lists Σ
   abscissas where sliding may be left (may be NULL). */
PSVF_API psvf_status psvf_traj_branches(const psvf_field* z, double x, double y, double horizon,
                                        size_t max_branches, const double* slide_stops, size_t n_stops,
                                        char** json_out);
/* One branch: the first continuation offered at each junction, or the one
   named by `choices` ("upper"/"lower"/"sliding", comma separated, consumed
   in order). */
PSVF_API psvf_status psvf_traj_simulate(const psvf_field* z, double x, double y, double horizon,
                                        const char* choices, psvf_trajectory** out);
PSVF_API psvf_status psvf_traj_from_csv(const char* csv, psvf_trajectory** out);
PSVF_API psvf_status psvf_traj_csv(const psvf_trajectory* g, int per_arc, char** csv_out);
PSVF_API psvf_status psvf_traj_json(const psvf_trajectory* g, char** json_out);
PSVF_API psvf_status psvf_traj_span(const psvf_trajectory* g, double* t0, double* t1);
PSVF_API psvf_status psvf_traj_at(const psvf_trajectory* g, double t, double* x, double* y);
PSVF_API psvf_status psvf_traj_time_one(const psvf_trajectory* g, psvf_trajectory** out);
/* Symbols s_lo..s_hi as JSON; `tol` is the allowed distance from the
   invariant set (use about 1e-4 for trajectories read from CSV). */
PSVF_API psvf_status psvf_traj_itinerary(const psvf_family* f, const psvf_trajectory* g, long long lo, long long hi,
                                         double tol, char** json_out);
/* Bean field: one loop per entry of `kinds` (0 outer, 1 slide then X,
   2 slide then Y; `exits` gives the slide exit abscissa). */
PSVF_API psvf_status psvf_bean_trajectory(const psvf_family* bean, double y0, const int* kinds, const double* exits,
                                          size_t loops, psvf_trajectory** out);
PSVF_API psvf_status psvf_bean_return_time(const psvf_family* bean, const psvf_trajectory* g, double* out);

/* Symbolic dynamics.  alphabet > 0 is {0..alphabet-1}; 0 is the integers. */
PSVF_API psvf_status psvf_shift_metric(const char* w1, const char* w2, int alphabet, long long offset, double* value,
                                       double* tail);
PSVF_API psvf_status psvf_shift_apply(const char* w, int alphabet, long long offset, long long steps, char** json_out);
PSVF_API psvf_status psvf_theta_inf_admissible(const char* w, int* out);
/* Row-major size x size 0/1 matrix; caller provides size*size ints. */
PSVF_API psvf_status psvf_sft_matrix(const psvf_family* f, int* entries, int capacity, int* size);
PSVF_API psvf_status psvf_matrix_is_mixing(const int* entries, int size, int* mixing, int* n0);
PSVF_API psvf_status psvf_matrix_periodic_count(const int* entries, int size, int n, uint64_t* out);

/* Orbit metric.  Points are interleaved x,y pairs. */
PSVF_API psvf_status psvf_hausdorff(const double* a, size_t na, const double* b, size_t nb, int polyline, double* out);
PSVF_API psvf_status psvf_rho(const psvf_family* f, const psvf_trajectory* a, const psvf_trajectory* b, int n,
                              double* value, double* tail);

/* Verification reports as JSON; *pass is 1 when every check holds. */
PSVF_API psvf_status psvf_verify_conjugacy(const psvf_family* f, int samples, int depth, uint64_t seed, char** json_out,
                                           int* pass);
PSVF_API psvf_status psvf_verify_equivalence(const psvf_field* a, const psvf_field* b, uint64_t seed, char** json_out,
                                             int* pass);

#ifdef __cplusplus
}
#endif

#endif
