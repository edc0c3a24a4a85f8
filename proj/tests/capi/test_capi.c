#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "psvf/psvf.h"

static int failures = 0;

#define CHECK(cond)                                               \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: CHECK(%s)\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

#define OK(call) CHECK((call) == PSVF_OK)

static int contains(const char* s, const char* needle) { return s && strstr(s, needle) != NULL; }

static void families(void) {
  psvf_family* f = NULL;
  char* s = NULL;
  int n = 0;
  OK(psvf_family_create("k3", 0, &f));
  OK(psvf_family_label(f, &s));
  CHECK(strcmp(s, "k3") == 0);
  psvf_string_free(s);
  OK(psvf_family_alphabet_size(f, &n));
  CHECK(n == 4);
  OK(psvf_family_describe(f, &s));
  CHECK(contains(s, "\"transition_matrix\""));
  psvf_string_free(s);
  OK(psvf_family_portrait_svg(f, &s));
  CHECK(contains(s, "generator: psvf"));
  psvf_string_free(s);

  int m[16];
  int size = 0;
  OK(psvf_sft_matrix(f, m, 16, &size));
  const int expect[16] = {1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1};
  CHECK(size == 4 && memcmp(m, expect, sizeof expect) == 0);
  CHECK(psvf_sft_matrix(f, m, 4, &size) == PSVF_E_INVALID_ARGUMENT);
  int mixing = 0, n0 = 0;
  OK(psvf_matrix_is_mixing(m, 4, &mixing, &n0));
  CHECK(mixing == 1 && n0 == 2);
  uint64_t count = 0;
  OK(psvf_matrix_periodic_count(m, 4, 1, &count));
  CHECK(count == 2);
  psvf_family_destroy(f);

  OK(psvf_poly_pk_coefficients(3, &s));
  CHECK(strcmp(s, "[\"1/16\",\"0\",\"-9/16\",\"0\",\"3/2\",\"0\",\"-1\"]") == 0);
  psvf_string_free(s);
  double v = 0.0;
  OK(psvf_poly_pk(2, 0.5, 0, &v));
  CHECK(fabs(v) < 1e-15);

  CHECK(psvf_family_create("k1", 0, &f) == PSVF_E_PARSE || psvf_family_create("k1", 0, &f) == PSVF_E_INVALID_ARGUMENT);
  CHECK(strlen(psvf_last_error()) > 0);
  CHECK(psvf_family_create("bogus", 0, &f) != PSVF_OK);
}

static void nulls(void) {
  int n = 0;
  CHECK(psvf_family_alphabet_size(NULL, &n) == PSVF_E_INVALID_ARGUMENT);
  CHECK(psvf_family_create(NULL, 0, NULL) == PSVF_E_INVALID_ARGUMENT);
  CHECK(psvf_field_from_json(NULL, NULL) == PSVF_E_INVALID_ARGUMENT);
  psvf_family_destroy(NULL);
  psvf_field_destroy(NULL);
  psvf_trajectory_destroy(NULL);
  psvf_string_free(NULL);
  CHECK(strcmp(psvf_status_name(PSVF_OK), "ok") == 0 || strlen(psvf_status_name(PSVF_OK)) > 0);
  CHECK(contains(psvf_status_name(PSVF_E_INADMISSIBLE_WORD), "Inadmissible"));
  CHECK(contains(psvf_version(), "1.0.0"));
}

static void trajectories(void) {
  psvf_family* f = NULL;
  psvf_trajectory* g = NULL;
  psvf_trajectory* g1 = NULL;
  char* s = NULL;
  OK(psvf_family_create("k3", 0, &f));

  CHECK(psvf_traj_synthesize(f, "10", 0, &g) == PSVF_E_INADMISSIBLE_WORD);
  CHECK(psvf_last_error_index() == 0);
  CHECK(g == NULL);
  CHECK(psvf_traj_synthesize(f, "2010", 0, &g) == PSVF_E_INADMISSIBLE_WORD);
  CHECK(psvf_last_error_index() == 2);

  OK(psvf_traj_synthesize(f, "0132", -1, &g));
  CHECK(psvf_last_error_index() == -1);
  double t0 = 0, t1 = 0, x = 0, y = 0;
  OK(psvf_traj_span(g, &t0, &t1));
  CHECK(t0 == -1.0 && t1 == 3.0);
  OK(psvf_traj_at(g, 0.0, &x, &y));
  CHECK(fabs(y) < 1e-12);
  OK(psvf_traj_itinerary(f, g, -1, 2, 1e-9, &s));
  CHECK(contains(s, "[0,1,3,2]"));
  psvf_string_free(s);
  OK(psvf_traj_time_one(g, &g1));
  OK(psvf_traj_itinerary(f, g1, -2, 1, 1e-9, &s));
  CHECK(contains(s, "[0,1,3,2]") && contains(s, "\"offset\":-2"));
  psvf_string_free(s);

  char* csv = NULL;
  OK(psvf_traj_csv(g, 32, &csv));
  CHECK(strncmp(csv, "t,x,y,governing\n", 16) == 0);
  psvf_trajectory* back = NULL;
  OK(psvf_traj_from_csv(csv, &back));
  char* csv2 = NULL;
  OK(psvf_traj_csv(back, 32, &csv2));
  CHECK(strcmp(csv, csv2) == 0);
  psvf_string_free(csv);
  psvf_string_free(csv2);
  psvf_trajectory_destroy(back);
  CHECK(psvf_traj_from_csv("t,x,y\n", &back) == PSVF_E_PARSE);

  OK(psvf_traj_json(g, &s));
  CHECK(contains(s, "\"arcs\""));
  psvf_string_free(s);

  double value = 0, tail = 0;
  OK(psvf_rho(f, g, g, 1, &value, &tail));
  CHECK(value == 0.0 && tail > 0.0);
  psvf_trajectory_destroy(g1);
  psvf_trajectory_destroy(g);

  psvf_field* z = NULL;
  OK(psvf_family_field(f, &z));
  OK(psvf_traj_branches(z, -0.5, 0.0, 2.0, 64, NULL, 0, &s));
  CHECK(contains(s, "\"leaf_count\":4"));
  psvf_string_free(s);
  OK(psvf_traj_simulate(z, -0.5, 0.0, 2.0, "lower,upper", &g));
  OK(psvf_traj_itinerary(f, g, 0, 1, 1e-9, &s));
  CHECK(contains(s, "[0,1]"));
  psvf_string_free(s);
  psvf_trajectory_destroy(g);
  CHECK(psvf_traj_simulate(z, -0.5, 0.0, 2.0, "sliding", &g) == PSVF_E_INVALID_ARGUMENT);
  psvf_field_destroy(z);
  psvf_family_destroy(f);
}

static void bean(void) {
  psvf_family* b = NULL;
  psvf_trajectory* g = NULL;
  OK(psvf_family_create("bean", 0, &b));
  const int kinds[1] = {0};
  const double exits[1] = {0.0};
  OK(psvf_bean_trajectory(b, 1.0, kinds, exits, 1, &g));
  double eta = 0.0;
  OK(psvf_bean_return_time(b, g, &eta));
  CHECK(fabs(eta - 3.0) < 1e-9);
  psvf_trajectory_destroy(g);

  psvf_field* z = NULL;
  char* s = NULL;
  double vx = 0, vy = 0;
  OK(psvf_family_field(b, &z));
  OK(psvf_field_sliding(z, -0.5, 0.0, &vx, &vy));
  CHECK(fabs(vx + 1.0) < 1e-12 && fabs(vy) < 1e-12);
  CHECK(psvf_field_sliding(z, 0.0, 0.0, &vx, &vy) == PSVF_E_UNDEFINED_SLIDING);
  CHECK(psvf_field_classify(z, -0.5, 0.3, &s) == PSVF_E_NOT_ON_SIGMA);
  OK(psvf_field_classify(z, -0.5, 0.0, &s));
  CHECK(contains(s, "escaping"));
  psvf_string_free(s);
  psvf_field_destroy(z);
  psvf_family_destroy(b);
}

static void symbols_and_metrics(void) {
  double value = 0, tail = 0;
  OK(psvf_shift_metric("0101", "0110", 2, -2, &value, &tail));
  CHECK(value == 1.5 && tail == 0.75);
  CHECK(psvf_shift_metric("012", "0", 2, 0, &value, &tail) == PSVF_E_INVALID_ARGUMENT);
  char* s = NULL;
  OK(psvf_shift_apply("0110", 2, 0, 1, &s));
  CHECK(contains(s, "\"offset\":-1"));
  psvf_string_free(s);
  int ok = 0;
  OK(psvf_theta_inf_admissible("0,2,4,2", &ok));
  CHECK(ok == 1);
  OK(psvf_theta_inf_admissible("0,3", &ok));
  CHECK(ok == 0);

  const double a[4] = {0, 0, 1, 0};
  const double b[4] = {0, 1, 1, 1};
  double h = 0;
  OK(psvf_hausdorff(a, 2, b, 2, 0, &h));
  CHECK(h == 1.0);
  CHECK(psvf_hausdorff(a, 0, b, 2, 0, &h) == PSVF_E_EMPTY_CURVE);
}

static void fields_and_verification(void) {
  const char* z2 =
      "{\"upper\":{\"fx\":\"1\",\"fy\":\"x/2 - 4*x^3\"},\"lower\":{\"fx\":\"-1\",\"fy\":\"x/2 - 4*x^3\"},"
      "\"switching\":\"y\",\"domain\":[-1.5,1.5]}";
  psvf_field* a = NULL;
  psvf_field* b = NULL;
  OK(psvf_field_from_json(z2, &a));
  double vx = 0, vy = 0;
  OK(psvf_field_eval(a, 1, 0.5, 0.2, &vx, &vy));
  CHECK(vx == 1.0 && fabs(vy - (0.25 - 0.5)) < 1e-15);
  CHECK(psvf_field_from_json("{\"upper\":", &b) == PSVF_E_PARSE);

  psvf_family* k3 = NULL;
  OK(psvf_family_create("k3", 0, &k3));
  OK(psvf_family_field(k3, &b));
  char* s = NULL;
  int pass = 1;
  CHECK(psvf_verify_equivalence(a, b, 1, &s, &pass) == PSVF_E_SKELETON_MISMATCH);
  CHECK(contains(psvf_last_error(), "two-fold"));
  psvf_field_destroy(b);
  psvf_family_destroy(k3);

  psvf_family* k2 = NULL;
  OK(psvf_family_create("k2", 0, &k2));
  OK(psvf_family_field(k2, &b));
  OK(psvf_verify_equivalence(a, b, 1, &s, &pass));
  CHECK(pass == 1);
  psvf_string_free(s);
  OK(psvf_verify_conjugacy(k2, 10, 4, 1, &s, &pass));
  CHECK(pass == 1 && contains(s, "\"checks\""));
  psvf_string_free(s);
  psvf_field_destroy(b);
  psvf_family_destroy(k2);
  psvf_field_destroy(a);
}

int main(void) {
  families();
  nulls();
  trajectories();
  bean();
  symbols_and_metrics();
  fields_and_verification();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
