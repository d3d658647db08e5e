/* SPDX-License-Identifier: Apache-2.0 */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sigmalab/sigmalab.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void philox(void) {
  const uint32_t ctr[4] = {0, 0, 0, 0};
  const uint32_t key[2] = {0, 0};
  uint32_t out[4];
  sl_philox4x32(ctr, key, out);
  EXPECT(out[0] == 0x6627e8d5u && out[1] == 0xe169c58du && out[2] == 0xbc57ac4cu && out[3] == 0x9b00dbd8u);
}

static void increments(void) {
  double a[64], b[64];
  EXPECT(sl_gaussian_increments(3, 1, 1e-3, 64, a) == SL_OK);
  EXPECT(sl_gaussian_increments(3, 1, 1e-3, 64, b) == SL_OK);
  EXPECT(memcmp(a, b, sizeof a) == 0);
  EXPECT(sl_gaussian_increments(3, 1, -1.0, 64, a) == SL_ERR_CONFIG);
  EXPECT(strlen(sl_last_error()) > 0);
}

static void psi_phi(void) {
  const double x[2] = {2.0, 1.0};
  double out[2];
  EXPECT(sl_psi_eval("exp:1", x, 2, out) == SL_OK);
  EXPECT(fabs(out[0] - 2.0) < 1e-4 && fabs(out[1] - 0.5) < 1e-4);
  const double z[1] = {2.0};
  EXPECT(sl_phi_eval("exp:1", z, 1, out) == SL_OK);
  EXPECT(fabs(out[0] - 2.0) < 1e-4);
  EXPECT(sl_psi_eval("cauchy:1", x, 2, out) == SL_ERR_CONFIG);
}

static void config(void) {
  sl_config* cfg = NULL;
  char* text = NULL;
  EXPECT(sl_config_new(&cfg) == SL_OK);
  EXPECT(sl_config_merge_json(cfg, "{\"seed\": 9, \"n_paths\": 400}") == SL_OK);
  EXPECT(sl_config_merge_json(cfg, "{\"mystery\": 1}") == SL_ERR_CONFIG);
  EXPECT(sl_config_merge_json(cfg, "{not json") == SL_ERR_CONFIG);
  EXPECT(sl_config_set(cfg, "law", "uniform:0,1") == SL_OK);
  EXPECT(sl_config_set(cfg, "dt", "-2") == SL_ERR_CONFIG);
  EXPECT(sl_config_set_threads(cfg, 2) == SL_OK);
  EXPECT(sl_config_to_json(cfg, &text) == SL_OK);
  EXPECT(text != NULL && strstr(text, "\"law\":\"uniform:0,1\"") != NULL);
  sl_string_free(text);
  EXPECT(sl_config_merge_file(cfg, "/nonexistent/cfg.json") == SL_ERR_CONFIG);
  EXPECT(sl_config_set(NULL, "seed", "1") == SL_ERR_ARGUMENT);
  sl_config_free(cfg);
}

static void identities(void) {
  size_t i, n = sl_identity_count();
  sl_config* cfg = NULL;
  sl_report* r1 = NULL;
  sl_report* r2 = NULL;
  char *j1 = NULL, *j2 = NULL, *csv = NULL;
  sl_check check;
  int found = 0;
  EXPECT(n == 10);
  for (i = 0; i < n; ++i) found += strcmp(sl_identity_id(i), "doob-maximal") == 0;
  EXPECT(found == 1);
  EXPECT(sl_identity_id(n) == NULL);

  sl_config_new(&cfg);
  sl_config_set(cfg, "n_paths", "2000");
  EXPECT(sl_run_identity(cfg, "doob-maximal", &r1) == SL_OK);
  EXPECT(sl_run_identity(cfg, "doob-maximal", &r2) == SL_OK);
  EXPECT(sl_report_check_count(r1) >= 1);
  EXPECT(sl_report_check(r1, 0, &check) == SL_OK);
  EXPECT(strcmp(check.name, "hit_probability") == 0);
  EXPECT(fabs(check.target - 0.5) < 1e-15);
  EXPECT(sl_report_check(r1, 99, &check) == SL_ERR_ARGUMENT);
  EXPECT(sl_report_json(r1, &j1) == SL_OK);
  EXPECT(sl_report_json(r2, &j2) == SL_OK);
  EXPECT(strcmp(j1, j2) == 0);
  EXPECT(sl_report_csv(r1, &csv) == SL_OK);
  EXPECT(strncmp(csv, "identity,estimate,target,se,pass\n", 33) == 0);
  EXPECT(sl_report_pass(r1) == 1);
  EXPECT(sl_run_identity(cfg, "no-such-identity", &r2 + 0) == SL_ERR_CONFIG);
  sl_string_free(j1);
  sl_string_free(j2);
  sl_string_free(csv);
  sl_report_free(r1);
  sl_report_free(r2);
  sl_config_free(cfg);
}

static void commands(void) {
  sl_config* cfg = NULL;
  char* summary = NULL;
  sl_config_new(&cfg);
  sl_config_set(cfg, "output_dir", "capi-out/psi");
  sl_config_set(cfg, "law", "exp:1");
  EXPECT(sl_cmd_psi(cfg, &summary) == SL_OK);
  EXPECT(summary != NULL);
  sl_string_free(summary);
  sl_config_set(cfg, "law", "csv:/nonexistent.csv");
  EXPECT(sl_cmd_psi(cfg, &summary) == SL_ERR_CONFIG);
  EXPECT(summary == NULL);
  sl_config_free(cfg);
}

int main(void) {
  printf("sigmalab %s\n", sl_version());
  philox();
  increments();
  psi_phi();
  config();
  identities();
  commands();
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
