/* Reads a case and area from files, prints the area angle and the scan CSV. */
#include <stdio.h>
#include <stdlib.h>

#include "area_angle.h"

static char *slurp(const char *path) {
  FILE *f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  rewind(f);
  char *buf = malloc(n + 1);
  if (fread(buf, 1, n, f) != (size_t)n) { fclose(f); free(buf); return NULL; }
  buf[n] = 0;
  fclose(f);
  return buf;
}

int main(int argc, char **argv) {
  if (argc != 3) {
    fprintf(stderr, "usage: %s case.json area.json\n", argv[0]);
    return 64;
  }
  char *case_json = slurp(argv[1]);
  char *area_json = slurp(argv[2]);
  if (!case_json || !area_json) {
    fprintf(stderr, "cannot read inputs\n");
    return 66;
  }
  AaNetwork *net = NULL;
  AaArea *area = NULL;
  AaReport *report = NULL;
  AaStatus s = aa_network_from_json(case_json, &net);
  if (s == AA_STATUS_OK) s = aa_area_from_json(net, area_json, &area);
  if (s == AA_STATUS_OK) s = aa_scan(net, area, 0, 1, &report);
  if (s != AA_STATUS_OK) {
    fprintf(stderr, "error %d: %s\n", (int)s, aa_last_error());
  } else {
    AaBaseline base;
    aa_report_baseline(report, &base);
    printf("theta_area_rad %.9f\nb_area %.9f\np_area %.9f\n", base.theta_area_rad,
           base.b_area, base.p_area);
    for (size_t i = 0; i < base.border_count; i++) {
      AaBorderWeight w;
      aa_report_weight(report, i, &w);
      printf("weight %u %c %.9f\n", w.bus, w.side, w.weight);
    }
    char *csv = aa_report_to_csv(report);
    fputs(csv, stdout);
    aa_string_free(csv);
  }
  aa_report_free(report);
  aa_area_free(area);
  aa_network_free(net);
  free(case_json);
  free(area_json);
  return s == AA_STATUS_OK ? 0 : (int)s;
}
