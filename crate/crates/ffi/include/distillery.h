#ifndef DISTILLERY_H
#define DISTILLERY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DistAlgo {
  DIST_ALGO_ASAP = 0,
  DIST_ALGO_ASAP_MATRIX = 1,
  DIST_ALGO_ALAPT = 2,
  DIST_ALGO_ALAPS = 3,
} DistAlgo;

typedef enum DistOracle {
  DIST_ORACLE_WORST_CASE = 0,
  DIST_ORACLE_STOCHASTIC = 1,
} DistOracle;

typedef enum DistRenderFormat {
  DIST_RENDER_FORMAT_SVG = 0,
  DIST_RENDER_FORMAT_ASCII = 1,
} DistRenderFormat;

typedef enum DistStatus {
  DIST_STATUS_OK = 0,
  DIST_STATUS_NULL_POINTER = 1,
  DIST_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed circuit document or invalid argument value.
   */
  DIST_STATUS_PARSE = 3,
  /**
   * A circuit or schedule broke a semantic rule.
   */
  DIST_STATUS_VALIDATION = 4,
  DIST_STATUS_CAPACITY = 5,
  DIST_STATUS_ORACLE = 6,
  DIST_STATUS_INTERNAL = 7,
} DistStatus;

typedef enum DistStrategy {
  DIST_STRATEGY_REPEAT_UNTIL_SUCCESS = 0,
  DIST_STRATEGY_FIXED_SEQUENCE = 1,
} DistStrategy;

typedef struct DistCircuit DistCircuit;

typedef struct DistSchedule DistSchedule;

typedef struct DistCircuitStats {
  uint32_t width;
  uint32_t ops;
  uint32_t inject_a;
  uint32_t inject_y;
} DistCircuitStats;

typedef struct DistExtra {
  uint64_t s;
  uint64_t n_t;
} DistExtra;

typedef struct DistScheduleConfig {
  enum DistAlgo algo;
  enum DistStrategy strategy;
  enum DistOracle oracle;
  uint64_t seed;
  double p_f;
  double p_c;
  /**
   * Machine qubit limit; 0 means unlimited.
   */
  uint32_t max_wires;
  /**
   * Lanes per type for `AsapMatrix`.
   */
  uint32_t matrix_rows;
  bool pooling;
} DistScheduleConfig;

typedef struct DistMetrics {
  uint64_t t;
  uint64_t s;
  uint64_t bb;
  uint64_t peak_width;
} DistMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *dist_last_error(void);

/**
 * Library version as a static string.
 */
const char *dist_version(void);

void dist_string_free(char *s);

enum DistStatus dist_circuit_from_json(const char *json, struct DistCircuit **out);

void dist_circuit_free(struct DistCircuit *c);

enum DistStatus dist_circuit_stats(const struct DistCircuit *c, struct DistCircuitStats *out);

enum DistStatus dist_min_extra_offline(uint64_t n_i, double p_f, double p_c, struct DistExtra *out);

enum DistStatus dist_min_extra_online(double p_f, double p_c, struct DistExtra *out);

enum DistStatus dist_failure_cdf(uint64_t s, uint64_t n_t, double p_f, double *out);

/**
 * Worst-case ALAPS, repeat until success, at the default reliability.
 */
struct DistScheduleConfig dist_schedule_config_default(void);

/**
 * Schedules `c`. The schedule is returned only if it passes validation.
 */
enum DistStatus dist_schedule_run(const struct DistCircuit *c,
                                  const struct DistScheduleConfig *cfg,
                                  struct DistSchedule **out);

void dist_schedule_free(struct DistSchedule *s);

enum DistStatus dist_schedule_metrics(const struct DistSchedule *s, struct DistMetrics *out);

/**
 * Placement export as JSON.
 */
enum DistStatus dist_schedule_to_json(const struct DistSchedule *s, char **out);

/**
 * Run report as JSON, including the echoed configuration.
 */
enum DistStatus dist_schedule_report_json(const struct DistSchedule *s, char **out);

enum DistStatus dist_schedule_render(const struct DistSchedule *s,
                                     enum DistRenderFormat format,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISTILLERY_H */
