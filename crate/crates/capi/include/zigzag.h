/* C interface for the zigzag verification suites.
 *
 * Maintained by hand to match crates/capi/src/lib.rs (one declaration per
 * exported symbol; keep the two files in sync when the ABI changes).
 *
 * Ownership rules:
 *   - Strings returned by this library are released with zz_string_free.
 *   - Report handles are released with zz_report_free.
 *   - Passing NULL to a free function is a no-op.
 */

#ifndef ZIGZAG_H
#define ZIGZAG_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque report handle. */
typedef struct ZzReport ZzReport;

/* Status codes returned by the suite runners. */
typedef enum ZzStatus {
  ZZ_OK = 0,                 /* success */
  ZZ_ERR_NULL_ARG = 1,       /* a required pointer argument was null */
  ZZ_ERR_INVALID_CONFIG = 2, /* config failed to parse or validate */
  ZZ_ERR_UTF8 = 3,           /* config string was not valid UTF-8 */
  ZZ_ERR_PANIC = 4,          /* internal panic was caught */
} ZzStatus;

/* Suite runners.  config_toml is a TOML document (same schema as the CLI's
 * --config file) or NULL for defaults.  On ZZ_OK, *out owns a handle. */
ZzStatus zz_run_verify_zigzag(const char *config_toml, ZzReport **out);
ZzStatus zz_run_verify_pathspace(const char *config_toml, ZzReport **out);
ZzStatus zz_run_cohomology(const char *config_toml, ZzReport **out);

/* 1 if every check passed, 0 if any failed, -1 on a null handle. */
int32_t zz_report_all_pass(const ZzReport *report);

/* Number of checks in the report, or -1 on a null handle. */
int32_t zz_report_check_count(const ZzReport *report);

/* The full report as JSON; NULL on a null handle.  Free with
 * zz_string_free. */
char *zz_report_to_json(const ZzReport *report);

/* Hex SHA-256 digest of the frozen sign conventions.  Free with
 * zz_string_free. */
char *zz_sign_convention_digest(void);

/* Release functions. */
void zz_string_free(char *s);
void zz_report_free(ZzReport *report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ZIGZAG_H */
