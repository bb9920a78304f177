/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C API of the liprnet shared library. All state lives behind an opaque
 * handle; every entry point returns a status code, with a message
 * retrievable from the handle.
 */

#ifndef LIPR_C_H
#define LIPR_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lipr_run lipr_run;

enum {
  LIPR_OK = 0,
  LIPR_ERR_CONFIG = 1,   /* invalid configuration */
  LIPR_ERR_IO = 2,       /* filesystem failure */
  LIPR_ERR_NUMERIC = 3,  /* non-finite loss or failed run */
  LIPR_ERR_CHECK = 4,    /* verification/gradcheck threshold violated */
  LIPR_ERR_ARGUMENT = 5  /* null handle or bad argument */
};

/* Creates a run handle from a config file. On failure returns a nonzero
 * code and, when errbuf is non-null, writes a diagnostic (truncated to
 * errlen - 1 characters). */
int lipr_open(const char* config_path, lipr_run** out, char* errbuf,
              int errlen);
void lipr_close(lipr_run* run);

/* Command-line overrides applied after loading. */
int lipr_set_seed(lipr_run* run, uint64_t seed);
int lipr_set_out_dir(lipr_run* run, const char* dir);
int lipr_set_workers(lipr_run* run, int workers);

/* Commands; artifacts are written under the configured output directory. */
int lipr_train(lipr_run* run);
int lipr_sweep(lipr_run* run);
int lipr_verify(lipr_run* run);
int lipr_gradcheck(lipr_run* run);

/* Message for the most recent nonzero status; empty string otherwise.
 * Valid until the next call on the same handle. */
const char* lipr_last_error(const lipr_run* run);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIPR_C_H */
