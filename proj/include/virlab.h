#ifndef VIRLAB_H
#define VIRLAB_H

/* C interface of the virlab core.  Every entry point takes JSON text and
 * returns JSON text; exact rationals travel as strings ("3/4"), sampled
 * data as floats.  Returned strings are owned by the caller and must be
 * released with vl_free. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vl_status {
    VL_OK = 0,
    VL_FLAGGED = 1,       /* suite ran, deviations were flagged */
    VL_PARSE_ERROR = 2,   /* malformed JSON or a bad request shape */
    VL_DOMAIN_ERROR = 3,  /* input outside the defined domain */
    VL_NUMERIC_ERROR = 4, /* residual target out of reach, no solution */
    VL_INTERNAL_ERROR = 5
} vl_status;

typedef struct vl_session vl_session;

vl_session* vl_session_new(void);
void vl_session_free(vl_session* s);

/* Session knobs, all optional:
 *   "level"    truncation level for graded computations (default 6)
 *   "modes"    Fourier modes for sampled circle maps     (default 64)
 *   "max-iter" cap on welding refinement passes          (default 60)
 *   "tol"      residual target for sampled welding       (default 1e-10)
 *   "seed"     base seed for randomized checks           (default 20260815)
 */
vl_status vl_session_set(vl_session* s, const char* key, const char* value);

/* Runs one command ("mobius", "algebra", "verma", "qpft", "weld", "train")
 * against a request object whose "op" field selects the operation.  On
 * success *response_json holds the reply. */
vl_status vl_run_command(vl_session* s, const char* command, const char* request_json,
                         char** response_json);

/* Runs the conformance suite and stores the full report.  VL_OK when every
 * check passes, VL_FLAGGED when recorded deviations were hit (the report
 * lists them), VL_NUMERIC_ERROR when a check fails outright. */
vl_status vl_conformance_run(vl_session* s, char** report_json);

/* Message of the last failure on this thread, empty string when none. */
const char* vl_last_error(void);

void vl_free(char* p);

#ifdef __cplusplus
}
#endif

#endif /* VIRLAB_H */
