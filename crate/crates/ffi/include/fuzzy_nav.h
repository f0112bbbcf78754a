#ifndef FUZZY_NAV_H
#define FUZZY_NAV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FnavStatus {
  FNAV_STATUS_OK = 0,
  FNAV_STATUS_NULL_POINTER = 1,
  FNAV_STATUS_INVALID_ARGUMENT = 2,
  FNAV_STATUS_INVALID_UTF8 = 3,
  FNAV_STATUS_INVALID_RULES = 4,
  FNAV_STATUS_INVALID_SCENARIO = 5,
  FNAV_STATUS_PANIC = 6,
} FnavStatus;

// Opaque inference handle.
typedef struct FnavController FnavController;

typedef struct FnavWheelSpeeds {
  double v_l;
  double v_r;
} FnavWheelSpeeds;

typedef struct FnavPose {
  double x;
  double y;
  double theta;
} FnavPose;

typedef struct FnavErrors {
  double e_d;
  double e_theta;
} FnavErrors;

typedef struct FnavRobotParams {
  double wheel_base;
  double wheel_radius;
  double v_max;
} FnavRobotParams;

typedef struct FnavTwist {
  double v;
  double omega;
} FnavTwist;

// Run summary. Times are NaN when the matching `has_` flag is false.
typedef struct FnavMetrics {
  bool reached;
  bool has_time_to_target;
  double time_to_target;
  bool has_time_angle_aligned;
  double time_angle_aligned;
  double path_length;
  size_t rule_count;
  // Number of trajectory samples, including the initial one.
  size_t samples;
} FnavMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *fnav_last_error(void);

// Creates a controller from a built-in grid with 3, 5 or 7 terms per variable.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum FnavStatus fnav_controller_new_builtin(uint32_t terms, struct FnavController **out);

// Creates a controller from rules file text.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum FnavStatus fnav_controller_from_rules(const char *text, struct FnavController **out);

// Releases a controller. NULL is ignored.
//
// # Safety
// `ctrl` must come from a constructor in this library and not be used again.
void fnav_controller_free(struct FnavController *ctrl);

// # Safety
// `ctrl` must be a live handle; `out` must be writable.
enum FnavStatus fnav_controller_rule_count(const struct FnavController *ctrl, size_t *out);

// Wheel speeds for a heading error (rad) and distance error (m). Inputs
// outside the universes are clamped.
//
// # Safety
// `ctrl` must be a live handle; `out` must be writable.
enum FnavStatus fnav_controller_infer(const struct FnavController *ctrl,
                                      double e_theta,
                                      double e_d,
                                      struct FnavWheelSpeeds *out);

// # Safety
// `pose` must be readable; `out` must be writable.
enum FnavStatus fnav_compute_errors(const struct FnavPose *pose,
                                    double goal_x,
                                    double goal_y,
                                    struct FnavErrors *out);

// # Safety
// `params` must be readable; `out` must be writable.
enum FnavStatus fnav_wheel_to_twist(const struct FnavRobotParams *params,
                                    struct FnavWheelSpeeds wheels,
                                    struct FnavTwist *out);

// Advances `pose` in place by one forward-Euler step.
//
// # Safety
// `pose` must be readable and writable.
enum FnavStatus fnav_step_euler(struct FnavPose *pose, struct FnavTwist twist, double dt);

// Advances `pose` in place along the exact constant-twist arc.
//
// # Safety
// `pose` must be readable and writable.
enum FnavStatus fnav_step_exact(struct FnavPose *pose, struct FnavTwist twist, double dt);

// Runs a scenario given as TOML text. Relative rules-file paths resolve
// against the current directory.
//
// # Safety
// `scenario_toml` must be a NUL-terminated string; `out` must be writable.
enum FnavStatus fnav_run_scenario(const char *scenario_toml, struct FnavMetrics *out);

// Renders a built-in rule base as rules file text. Free the result with
// [`fnav_string_free`].
//
// # Safety
// `out` must be writable.
enum FnavStatus fnav_export_rules(uint32_t terms, char **out);

// Validates rules file text. Returns `FNAV_STATUS_INVALID_RULES` and stores
// the diagnostics, one per line, in `*diagnostics` (free with
// [`fnav_string_free`]); on success `*diagnostics` is NULL.
//
// # Safety
// `text` must be a NUL-terminated string; `diagnostics` must be writable.
enum FnavStatus fnav_validate_rules(const char *text, char **diagnostics);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used again.
void fnav_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZY_NAV_H */
