#ifndef UOWC_H
#define UOWC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum UowcStatus {
  UOWC_STATUS_OK = 0,
  UOWC_STATUS_NULL_POINTER = 1,
  UOWC_STATUS_INVALID_ARGUMENT = 2,
  UOWC_STATUS_CONFIG = 3,
  UOWC_STATUS_DOMAIN = 4,
  UOWC_STATUS_INFEASIBLE = 5,
  UOWC_STATUS_NO_ROUTE = 6,
  UOWC_STATUS_SOLVER = 7,
  UOWC_STATUS_IO = 8,
  UOWC_STATUS_PANIC = 9,
} UowcStatus;

typedef enum UowcPointingCase {
  UOWC_POINTING_CASE_PERFECT_PAT = 1,
  UOWC_POINTING_CASE_UNCERTAIN_PAT = 2,
  UOWC_POINTING_CASE_NO_PAT = 3,
} UowcPointingCase;

typedef enum UowcObjective {
  UOWC_OBJECTIVE_BER = 0,
  UOWC_OBJECTIVE_RATE = 1,
  UOWC_OBJECTIVE_POWER = 2,
  UOWC_OBJECTIVE_LIPAR = 3,
} UowcObjective;

typedef enum UowcScheme {
  UOWC_SCHEME_DF = 0,
  UOWC_SCHEME_AF = 1,
} UowcScheme;

typedef enum UowcFailReason {
  UOWC_FAIL_REASON_NONE = 0,
  UOWC_FAIL_REASON_DISCONNECTED = 1,
  UOWC_FAIL_REASON_INFEASIBLE_TARGET = 2,
  UOWC_FAIL_REASON_DEAD_END = 3,
  UOWC_FAIL_REASON_HOP_BUDGET = 4,
} UowcFailReason;

/**
 * Opaque result of a campaign.
 */
typedef struct UowcCampaign UowcCampaign;

/**
 * Opaque simulator configuration.
 */
typedef struct UowcConfig UowcConfig;

/**
 * Geometry and budget of one link.
 */
typedef struct UowcLinkBudget {
  double distance_m;
  double phi_rad;
  double psi_rad;
  double theta_half_rad;
  double gain;
  double received_w;
  double p0;
  double p1;
  double ber;
  double rate_bps;
} UowcLinkBudget;

/**
 * Outcome of one Monte Carlo trial. Path metrics are NaN on failure.
 */
typedef struct UowcTrialResult {
  bool success;
  enum UowcFailReason fail_reason;
  uint32_t hops;
  double e2e_ber;
  double e2e_rate_bps;
  double total_power_w;
  double bsr;
} UowcTrialResult;

/**
 * Campaign aggregate; means are over successful trials.
 */
typedef struct UowcAggregate {
  uint64_t trials;
  double fail_frac;
  double mean_hops;
  double mean_rate_bps;
  double mean_power_w;
  double mean_bsr;
  double stderr_rate;
  double stderr_power;
} UowcAggregate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *uowc_last_error(void);

/**
 * New configuration holding the defaults. Never NULL.
 */
struct UowcConfig *uowc_config_new(void);

/**
 * Parses TOML text into a new configuration stored in `*out`.
 */
enum UowcStatus uowc_config_from_toml(const char *toml, struct UowcConfig **out);

/**
 * Sets one configuration key from its text value; the configuration is
 * left unchanged on error.
 */
enum UowcStatus uowc_config_set(struct UowcConfig *cfg, const char *key, const char *value);

/**
 * Releases a configuration; NULL is ignored.
 */
void uowc_config_free(struct UowcConfig *cfg);

/**
 * Budget of a link of length `distance_m` whose receiver sits `offset_rad`
 * off the transmitter's pointing line, at the configured transmit power.
 */
enum UowcStatus uowc_link_budget(const struct UowcConfig *cfg,
                                 double distance_m,
                                 enum UowcPointingCase pointing_case,
                                 double offset_rad,
                                 struct UowcLinkBudget *out);

/**
 * Runs trial `index` of the configured seed. A routing failure is not an
 * error: it returns `Ok` with `success == false` and the reason set.
 */
enum UowcStatus uowc_run_trial(const struct UowcConfig *cfg,
                               enum UowcObjective objective,
                               enum UowcScheme scheme,
                               enum UowcPointingCase pointing_case,
                               uint64_t index,
                               struct UowcTrialResult *out);

/**
 * Runs the configured number of trials in parallel; the result is stored
 * in `*out` and is identical for any thread count.
 */
enum UowcStatus uowc_campaign_run(const struct UowcConfig *cfg,
                                  enum UowcObjective objective,
                                  enum UowcScheme scheme,
                                  enum UowcPointingCase pointing_case,
                                  struct UowcCampaign **out);

enum UowcStatus uowc_campaign_aggregate(const struct UowcCampaign *campaign,
                                        struct UowcAggregate *out);

/**
 * Writes `aggregate.csv`, `trials.csv` and `failures.csv` into `dir`,
 * creating it if needed.
 */
enum UowcStatus uowc_campaign_write_csv(const struct UowcCampaign *campaign, const char *dir);

void uowc_campaign_free(struct UowcCampaign *campaign);

/**
 * End-to-end BER of a decode-and-forward chain with hop BERs `bers`.
 */
enum UowcStatus uowc_e2e_ber_df(const double *bers, size_t len, double *out);

/**
 * Sink SNR of an amplify-and-forward chain with hop SNRs `gammas`.
 */
enum UowcStatus uowc_sink_snr(const double *gammas, size_t len, double *out);

/**
 * Principal branch of the Lambert W function.
 */
enum UowcStatus uowc_lambert_w0(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UOWC_H */
