#pragma once
// Closed-form evaluators for the generalization, optimization, excess-risk,
// and PAC-Bayes bounds, used both as report columns and as test oracles.
// Information arguments are in nats; conversions happen at call sites.

#include <cstdint>
#include <span>

namespace gdlab {

// L R sqrt(2 iomi / n) and L R sqrt(8 cmi / n).
double ege_from_iomi(double L, double R, std::int64_t n, double iomi_nats);
double ege_from_cmi(double L, double R, std::int64_t n, double cmi_nats);

// (L R / n) sum_i sqrt(2 I_i) and (2 L R / n) sum_i sqrt(2 CMI_i); the
// sequence length must equal n (std::invalid_argument otherwise).
double ege_individual_iomi(double L, double R, std::int64_t n,
                           std::span<const double> per_sample_mi);
double ege_individual_cmi(double L, double R, std::int64_t n,
                          std::span<const double> per_sample_cmi);

// L R sqrt(8 ecmi / n).
double ege_from_ecmi(double L, double R, std::int64_t n, double ecmi_nats);

// Final-iterate optimization error R^2/(2 eta T) + (ln T + 2) eta L^2 / 2,
// generalization error 4 L^2 sqrt(T) eta + 4 L^2 T eta / n, and their sum
// (the excess-risk bound, computed literally as the sum so the identity is
// exact in floating point).
double gd_opt_error(double eta, std::int64_t T, double L, double R);
double gd_gen_error(double eta, std::int64_t T, double L, std::int64_t n);
double gd_excess_risk(double eta, std::int64_t T, double L, double R,
                      std::int64_t n);

// Bit-recovery decoder error bound n^2 2^n exp(-2^n/n) + 6 exp(-n^2/18),
// evaluated in log space.
double proberror_bound(std::int64_t n);

// L R sqrt((complexity + ln(n/delta)) / n), the order-only instantiation
// with constant 1 (flagged as such in every report). Requires 0 < delta < 1
// and complexity >= 0.
double pac_bayes_gen_bound(double L, double R, std::int64_t n, double delta,
                           double complexity);

// Uniform complexity bound under the memorization problem's good event:
// (5/2) n T + 1 = 5 n^3 + 1 at the default schedule.
double good_event_complexity(std::int64_t n);

// The three high-probability lower bounds for the events driving the
// PAC-Bayes failure argument, with the complexity thresholds they certify.
// The classical branch's derivation needs n >= 16 to clear 0.1; the raw
// formula value is returned either way with the validity flag set
// accordingly. Probabilities are raw bound values, clamped only in reports.
struct PacBayesFailureConstants {
  double residual_prob = 0.0;       // M_res / 32
  double conditional_prob = 0.0;    // 1/9
  double classical_prob = 0.0;      // (0.6n^3 - 0.5 - 3n^3 2^n e^{-n^2/18})
                                    //   / (4.4n^3 + 1.5)
  double conditional_threshold = 0.0;  // 0.1 n
  double classical_threshold = 0.0;    // 0.6 n^3 - 0.5
  bool classical_branch_valid = false;
};
PacBayesFailureConstants pacbayes_failure_constants(std::int64_t n,
                                                    double M_res);

}  // namespace gdlab
