#pragma once
// Supersample/CMI machinery, the two decoders whose error rates feed Fano
// arguments, exact information computations where enumeration is feasible,
// and the closed-form information lower-bound curves.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdlab/problems.hpp"
#include "gdlab/rng.hpp"

namespace gdlab {

// 2 x n array of iid points plus an independent uniform mask; the derived
// training set takes row mask[i] of column i.
struct MemorizationSupersample {
  std::int64_t n = 0;
  std::int64_t d = 0;
  BitMatrix grid0;                 // row i = Z~(0, i)
  BitMatrix grid1;                 // row i = Z~(1, i)
  std::vector<std::uint8_t> mask;  // n entries in {0, 1}

  Dataset derived() const;
};

struct CoordinateSupersample {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::vector<std::uint32_t> grid0;
  std::vector<std::uint32_t> grid1;
  std::vector<std::uint8_t> mask;

  Dataset derived() const;
};

MemorizationSupersample make_memorization_supersample(std::int64_t n,
                                                      std::int64_t d,
                                                      RngStream& rng);
CoordinateSupersample make_coordinate_supersample(std::int64_t n,
                                                  std::int64_t d,
                                                  RngStream& rng);

// Loss table F(v, i) = f(w, Z~(v, i)) for the coordinate problem.
struct LossTable {
  std::int64_t n = 0;
  std::vector<double> row0;
  std::vector<double> row1;
};
LossTable coordinate_loss_table(const CoordinateSupersample& ss,
                                std::span<const double> w);

// --- Bit-recovery decoder (memorization problem) -------------------------------

// Threshold h = (eta + eta lambda T) / 2; lies strictly between the good
// coordinates' magnitude ceiling eta lambda T and the bad coordinates' eta
// whenever lambda T < 1.
double decoder_threshold(double eta, double lambda, std::int64_t T);

// bit(i) = 1 iff |w(i)| >= h.
std::vector<std::uint8_t> decoder_psi(std::span<const double> w, double h);

struct DecoderReport {
  std::int64_t n = 0;
  double sigma = 0.0;
  double h = 0.0;
  std::int64_t trials = 0;
  std::int64_t error_count = 0;
  double error_rate = 0.0;
  double wilson_halfwidth = 0.0;  // z = 1
};

// Estimates Pr(decoder_psi(project_ball(W_T + xi, 1), h) != B) at the default
// schedule for this n. Each trial samples a dataset histogram, takes the
// closed-form W_T (stepwise simulation outside the event), and draws
// per-bucket binomial noise-exceedance counts (flip probabilities from
// gaussian_tail_q); the trial errs iff any count is nonzero. Trials where
// ||W_T + xi|| > 1 are charged as errors, with the norm overflow drawn from
// its own closed-form law independently of the flip indicators (the coupling
// between the two is negligible at these scales and the charge is
// conservative in the regime that matters).
DecoderReport decoder_error_mc(std::int64_t n, double sigma,
                               std::int64_t trials, std::uint64_t master_seed);

// --- Mask-recovery decoder (supersample) ----------------------------------------

// For each column k: if exactly one of Z~(0,k), Z~(1,k) is all-zero on the
// bad set, that row index is the mask estimate (training points are all-zero
// on every bad coordinate); otherwise guess uniformly.
std::vector<std::uint8_t> u_decoder(const MemorizationSupersample& ss,
                                    std::span<const std::uint32_t> bad_indices,
                                    RngStream& rng);

// E[2^-bad_count] for bad_count ~ Binomial(d, 2^-n): (1 - 2^-(n+1))^d.
double expected_two_pow_neg_bad(std::int64_t n, std::int64_t d);
// Exact full-mask error probability of u_decoder: 1 - E[(1 - 2^-(B+1))^n].
double u_decoder_error_prediction(std::int64_t n, std::int64_t d);

// --- Exact and lower-bound information curves -----------------------------------

// Mutual information between the two-point ERM and its dataset, in bits:
// the ERM is a deterministic majority vote, so this is the binary entropy of
// Pr(sum of signs >= 0), computed exactly from binomial weights.
double tightness_iomi_exact_bits(std::int64_t n);

// Probability that all 2n supersample points are distinct:
// prod_{k=0}^{2n-1} (1 - k/d).
double supersample_distinct_probability(std::int64_t n, std::int64_t d);

struct EcmiEstimate {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t trials = 0;
  // MC estimate of n ln 2 - H(U | F, Z~) by exact per-grid conditional
  // entropy (all 2^n masks enumerated per sampled grid).
  double mc_nats = 0.0;
  double mc_se = 0.0;
  // Certified lower bound Pr(all distinct) * n ln 2.
  double certified_lower_nats = 0.0;
  double pr_all_distinct = 0.0;
};
// Coordinate problem at the default schedule (T = n^2, eta = 1/(n sqrt n)).
// Enumeration is 2^n masks per trial; n is capped at 20.
EcmiEstimate ecmi_coordinate_estimate(std::int64_t n, std::int64_t d,
                                      std::int64_t trials,
                                      std::uint64_t master_seed);

// Ground-truth anchors by full enumeration of all d^(2n) grids and 2^n
// masks; n <= 2 and d <= 8 enforced.
double ecmi_coordinate_exact(std::int64_t n, std::int64_t d);
// Exact per-index CMI I(W; U_1 | Z~(., 1)) under the same enumeration.
double icmi_coordinate_exact(std::int64_t n, std::int64_t d);

// Certified per-index lower bound Pr(all distinct) * ln 2 (nats).
double icmi_coordinate_lower(std::int64_t n, std::int64_t d);

// Information lower bounds for the memorization problem, in bits.
// iomi_lower_memorization: 1.5 n^3 (1 - 2 p_error) - 1.
// iomi_lower_memorization_refined: same with factor (1 - (n+1)/n p_error),
//   reported informationally alongside the primary form.
double iomi_lower_memorization(std::int64_t n, double p_error);
double iomi_lower_memorization_refined(std::int64_t n, double p_error);

// n minus cmi_gap_upper(n), where the gap collects every loss term of the
// mask-recovery chain:
//   n 2^-n^2 + n exp(-n^2/18) + 2 n^5 2^n exp(-2^n/n) + 12 n^3 exp(-n^2/18) + 1.
double cmi_gap_upper(std::int64_t n);
double cmi_lower_memorization(std::int64_t n);

std::string decoder_report_json(const DecoderReport& rep);

}  // namespace gdlab
