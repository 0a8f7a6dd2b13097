#pragma once
// Scalar special functions, information measures, and vector samplers shared
// by every other module. All entropies and divergences are in nats unless a
// name says otherwise; conversions to bits happen at reporting boundaries.

#include <cstdint>
#include <span>
#include <vector>

#include "gdlab/rng.hpp"

namespace gdlab {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

// Probability-like value; alias used to mark return types that live in [0,1]
// up to rounding.
using ProbValue = double;

// --- Euclidean geometry -----------------------------------------------------

// Projects w onto the closed ball of the given radius (in place variant and
// value variant). Throws std::invalid_argument on non-finite input or
// negative radius.
std::vector<double> project_ball(std::span<const double> w, double radius);
void project_ball_inplace(std::vector<double>& w, double radius);

double norm2(std::span<const double> w);
double dot(std::span<const double> a, std::span<const double> b);

// Fixed-shape pairwise (binary tree) summation: the result depends only on
// the values and their order, never on thread count or chunking.
double pairwise_sum(std::span<const double> x);
double mean(std::span<const double> x);
// Sample standard error of the mean (pairwise-summed, n >= 2).
double std_error(std::span<const double> x);

// --- Gaussian tail and quantile ---------------------------------------------

// Q(x) = P(N(0,1) > x), absolute error < 1e-12 for |x| <= 8 (and far smaller
// in the tails, where erfc keeps relative accuracy).
ProbValue gaussian_tail_q(double x);

// Inverse standard normal CDF (Wichura's AS 241, double precision). Domain
// (0,1); throws std::invalid_argument outside.
double normal_quantile(double p);

// --- Entropy and divergence (nats) -------------------------------------------

// Binary entropy h(p) = -p ln p - (1-p) ln(1-p), with h(0) = h(1) = 0.
double binary_entropy(double p);
double binary_entropy_bits(double p);

// KL(p || q) for discrete laws given as aligned vectors. Returns +infinity
// when p puts mass outside q's support. Throws std::invalid_argument for
// negative entries, mismatched lengths, or masses that do not sum to 1
// within 1e-9.
double kl_discrete(std::span<const double> p, std::span<const double> q);

// KL(P || sum_i w_i Q_i) <= min_i (KL(P || Q_i) - ln w_i): returns that upper
// bound given the per-component divergences and the mixture weights. Throws
// std::invalid_argument on empty input, mismatched lengths, or weights that
// are not a probability vector.
double mixture_kl_upper(std::span<const double> kl_components,
                        std::span<const double> weights);

// Reverse Markov: for a <= X <= m_tilde a.s. and a < m <= m_tilde,
//   P(X >= a) >= (E[X] - a - (m_tilde - m) P(X >= m)) / (m - a).
// Returns the raw right-hand side (possibly <= 0; callers clamp at report
// time). Throws std::invalid_argument when a >= m or m > m_tilde.
double reverse_markov_lower(double mean_x, double a, double m, double m_tilde,
                            double prob_x_ge_m);

// Fano-style conditional entropy bound:
//   H(X | X_hat) <= min( h(p) + p * log_cardinality,
//                        ln 2 + p * log_cardinality )
// where p is the error probability and log_cardinality = ln |support| - ish
// budget for the wrong-guess entropy. All nats.
double fano_entropy_upper(double p_error, double log_cardinality);

// exp with explicit underflow to zero for arguments below -745 (documented
// cutoff; avoids raising FE_UNDERFLOW noise in long product loops).
double exp_safe(double x);

// Regularized lower incomplete gamma P(a, x); used for chi-square CDFs in
// the statistical self-checks. Absolute error ~1e-13 on the tested range.
double gamma_p(double a, double x);
double chi_square_cdf(double x, double dof);

// Wilson score interval half-width at z for k successes in n trials.
double wilson_halfwidth(std::int64_t successes, std::int64_t trials, double z);

// --- Samplers ----------------------------------------------------------------

// dim iid N(0, sigma^2) coordinates. sigma = 0 yields the zero vector and
// consumes no draws, so callers that depend on a stream's draw count should
// not mix sigma = 0 and sigma > 0 on the same stream.
std::vector<double> sample_gaussian_vector(std::size_t dim, double sigma,
                                           RngStream& rng);

// rows x cols iid Bernoulli(p) bits, packed row-major, 64 columns per word.
// Returned as the raw word array; problems.hpp wraps it in BitMatrix.
std::vector<std::uint64_t> sample_bernoulli_words(std::size_t rows,
                                                  std::size_t cols, double p,
                                                  RngStream& rng);

std::int64_t sample_binomial(std::int64_t count, double p, RngStream& rng);

}  // namespace gdlab
