#pragma once
// Gaussian perturbation of the final GD iterate and Monte-Carlo estimation
// of the residual terms: the expected absolute change of population and
// empirical risk under w -> project_ball(w + xi, 1), xi ~ N(0, sigma^2 I_d).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdlab/gd.hpp"
#include "gdlab/problems.hpp"
#include "gdlab/rng.hpp"

namespace gdlab {

struct SurrogateConfig {
  double sigma = 0.0;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  // Trial j draws from stream stream_base + j, so estimates are independent
  // of execution order and thread count.
  std::uint64_t stream_base = 0;
  // Budget on d * trials for the dense path.
  std::int64_t dense_budget = GdConfig::kDefaultDenseBudget;

  // The noise-variance threshold separating the two failure regimes:
  // (beta*)^2 / d with beta* = 0.1.
  static double sigma_star_squared(std::int64_t d);
};

struct ResidualEstimate {
  std::int64_t n = 0;
  std::int64_t d = 0;
  double sigma = 0.0;
  std::int64_t trials = 0;
  double delta_pop = 0.0;
  double delta_pop_se = 0.0;
  // Empirical-risk residual; only the dense path produces it.
  bool has_emp = false;
  double delta_emp = 0.0;
  double delta_emp_se = 0.0;
  // Largest sampled |F(w~)-F(w)| + |Fhat(w~)-Fhat(w)| and the worst margin
  // against the per-sample Lipschitz cap 2 L_eff ||w~ - w|| (<= 0 when the
  // cap holds; dense path only).
  double max_pair_sum = 0.0;
  double cap_margin = 0.0;
};

// project_ball(w + xi, 1). sigma = 0 returns w unchanged.
std::vector<double> perturb(std::span<const double> w, double sigma,
                            RngStream& rng);

// Dense MC over cfg.trials independent perturbations. Throws ResourceError
// (pointing at residual_mc_summaries) when d * trials exceeds the budget.
ResidualEstimate residual_mc_dense(const MemorizationProblem& p,
                                   const Dataset& ds,
                                   std::span<const double> w_final,
                                   const SurrogateConfig& cfg);

// Population-only sampler for dimensions where xi cannot be materialized.
// The population risk depends only on ||w~||^2, sum_i w~(i) and max_i w~(i);
// those scalars are drawn from their closed-form laws: ||xi||^2 from a
// Gamma(d/2, 2 sigma^2) law, (<w, xi>, sum_i xi(i)) as a correlated Gaussian
// pair with covariance sigma^2 sum_i w(i), and per-bucket maxima by inverse
// CDF of the max of `count` iid Gaussians shifted by the bucket value. The
// max statistic is sampled independently of the sum statistics; that
// approximation is validated against the dense path in the tests.
ResidualEstimate residual_mc_summaries(const CompressedIterate& it,
                                       double sigma, std::int64_t trials,
                                       std::uint64_t master_seed,
                                       std::uint64_t stream_base);

// {n, d, sigma, trials, delta_pop, delta_pop_se, delta_emp, delta_emp_se};
// the emp fields serialize as null when the estimate has none.
std::string residual_estimate_json(const ResidualEstimate& est);

}  // namespace gdlab
