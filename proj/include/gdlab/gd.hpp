#pragma once
// Projected subgradient descent: a dense reference engine, exact closed
// forms for both failing constructions, and a compressed-state simulator
// that makes the exponential-dimension memorization problem tractable.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdlab/errors.hpp"
#include "gdlab/problems.hpp"

namespace gdlab {

struct GdConfig {
  static constexpr std::int64_t kDefaultDenseBudget = std::int64_t{1} << 31;

  double eta = 0.0;
  std::int64_t T = 0;
  // Dense runs require d * T <= dense_budget.
  std::int64_t dense_budget = kDefaultDenseBudget;
  bool record_norms = false;
};

// Grouped representation of a memorization-problem iterate. Coordinates with
// equal empirical mean k/n evolve identically, so the iterate is a value per
// bucket k = 1..n plus the dormant ("bad", empirical mean 0) coordinates, of
// which the first bad_activated in ascending index sit at -eta and the rest
// at 0.
struct CompressedIterate {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t t = 0;
  double eta = 0.0;
  double lambda = 0.0;
  std::vector<double> bucket_values;        // index k-1 holds level k/n
  std::vector<std::int64_t> bucket_counts;  // same indexing
  std::int64_t bad_total = 0;
  std::int64_t bad_activated = 0;

  double norm_squared() const;
  double norm() const;
  double coordinate_sum() const;
  // Empirical risk uses per-bucket means k/n; bad coordinates contribute
  // nothing (their empirical mean is 0 and every value is <= 0, so the max
  // term vanishes).
  double empirical_risk() const;
  // Population risk under Bernoulli(1/2)^d.
  double population_risk() const;
  // Sum of counts plus bad_total equals d, and the activation counter obeys
  // min(bad_total, max(t-1, 0)). The dataset whose rows are all zero is the
  // one (unreachable at any simulated scale) exception to the activation
  // law: GD never leaves the origin there, so nothing activates.
  bool summaries_valid() const;
};

struct Trajectory {
  std::vector<double> w;   // final iterate, dense
  double empirical_risk = 0.0;
  std::vector<double> step_norms;  // per-step post-projection norms, if asked
};

// Dense reference engine. Throws std::invalid_argument on eta <= 0 or T < 1
// and ResourceError when d * T exceeds the configured budget.
Trajectory run_gd_dense(const MemorizationProblem& p, const Dataset& ds,
                        const GdConfig& cfg);
Trajectory run_gd_dense(const CoordinateProblem& p, const Dataset& ds,
                        const GdConfig& cfg);

// Closed form for the memorization iterate at step T: bucket k holds
// (lambda/2)(-1 + (1 - 2 eta k/n)^T) and min(bad_total, T-1) bad coordinates
// sit at -eta. Only asserted under the event T/2 <= bad_total <= T; throws
// EventPreconditionError outside it.
CompressedIterate memorization_closed_form(const ColumnHistogram& hist,
                                           double eta, double lambda,
                                           std::int64_t T);

// Coordinate-problem iterate at step t: eta * t * mu while eta t ||mu|| <= 1,
// then frozen at mu / ||mu||.
std::vector<double> coordinate_closed_form(std::span<const double> mu,
                                           double eta, std::int64_t t);

// Step-by-step simulation on the compressed state, valid with or without the
// event. Guards each step that the norm stays below the domain radius and
// that every coordinate except the activating bad one stays nonpositive;
// throws FallbackRequired if either breaks (cannot happen at the default
// schedule, where the closed form certifies both).
CompressedIterate run_gd_compressed(const ColumnHistogram& hist,
                                    const GdConfig& cfg, double lambda);

// Expands a compressed iterate to the dense vector it represents, given the
// per-column set-bit counts of the dataset (bad coordinates activate in
// ascending index order).
std::vector<double> expand_iterate(const CompressedIterate& it,
                                   std::span<const std::uint8_t> column_counts);

struct NormBoundsVerdict {
  double norm = 0.0;
  double lower = 0.0;  // 1 / (2 sqrt(n))
  double upper = 0.0;  // 1 / sqrt(n)
  bool within = false;
};
NormBoundsVerdict gd_norm_bounds_check(const CompressedIterate& it,
                                       std::int64_t n);

// JSON summary {n, eta, T, d, norm, bad_count, bucket_values[]} with values
// rounded to 10 significant digits.
std::string trajectory_summary_json(const CompressedIterate& it);

}  // namespace gdlab
