#include "gdlab/gd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gdlab/report.hpp"
#include "json.hpp"

namespace gdlab {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void validate_config(const GdConfig& cfg) {
  require(cfg.eta > 0.0, "GdConfig: eta must be positive");
  require(cfg.T >= 1, "GdConfig: T must be >= 1");
}

// Largest coordinate value the compressed state represents, counting only
// populations that exist.
double compressed_max_value(const CompressedIterate& it) {
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < it.bucket_values.size(); ++k) {
    if (it.bucket_counts[k] == 0) continue;
    mx = std::max(mx, it.bucket_values[k]);
    any = true;
  }
  if (it.bad_activated > 0) {
    mx = std::max(mx, -it.eta);
    any = true;
  }
  if (it.bad_total > it.bad_activated) {
    mx = std::max(mx, 0.0);
    any = true;
  }
  return any ? mx : 0.0;
}

}  // namespace

double CompressedIterate::norm_squared() const {
  double ss = 0.0;
  for (std::size_t k = 0; k < bucket_values.size(); ++k)
    ss += static_cast<double>(bucket_counts[k]) * bucket_values[k] *
          bucket_values[k];
  ss += static_cast<double>(bad_activated) * eta * eta;
  return ss;
}

double CompressedIterate::norm() const { return std::sqrt(norm_squared()); }

double CompressedIterate::coordinate_sum() const {
  double s = 0.0;
  for (std::size_t k = 0; k < bucket_values.size(); ++k)
    s += static_cast<double>(bucket_counts[k]) * bucket_values[k];
  s -= static_cast<double>(bad_activated) * eta;
  return s;
}

double CompressedIterate::empirical_risk() const {
  // Bad coordinates have empirical mean 0, so only the buckets contribute to
  // the data terms; the max term comes from the full coordinate population.
  double risk = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < bucket_values.size(); ++k) {
    if (bucket_counts[k] == 0) continue;
    const double level = static_cast<double>(k + 1) / dn;
    const double v = bucket_values[k];
    risk += static_cast<double>(bucket_counts[k]) * level * (v * v + lambda * v);
  }
  return risk + std::max(compressed_max_value(*this), 0.0);
}

double CompressedIterate::population_risk() const {
  double ss = 0.0, s = 0.0;
  for (std::size_t k = 0; k < bucket_values.size(); ++k) {
    const double v = bucket_values[k];
    const double c = static_cast<double>(bucket_counts[k]);
    ss += c * v * v;
    s += c * v;
  }
  ss += static_cast<double>(bad_activated) * eta * eta;
  s -= static_cast<double>(bad_activated) * eta;
  return 0.5 * ss + 0.5 * lambda * s +
         std::max(compressed_max_value(*this), 0.0);
}

bool CompressedIterate::summaries_valid() const {
  std::int64_t good = 0;
  for (std::int64_t c : bucket_counts) {
    if (c < 0) return false;
    good += c;
  }
  if (good + bad_total != d) return false;
  if (good == 0) return bad_activated == 0;  // GD never leaves the origin
  const std::int64_t expected =
      std::min(bad_total, std::max<std::int64_t>(t - 1, 0));
  return bad_activated == expected;
}

Trajectory run_gd_dense(const MemorizationProblem& p, const Dataset& ds,
                        const GdConfig& cfg) {
  validate_config(cfg);
  require(ds.tag == ProblemTag::kMemorization && ds.d == p.d && ds.n == p.n,
          "run_gd_dense: dataset does not match problem");
  if (p.d * cfg.T > cfg.dense_budget)
    throw ResourceError(
        "run_gd_dense: d*T exceeds the dense budget; use run_gd_compressed");
  const std::vector<double> mu = empirical_mean(ds);
  const std::size_t d = static_cast<std::size_t>(p.d);
  std::vector<double> w(d, 0.0);
  Trajectory traj;
  if (cfg.record_norms) traj.step_norms.reserve(static_cast<std::size_t>(cfg.T));
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    // Max-term oracle on the pre-step iterate: smallest index attaining the
    // max, provided the max is nonnegative and w is not the origin.
    bool all_zero = true;
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t mx_at = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (w[i] != 0.0) all_zero = false;
      if (w[i] > mx) {
        mx = w[i];
        mx_at = i;
      }
    }
    for (std::size_t i = 0; i < d; ++i)
      w[i] -= cfg.eta * (2.0 * mu[i] * w[i] + p.lambda * mu[i]);
    if (!all_zero && mx >= 0.0) w[mx_at] -= cfg.eta;
    double ss = 0.0;
    for (double v : w) ss += v * v;
    if (ss > p.R * p.R) {
      const double scale = p.R / std::sqrt(ss);
      for (double& v : w) v *= scale;
      ss = p.R * p.R;
    }
    if (cfg.record_norms) traj.step_norms.push_back(std::sqrt(ss));
  }
  traj.empirical_risk = memorization_empirical_risk(p, w, mu);
  traj.w = std::move(w);
  return traj;
}

Trajectory run_gd_dense(const CoordinateProblem& p, const Dataset& ds,
                        const GdConfig& cfg) {
  validate_config(cfg);
  require(ds.tag == ProblemTag::kCoordinate && ds.d == p.d,
          "run_gd_dense: dataset does not match problem");
  if (p.d * cfg.T > cfg.dense_budget)
    throw ResourceError("run_gd_dense: d*T exceeds the dense budget");
  const std::vector<double> mu = empirical_mean(ds);
  const std::size_t d = static_cast<std::size_t>(p.d);
  std::vector<double> w(d, 0.0);
  Trajectory traj;
  if (cfg.record_norms) traj.step_norms.reserve(static_cast<std::size_t>(cfg.T));
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    // Subgradient of the empirical risk is -mu, so the step adds eta * mu.
    double ss = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] += cfg.eta * mu[i];
      ss += w[i] * w[i];
    }
    if (ss > 1.0) {
      const double scale = 1.0 / std::sqrt(ss);
      for (double& v : w) v *= scale;
      ss = 1.0;
    }
    if (cfg.record_norms) traj.step_norms.push_back(std::sqrt(ss));
  }
  double risk = 0.0;
  for (std::size_t i = 0; i < d; ++i) risk -= mu[i] * w[i];
  traj.empirical_risk = risk;
  traj.w = std::move(w);
  return traj;
}

CompressedIterate memorization_closed_form(const ColumnHistogram& hist,
                                           double eta, double lambda,
                                           std::int64_t T) {
  require(eta > 0.0 && T >= 1, "memorization_closed_form: bad eta or T");
  require(hist.n >= 1 &&
              static_cast<std::int64_t>(hist.bucket_counts.size()) == hist.n,
          "memorization_closed_form: malformed histogram");
  if (!(2 * hist.bad_count >= T && hist.bad_count <= T))
    throw EventPreconditionError(
        "memorization_closed_form: bad-coordinate count outside [T/2, T]");
  CompressedIterate it;
  it.n = hist.n;
  it.d = hist.d;
  it.t = T;
  it.eta = eta;
  it.lambda = lambda;
  it.bucket_counts = hist.bucket_counts;
  it.bucket_values.resize(static_cast<std::size_t>(hist.n));
  const double dn = static_cast<double>(hist.n);
  for (std::int64_t k = 1; k <= hist.n; ++k) {
    const double rate = 1.0 - 2.0 * eta * static_cast<double>(k) / dn;
    it.bucket_values[static_cast<std::size_t>(k - 1)] =
        0.5 * lambda * (-1.0 + std::pow(rate, static_cast<double>(T)));
  }
  it.bad_total = hist.bad_count;
  it.bad_activated = std::min(hist.bad_count, T - 1);
  return it;
}

std::vector<double> coordinate_closed_form(std::span<const double> mu,
                                           double eta, std::int64_t t) {
  require(eta > 0.0 && t >= 0, "coordinate_closed_form: bad eta or t");
  const double nrm = norm2(mu);
  std::vector<double> w(mu.begin(), mu.end());
  const double s = eta * static_cast<double>(t);
  if (s * nrm <= 1.0) {
    for (double& v : w) v *= s;
  } else {
    for (double& v : w) v /= nrm;
  }
  return w;
}

CompressedIterate run_gd_compressed(const ColumnHistogram& hist,
                                    const GdConfig& cfg, double lambda) {
  validate_config(cfg);
  require(hist.n >= 1 &&
              static_cast<std::int64_t>(hist.bucket_counts.size()) == hist.n,
          "run_gd_compressed: malformed histogram");
  CompressedIterate it;
  it.n = hist.n;
  it.d = hist.d;
  it.eta = cfg.eta;
  it.lambda = lambda;
  it.bucket_counts = hist.bucket_counts;
  it.bucket_values.assign(static_cast<std::size_t>(hist.n), 0.0);
  it.bad_total = hist.bad_count;
  it.bad_activated = 0;
  it.t = cfg.T;

  std::int64_t good_total = 0;
  for (std::int64_t c : hist.bucket_counts) good_total += c;
  if (good_total == 0) {
    // Every coordinate is dormant: the subgradient at the origin is zero and
    // GD never moves, so nothing activates.
    return it;
  }

  const double dn = static_cast<double>(hist.n);
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    // Bucket recurrence v <- v (1 - 2 eta k/n) - eta lambda k/n mirrors the
    // dense coordinate update for empirical mean k/n.
    for (std::int64_t k = 1; k <= hist.n; ++k) {
      if (hist.bucket_counts[static_cast<std::size_t>(k - 1)] == 0) continue;
      double& v = it.bucket_values[static_cast<std::size_t>(k - 1)];
      const double ratio = static_cast<double>(k) / dn;
      v = v * (1.0 - 2.0 * cfg.eta * ratio) - cfg.eta * lambda * ratio;
    }
    // Max-term oracle: after step 1 the maximizers are exactly the
    // still-dormant bad coordinates (value 0), the smallest of which takes
    // the unit subgradient and lands at -eta.
    if (t >= 2 && it.bad_activated < it.bad_total) ++it.bad_activated;

    double worst = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= hist.n; ++k) {
      if (hist.bucket_counts[static_cast<std::size_t>(k - 1)] == 0) continue;
      worst = std::max(worst, it.bucket_values[static_cast<std::size_t>(k - 1)]);
    }
    if (worst > 0.0)
      throw FallbackRequired(
          "run_gd_compressed: a bucket value crossed zero; rerun densely");
    if (it.norm_squared() > 1.0)
      throw FallbackRequired(
          "run_gd_compressed: iterate left the unit ball; rerun densely");
  }
  return it;
}

std::vector<double> expand_iterate(const CompressedIterate& it,
                                   std::span<const std::uint8_t> column_counts) {
  require(static_cast<std::int64_t>(column_counts.size()) == it.d,
          "expand_iterate: column count length mismatch");
  std::vector<double> w(column_counts.size(), 0.0);
  std::int64_t dormant_seen = 0;
  for (std::size_t i = 0; i < column_counts.size(); ++i) {
    const std::uint8_t k = column_counts[i];
    if (k == 0) {
      if (dormant_seen < it.bad_activated) w[i] = -it.eta;
      ++dormant_seen;
    } else {
      require(k <= it.n, "expand_iterate: column count exceeds n");
      w[i] = it.bucket_values[static_cast<std::size_t>(k - 1)];
    }
  }
  require(dormant_seen == it.bad_total,
          "expand_iterate: bad-coordinate count mismatch");
  return w;
}

NormBoundsVerdict gd_norm_bounds_check(const CompressedIterate& it,
                                       std::int64_t n) {
  require(n >= 1, "gd_norm_bounds_check: n must be >= 1");
  NormBoundsVerdict v;
  v.norm = it.norm();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  v.lower = 0.5 / sqrt_n;
  v.upper = 1.0 / sqrt_n;
  v.within = v.norm >= v.lower && v.norm <= v.upper;
  return v;
}

std::string trajectory_summary_json(const CompressedIterate& it) {
  nlohmann::ordered_json j;
  j["n"] = it.n;
  j["eta"] = round_sig10(it.eta);
  j["T"] = it.t;
  j["d"] = it.d;
  j["norm"] = round_sig10(it.norm());
  j["bad_count"] = it.bad_total;
  nlohmann::ordered_json vals = nlohmann::ordered_json::array();
  for (double v : it.bucket_values) vals.push_back(round_sig10(v));
  j["bucket_values"] = vals;
  return j.dump();
}

}  // namespace gdlab
