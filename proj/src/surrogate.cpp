#include "gdlab/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gdlab/errors.hpp"
#include "gdlab/numerics.hpp"
#include "gdlab/parallel.hpp"
#include "gdlab/report.hpp"
#include "json.hpp"

namespace gdlab {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double SurrogateConfig::sigma_star_squared(std::int64_t d) {
  require(d >= 1, "sigma_star_squared: d must be >= 1");
  return 0.01 / static_cast<double>(d);  // (beta*)^2 / d, beta* = 0.1
}

std::vector<double> perturb(std::span<const double> w, double sigma,
                            RngStream& rng) {
  require(sigma >= 0.0, "perturb: sigma must be nonnegative");
  std::vector<double> out(w.begin(), w.end());
  if (sigma == 0.0) return out;
  for (double& v : out) v += sigma * rng.next_normal();
  project_ball_inplace(out, 1.0);
  return out;
}

ResidualEstimate residual_mc_dense(const MemorizationProblem& p,
                                   const Dataset& ds,
                                   std::span<const double> w_final,
                                   const SurrogateConfig& cfg) {
  require(cfg.trials >= 1, "residual_mc_dense: trials must be >= 1");
  require(cfg.sigma >= 0.0, "residual_mc_dense: sigma must be nonnegative");
  require(static_cast<std::int64_t>(w_final.size()) == p.d,
          "residual_mc_dense: iterate dimension mismatch");
  if (p.d * cfg.trials > cfg.dense_budget)
    throw ResourceError(
        "residual_mc_dense: d*trials exceeds the dense budget; use "
        "residual_mc_summaries");
  const std::vector<double> mu = empirical_mean(ds);
  const double f_pop = memorization_population_risk(p, w_final);
  const double f_emp = memorization_empirical_risk(p, w_final, mu);
  const double L = p.L_effective();
  const std::size_t d = static_cast<std::size_t>(p.d);

  std::vector<double> abs_pop(cfg.trials), abs_emp(cfg.trials);
  std::vector<double> pair_sum(cfg.trials), cap_margin(cfg.trials);
  parallel_for_indexed(cfg.trials, [&](std::int64_t j) {
    RngStream rng(cfg.master_seed,
                  cfg.stream_base + static_cast<std::uint64_t>(j));
    std::vector<double> wt(w_final.begin(), w_final.end());
    if (cfg.sigma > 0.0)
      for (double& v : wt) v += cfg.sigma * rng.next_normal();
    double ss = 0.0;
    for (double v : wt) ss += v * v;
    if (ss > 1.0) {
      const double scale = 1.0 / std::sqrt(ss);
      for (double& v : wt) v *= scale;
    }
    double diff2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double dv = wt[i] - w_final[i];
      diff2 += dv * dv;
    }
    const double dpop = std::fabs(memorization_population_risk(p, wt) - f_pop);
    const double demp =
        std::fabs(memorization_empirical_risk(p, wt, mu) - f_emp);
    abs_pop[j] = dpop;
    abs_emp[j] = demp;
    pair_sum[j] = dpop + demp;
    cap_margin[j] = dpop + demp - 2.0 * L * std::sqrt(diff2);
  });

  ResidualEstimate est;
  est.n = p.n;
  est.d = p.d;
  est.sigma = cfg.sigma;
  est.trials = cfg.trials;
  est.delta_pop = mean(abs_pop);
  est.delta_pop_se = std_error(abs_pop);
  est.has_emp = true;
  est.delta_emp = mean(abs_emp);
  est.delta_emp_se = std_error(abs_emp);
  est.max_pair_sum = *std::max_element(pair_sum.begin(), pair_sum.end());
  est.cap_margin = *std::max_element(cap_margin.begin(), cap_margin.end());
  return est;
}

ResidualEstimate residual_mc_summaries(const CompressedIterate& it,
                                       double sigma, std::int64_t trials,
                                       std::uint64_t master_seed,
                                       std::uint64_t stream_base) {
  require(trials >= 1, "residual_mc_summaries: trials must be >= 1");
  require(sigma >= 0.0, "residual_mc_summaries: sigma must be nonnegative");
  const double f_base = it.population_risk();
  const double lambda = it.lambda;
  const double dd = static_cast<double>(it.d);
  const double w_norm2 = it.norm_squared();
  const double w_norm = std::sqrt(w_norm2);
  const double w_sum = it.coordinate_sum();

  // Population risk of the perturbed-and-projected point depends only on
  // ||w + xi||^2, sum_i (w + xi)(i), and max_i (w + xi)(i).
  struct Bucket {
    double value;
    double count;
  };
  std::vector<Bucket> buckets;
  for (std::size_t k = 0; k < it.bucket_values.size(); ++k)
    if (it.bucket_counts[k] > 0)
      buckets.push_back({it.bucket_values[k],
                         static_cast<double>(it.bucket_counts[k])});
  if (it.bad_activated > 0)
    buckets.push_back({-it.eta, static_cast<double>(it.bad_activated)});
  if (it.bad_total > it.bad_activated)
    buckets.push_back(
        {0.0, static_cast<double>(it.bad_total - it.bad_activated)});

  std::vector<double> abs_pop(trials);
  parallel_for_indexed(trials, [&](std::int64_t j) {
    RngStream rng(master_seed, stream_base + static_cast<std::uint64_t>(j));
    if (sigma == 0.0) {
      abs_pop[j] = 0.0;
      return;
    }
    // ||xi||^2 ~ sigma^2 * chi^2_d = 2 sigma^2 * Gamma(d/2, 1).
    const double xi_norm2 = 2.0 * sigma * sigma * rng.next_gamma(dd / 2.0);
    // (<w, xi>, sum_i xi(i)) is Gaussian with covariance sigma^2 * w_sum.
    const double g1 = rng.next_normal();
    const double g2 = rng.next_normal();
    const double w_dot_xi = sigma * w_norm * g1;
    double xi_sum;
    if (w_norm > 0.0) {
      const double resid = std::max(dd - (w_sum * w_sum) / w_norm2, 0.0);
      xi_sum = sigma * (w_sum / w_norm) * g1 + sigma * std::sqrt(resid) * g2;
    } else {
      xi_sum = sigma * std::sqrt(dd) * g2;
    }
    // Max coordinate: per bucket, the max of `count` iid N(value, sigma^2)
    // draws via inverse CDF through the upper tail; sampled independently of
    // the sums (documented approximation).
    double mx = -std::numeric_limits<double>::infinity();
    for (const Bucket& b : buckets) {
      const double u = rng.next_unit();
      const double tail = -std::expm1(std::log(u) / b.count);
      const double z = -normal_quantile(tail);
      mx = std::max(mx, b.value + sigma * z);
    }
    const double total_norm2 = w_norm2 + 2.0 * w_dot_xi + xi_norm2;
    const double total_sum = w_sum + xi_sum;
    const double scale =
        total_norm2 > 1.0 ? 1.0 / std::sqrt(total_norm2) : 1.0;
    const double f_new = 0.5 * scale * scale * total_norm2 +
                         0.5 * lambda * scale * total_sum +
                         std::max(scale * mx, 0.0);
    abs_pop[j] = std::fabs(f_new - f_base);
  });

  ResidualEstimate est;
  est.n = it.n;
  est.d = it.d;
  est.sigma = sigma;
  est.trials = trials;
  est.delta_pop = mean(abs_pop);
  est.delta_pop_se = std_error(abs_pop);
  est.has_emp = false;
  est.delta_emp = std::numeric_limits<double>::quiet_NaN();
  est.delta_emp_se = std::numeric_limits<double>::quiet_NaN();
  est.max_pair_sum = std::numeric_limits<double>::quiet_NaN();
  est.cap_margin = std::numeric_limits<double>::quiet_NaN();
  return est;
}

std::string residual_estimate_json(const ResidualEstimate& est) {
  nlohmann::ordered_json j;
  j["n"] = est.n;
  j["d"] = est.d;
  j["sigma"] = round_sig10(est.sigma);
  j["trials"] = est.trials;
  j["delta_pop"] = round_sig10(est.delta_pop);
  j["delta_pop_se"] = round_sig10(est.delta_pop_se);
  if (est.has_emp) {
    j["delta_emp"] = round_sig10(est.delta_emp);
    j["delta_emp_se"] = round_sig10(est.delta_emp_se);
  } else {
    j["delta_emp"] = nullptr;
    j["delta_emp_se"] = nullptr;
  }
  return j.dump();
}

}  // namespace gdlab
