#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "gdlab/errors.hpp"
#include "gdlab/gd.hpp"
#include "gdlab/numerics.hpp"
#include "gdlab/problems.hpp"
#include "gdlab/rng.hpp"
#include "gdlab/surrogate.hpp"

using namespace gdlab;

namespace {

double sig_gate() { return normal_quantile(1.0 - 0.0005); }

struct DenseRun {
  MemorizationProblem p;
  Dataset ds;
  ColumnHistogram hist;
  std::vector<double> w;
  CompressedIterate it;
};

DenseRun schedule_run(std::int64_t n, std::uint64_t seed) {
  DenseRun r{MemorizationProblem::with_schedule(n), {}, {}, {}, {}};
  RngStream rng(seed, 0);
  for (int k = 0; k < 50; ++k) {
    r.ds = sample_memorization_dataset(r.p, rng);
    if (memorization_event_holds(r.p, bad_coordinate_count(r.ds))) break;
  }
  GdConfig cfg;
  cfg.eta = r.p.eta;
  cfg.T = r.p.T;
  r.w = run_gd_dense(r.p, r.ds, cfg).w;
  r.hist = histogram_from_dataset(r.ds);
  r.it = run_gd_compressed(r.hist, cfg, r.p.lambda);
  return r;
}

}  // namespace

TEST_CASE("noise variance threshold") {
  CHECK(SurrogateConfig::sigma_star_squared(100) == 0.01 / 100.0);
  CHECK(SurrogateConfig::sigma_star_squared(153600) == 0.01 / 153600.0);
}

TEST_CASE("perturbation at zero noise is the identity") {
  std::vector<double> w{0.2, -0.1, 0.4};
  RngStream a(10, 0), b(10, 0);
  const auto v = perturb(w, 0.0, a);
  CHECK(v == w);
  // No draws were consumed.
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("perturbation lands inside the ball") {
  RngStream rng(11, 0);
  std::vector<double> w(64, 0.0);
  w[0] = 1.0;
  for (int k = 0; k < 50; ++k) {
    const auto v = perturb(w, 0.5, rng);
    CHECK(norm2(v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("perturbation noise is centered with the right scale") {
  const std::size_t d = 512;
  const int trials = 100;
  const double sigma = 1e-3;
  std::vector<double> w(d, 0.0);
  w[3] = 0.5;  // small enough that the projection never engages
  RngStream rng(12, 0);
  double shift_sum = 0.0, chi2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto v = perturb(w, sigma, rng);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = v[i] - w[i];
      shift_sum += xi;
      chi2 += (xi / sigma) * (xi / sigma);
    }
  }
  const double z =
      shift_sum / (sigma * std::sqrt(static_cast<double>(trials) * d));
  CHECK(std::abs(z) <= sig_gate());
  const double cdf = chi_square_cdf(chi2, static_cast<double>(trials * d));
  CHECK(cdf > 0.0005);
  CHECK(cdf < 0.9995);
}

TEST_CASE("zero noise residuals vanish") {
  const auto run = schedule_run(4, 40);
  SurrogateConfig cfg;
  cfg.sigma = 0.0;
  cfg.trials = 20;
  cfg.master_seed = 1;
  const auto est = residual_mc_dense(run.p, run.ds, run.w, cfg);
  CHECK(est.delta_pop == 0.0);
  CHECK(est.delta_emp == 0.0);
  CHECK(est.has_emp);
  CHECK(est.max_pair_sum == 0.0);
  CHECK(est.cap_margin <= 0.0);
}

TEST_CASE("dense residual budget is enforced") {
  const auto run = schedule_run(4, 41);
  SurrogateConfig cfg;
  cfg.sigma = 0.01;
  cfg.trials = 50;
  cfg.master_seed = 1;
  cfg.dense_budget = 1000;  // d * trials = 384 * 50 well above this
  try {
    (void)residual_mc_dense(run.p, run.ds, run.w, cfg);
    CHECK(false);
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("summaries") != std::string::npos);
  }
}

TEST_CASE("sampled residuals respect the lipschitz cap") {
  const auto run = schedule_run(8, 42);
  SurrogateConfig cfg;
  cfg.sigma = 2.0 / std::sqrt(static_cast<double>(run.p.d));
  cfg.trials = 300;
  cfg.master_seed = 7;
  const auto est = residual_mc_dense(run.p, run.ds, run.w, cfg);
  CHECK(est.max_pair_sum <= 4.0 * run.p.L_effective() * run.p.R + 1e-12);
  CHECK(est.cap_margin <= 1e-12);
  CHECK(est.delta_pop > 0.0);
  CHECK(est.delta_pop_se > 0.0);
}

TEST_CASE("summary sampler tracks the dense sampler within five percent") {
  for (std::int64_t n : {8, 10}) {
    const auto run = schedule_run(n, 43 + static_cast<std::uint64_t>(n));
    const double sigma = 2.0 / std::sqrt(static_cast<double>(run.p.d));
    SurrogateConfig cfg;
    cfg.sigma = sigma;
    cfg.trials = n == 8 ? 2000 : 1000;
    cfg.master_seed = 9;
    const auto dense = residual_mc_dense(run.p, run.ds, run.w, cfg);
    const auto summ =
        residual_mc_summaries(run.it, sigma, 4000, 9, 1 << 20);
    CHECK_FALSE(summ.has_emp);
    const double tol = 0.05 * std::max(dense.delta_pop, summ.delta_pop) +
                       3.0 * (dense.delta_pop_se + summ.delta_pop_se);
    CHECK(std::abs(dense.delta_pop - summ.delta_pop) <= tol);
  }
}

TEST_CASE("summary sampler is deterministic in its stream") {
  const auto run = schedule_run(8, 44);
  const double sigma = 0.003;
  const auto a = residual_mc_summaries(run.it, sigma, 500, 21, 100);
  const auto b = residual_mc_summaries(run.it, sigma, 500, 21, 100);
  CHECK(a.delta_pop == b.delta_pop);
  CHECK(a.delta_pop_se == b.delta_pop_se);
  const auto c = residual_mc_summaries(run.it, sigma, 500, 21, 900);
  CHECK(c.delta_pop != a.delta_pop);
}

TEST_CASE("residual reports serialize with null empirical fields") {
  const auto run = schedule_run(4, 45);
  SurrogateConfig cfg;
  cfg.sigma = 0.01;
  cfg.trials = 50;
  cfg.master_seed = 3;
  const auto dense = residual_mc_dense(run.p, run.ds, run.w, cfg);
  const auto dj = nlohmann::json::parse(residual_estimate_json(dense));
  CHECK(dj["delta_emp"].is_number());
  CHECK(dj["n"] == 4);
  CHECK(dj["trials"] == 50);

  const auto summ = residual_mc_summaries(run.it, 0.01, 50, 3, 0);
  const auto sj = nlohmann::json::parse(residual_estimate_json(summ));
  CHECK(sj["delta_emp"].is_null());
  CHECK(sj["delta_emp_se"].is_null());
  CHECK(sj["delta_pop"].is_number());
}
