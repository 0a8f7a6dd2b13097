#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "gdlab/errors.hpp"
#include "gdlab/gd.hpp"
#include "gdlab/numerics.hpp"
#include "gdlab/problems.hpp"
#include "gdlab/rng.hpp"

using namespace gdlab;

namespace {

Dataset event_dataset(const MemorizationProblem& p, RngStream& rng) {
  for (int k = 0; k < 50; ++k) {
    Dataset ds = sample_memorization_dataset(p, rng);
    if (memorization_event_holds(p, bad_coordinate_count(ds))) return ds;
  }
  REQUIRE(false);
  return {};
}

ColumnHistogram event_histogram(const MemorizationProblem& p, RngStream& rng) {
  for (int k = 0; k < 50; ++k) {
    ColumnHistogram h = sample_column_histogram(p.n, p.d, rng);
    if (memorization_event_holds(p, h.bad_count)) return h;
  }
  REQUIRE(false);
  return {};
}

double max_rel(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max(std::abs(a[i]), std::abs(b[i]));
    if (den == 0.0) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

}  // namespace

TEST_CASE("coordinate descent accumulates the scaled mean") {
  CoordinateProblem p{4};
  Dataset ds;
  ds.tag = ProblemTag::kCoordinate;
  ds.n = 2;
  ds.d = 4;
  ds.indices = {0, 0};
  GdConfig cfg;
  cfg.eta = 0.1;
  cfg.T = 3;
  const auto traj = run_gd_dense(p, ds, cfg);
  CHECK(traj.w[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(traj.w[1] == 0.0);
  CHECK(traj.empirical_risk == doctest::Approx(-0.3).epsilon(1e-14));

  const auto mu = empirical_mean(ds);
  const auto closed = coordinate_closed_form(mu, 0.1, 3);
  CHECK(max_rel(traj.w, closed) <= 1e-15);
}

TEST_CASE("coordinate closed form saturates at the sphere") {
  CoordinateProblem p{4};
  Dataset ds;
  ds.tag = ProblemTag::kCoordinate;
  ds.n = 2;
  ds.d = 4;
  ds.indices = {0, 0};
  const auto mu = empirical_mean(ds);  // unit mass on e_1
  GdConfig cfg;
  cfg.eta = 0.1;
  cfg.T = 15;
  cfg.record_norms = true;
  const auto traj = run_gd_dense(p, ds, cfg);
  CHECK(traj.w[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(traj.step_norms.size() == 15);
  for (std::int64_t t = 1; t <= 15; ++t) {
    const auto wt = coordinate_closed_form(mu, 0.1, t);
    CHECK(std::abs(norm2(wt) - traj.step_norms[static_cast<std::size_t>(t - 1)]) <=
          1e-12);
  }
  const auto frozen = coordinate_closed_form(mu, 0.1, 15);
  CHECK(frozen[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coordinate closed form matches the engine on random data") {
  const std::int64_t n = 8;
  CoordinateProblem p{CoordinateProblem::schedule_dim(n)};
  GdConfig cfg;
  cfg.eta = CoordinateProblem::schedule_eta(n);
  cfg.T = CoordinateProblem::schedule_steps(n);
  for (std::uint64_t s = 0; s < 5; ++s) {
    RngStream rng(700, s);
    const Dataset ds = sample_coordinate_dataset(p, n, rng);
    const auto traj = run_gd_dense(p, ds, cfg);
    const auto closed = coordinate_closed_form(empirical_mean(ds), cfg.eta, cfg.T);
    double worst = 0.0;
    for (std::size_t i = 0; i < closed.size(); ++i)
      worst = std::max(worst, std::abs(closed[i] - traj.w[i]));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("memorization closed form spot values") {
  // One active coordinate at full empirical mean, eta 0.1, lambda 0.01.
  ColumnHistogram hist;
  hist.n = 1;
  hist.d = 3;
  hist.bucket_counts = {1};
  hist.bad_count = 2;
  const auto it = memorization_closed_form(hist, 0.1, 0.01, 2);
  CHECK(it.bucket_values[0] == doctest::Approx(-0.0018).epsilon(1e-14));
  CHECK(it.bad_activated == 1);
  CHECK(it.t == 2);
  CHECK(it.summaries_valid());

  // After a single step the active level is exactly -eta*lambda*mu.
  ColumnHistogram h1;
  h1.n = 1;
  h1.d = 2;
  h1.bucket_counts = {1};
  h1.bad_count = 1;
  const auto first = memorization_closed_form(h1, 0.1, 0.01, 1);
  CHECK(first.bucket_values[0] == doctest::Approx(-0.001).epsilon(1e-14));
  CHECK(first.bad_activated == 0);
}

TEST_CASE("memorization closed form requires the dormant count window") {
  ColumnHistogram hist;
  hist.n = 2;
  hist.d = 8;
  hist.bucket_counts = {4, 4};
  hist.bad_count = 0;
  CHECK_THROWS_AS((void)memorization_closed_form(hist, 0.05, 0.01, 8),
                  EventPreconditionError);
}

TEST_CASE("compressed engine equals the closed form inside the window") {
  const auto p = MemorizationProblem::with_schedule(6);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  for (std::uint64_t s = 0; s < 10; ++s) {
    RngStream rng(701, s);
    const auto hist = event_histogram(p, rng);
    const auto sim = run_gd_compressed(hist, cfg, p.lambda);
    const auto closed = memorization_closed_form(hist, p.eta, p.lambda, p.T);
    CHECK(sim.bad_activated == closed.bad_activated);
    CHECK(sim.bad_total == closed.bad_total);
    CHECK(max_rel(sim.bucket_values, closed.bucket_values) <= 1e-12);
    CHECK(std::abs(sim.norm() - closed.norm()) <=
          1e-12 * std::max(1.0, closed.norm()));
    CHECK(sim.summaries_valid());
  }
}

TEST_CASE("dense engine equals the expanded compressed iterate") {
  const auto p = MemorizationProblem::with_schedule(6);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  for (std::uint64_t s = 0; s < 3; ++s) {
    RngStream rng(702, s);
    const Dataset ds = event_dataset(p, rng);
    const auto traj = run_gd_dense(p, ds, cfg);
    const auto hist = histogram_from_dataset(ds);
    const auto sim = run_gd_compressed(hist, cfg, p.lambda);
    const auto dense = expand_iterate(sim, column_counts(ds));
    CHECK(max_rel(traj.w, dense) <= 1e-9);
    CHECK(std::abs(norm2(traj.w) - sim.norm()) <= 1e-12);
  }
}

TEST_CASE("all zero dataset keeps gradient descent at the origin") {
  const auto p = MemorizationProblem::custom(2, 4, 4, 0.1, 0.1);
  Dataset ds;
  ds.tag = ProblemTag::kMemorization;
  ds.n = 2;
  ds.d = 4;
  ds.bits = BitMatrix(2, 4);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  const auto traj = run_gd_dense(p, ds, cfg);
  for (double x : traj.w) CHECK(x == 0.0);

  const auto hist = histogram_from_dataset(ds);
  CHECK(hist.bad_count == 4);
  const auto sim = run_gd_compressed(hist, cfg, p.lambda);
  CHECK(sim.norm() == 0.0);
  CHECK(sim.bad_activated == 0);
  CHECK(sim.summaries_valid());
  CHECK(sim.empirical_risk() == 0.0);
}

TEST_CASE("dense budget and config validation") {
  const auto p = MemorizationProblem::custom(2, 100, 20, 0.05, 0.04);
  RngStream rng(703, 0);
  const Dataset ds = sample_memorization_dataset(p, rng);
  GdConfig cfg;
  cfg.eta = 0.05;
  cfg.T = 20;
  cfg.dense_budget = 1000;
  try {
    (void)run_gd_dense(p, ds, cfg);
    CHECK(false);
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("compressed") != std::string::npos);
  }
  GdConfig bad_eta;
  bad_eta.eta = 0.0;
  bad_eta.T = 5;
  CHECK_THROWS_AS((void)run_gd_dense(p, ds, bad_eta), std::invalid_argument);
  GdConfig bad_T;
  bad_T.eta = 0.1;
  bad_T.T = 0;
  CHECK_THROWS_AS((void)run_gd_dense(p, ds, bad_T), std::invalid_argument);
}

TEST_CASE("norm interval check on windowed runs") {
  const auto p = MemorizationProblem::with_schedule(8);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  RngStream rng(704, 0);
  const auto hist = event_histogram(p, rng);
  const auto sim = run_gd_compressed(hist, cfg, p.lambda);
  const auto verdict = gd_norm_bounds_check(sim, 8);
  CHECK(verdict.lower == doctest::Approx(1.0 / (2 * std::sqrt(8.0))));
  CHECK(verdict.upper == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK(verdict.norm == doctest::Approx(sim.norm()));
  CHECK(verdict.within == (verdict.norm >= verdict.lower &&
                           verdict.norm <= verdict.upper));
}

TEST_CASE("compressed iterate risks match the expanded vector") {
  const auto p = MemorizationProblem::with_schedule(4);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  RngStream rng(705, 0);
  const Dataset ds = event_dataset(p, rng);
  const auto hist = histogram_from_dataset(ds);
  const auto sim = run_gd_compressed(hist, cfg, p.lambda);
  const auto dense = expand_iterate(sim, column_counts(ds));
  CHECK(sim.population_risk() ==
        doctest::Approx(memorization_population_risk(p, dense)).epsilon(1e-12));
  const auto mu = empirical_mean(ds);
  CHECK(sim.empirical_risk() ==
        doctest::Approx(memorization_empirical_risk(p, dense, mu))
            .epsilon(1e-12));
  CHECK(sim.coordinate_sum() ==
        doctest::Approx(pairwise_sum(dense)).epsilon(1e-10));
}

TEST_CASE("trajectory summary serializes cleanly") {
  const auto p = MemorizationProblem::with_schedule(4);
  GdConfig cfg;
  cfg.eta = p.eta;
  cfg.T = p.T;
  RngStream rng(706, 0);
  const auto hist = event_histogram(p, rng);
  const auto sim = run_gd_compressed(hist, cfg, p.lambda);
  const auto parsed = nlohmann::json::parse(trajectory_summary_json(sim));
  CHECK(parsed["n"] == 4);
  CHECK(parsed["T"] == 32);
  CHECK(parsed["d"] == 384);
  CHECK(parsed["bucket_values"].size() == 4);
  CHECK(std::abs(parsed["norm"].get<double>() - sim.norm()) <= 1e-9);
}
