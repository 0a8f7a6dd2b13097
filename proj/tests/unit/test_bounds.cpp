#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gdlab/bounds.hpp"
#include "gdlab/numerics.hpp"
#include "gdlab/problems.hpp"

using namespace gdlab;

TEST_CASE("generalization bounds from information quantities") {
  CHECK(ege_from_iomi(1.0, 1.0, 2, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ege_from_cmi(1.0, 1.0, 2, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ege_from_ecmi(0.5, 2.0, 8, 0.25) ==
        doctest::Approx(1.0 * std::sqrt(8.0 * 0.25 / 8.0)).epsilon(1e-14));
  // Monotone in the information argument, shrinking in n.
  CHECK(ege_from_iomi(1, 1, 10, 2.0) > ege_from_iomi(1, 1, 10, 1.0));
  CHECK(ege_from_iomi(1, 1, 40, 2.0) < ege_from_iomi(1, 1, 10, 2.0));
  CHECK_THROWS_AS((void)ege_from_iomi(0.0, 1.0, 4, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ege_from_iomi(1.0, 1.0, 0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ege_from_iomi(1.0, 1.0, 4, -0.5),
                  std::invalid_argument);
}

TEST_CASE("per sample bound aggregation") {
  std::vector<double> mis{0.5, 0.5, 2.0};
  const double expect_iomi =
      (std::sqrt(1.0) + std::sqrt(1.0) + std::sqrt(4.0)) / 3.0;
  CHECK(ege_individual_iomi(1.0, 1.0, 3, mis) ==
        doctest::Approx(expect_iomi).epsilon(1e-14));
  CHECK(ege_individual_cmi(1.0, 1.0, 3, mis) ==
        doctest::Approx(2.0 * expect_iomi).epsilon(1e-14));
  std::vector<double> short_list{0.5};
  CHECK_THROWS_AS((void)ege_individual_iomi(1.0, 1.0, 3, short_list),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ege_individual_cmi(1.0, 1.0, 3, short_list),
                  std::invalid_argument);
}

TEST_CASE("optimization error evaluator") {
  CHECK(gd_opt_error(0.1, 10, 1.0, 1.0) ==
        doctest::Approx(0.715129254649702).epsilon(1e-13));
  CHECK_THROWS_AS((void)gd_opt_error(0.0, 10, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)gd_opt_error(0.1, 0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("generalization error evaluator") {
  CHECK(gd_gen_error(0.01, 100, 2.0, 50) ==
        doctest::Approx(1.92).epsilon(1e-14));
  CHECK_THROWS_AS((void)gd_gen_error(0.01, 100, 2.0, 0),
                  std::invalid_argument);
}

TEST_CASE("excess risk is exactly the sum of its parts") {
  for (std::int64_t n = 2; n <= 64; n += 3) {
    const double eta = MemorizationProblem::schedule_eta(n);
    const std::int64_t T = MemorizationProblem::schedule_steps(n);
    CHECK(gd_excess_risk(eta, T, 4.0, 1.0, n) ==
          gd_opt_error(eta, T, 4.0, 1.0) + gd_gen_error(eta, T, 4.0, n));
  }
}

TEST_CASE("excess risk scaling at the default schedule") {
  // sqrt(n) * excess stays under 12 with unit constants; with L = 4 the same
  // expression is far larger, so the constant is L-sensitive.
  double worst = 0.0;
  for (std::int64_t n = 4; n <= 200; ++n) {
    const double eta = MemorizationProblem::schedule_eta(n);
    const std::int64_t T = MemorizationProblem::schedule_steps(n);
    const double scaled =
        std::sqrt(static_cast<double>(n)) * gd_excess_risk(eta, T, 1.0, 1.0, n);
    worst = std::max(worst, scaled);
  }
  CHECK(worst <= 12.0);
  CHECK(worst >= 6.5);
  const double eta16 = MemorizationProblem::schedule_eta(16);
  CHECK(4.0 * gd_excess_risk(eta16, 512, 4.0, 1.0, 16) > 12.0);
}

TEST_CASE("bit recovery error bound curve") {
  CHECK(proberror_bound(10) ==
        doctest::Approx(0.023195520836836847).epsilon(1e-12));
  CHECK(proberror_bound(8) ==
        doctest::Approx(0.17139300491479195).epsilon(1e-12));
  double prev = proberror_bound(10);
  for (std::int64_t n = 11; n <= 40; ++n) {
    const double b = proberror_bound(n);
    CHECK(b < prev);
    CHECK(b < 0.1);
    prev = b;
  }
  CHECK_THROWS_AS((void)proberror_bound(0), std::invalid_argument);
  CHECK_THROWS_AS((void)proberror_bound(63), std::invalid_argument);
}

TEST_CASE("pac bayes bound evaluator") {
  CHECK(pac_bayes_gen_bound(1.0, 1.0, 100, 0.05, 0.0) ==
        doctest::Approx(0.27569734238004695).epsilon(1e-13));
  CHECK(pac_bayes_gen_bound(4.0, 1.0, 8, 0.05, 2561.0) ==
        doctest::Approx(71.63902810361449).epsilon(1e-12));
  CHECK_THROWS_AS((void)pac_bayes_gen_bound(1.0, 1.0, 8, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pac_bayes_gen_bound(1.0, 1.0, 8, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pac_bayes_gen_bound(1.0, 1.0, 8, 0.05, -1.0),
                  std::invalid_argument);
}

TEST_CASE("good event complexity") {
  CHECK(good_event_complexity(8) == 2561.0);
  for (std::int64_t n : {4, 10, 16}) {
    const double T = static_cast<double>(MemorizationProblem::schedule_steps(n));
    CHECK(good_event_complexity(n) == 2.5 * static_cast<double>(n) * T + 1.0);
  }
  // The resulting bound is vacuous from n = 8 on at L = 4.
  for (std::int64_t n : {8, 16, 32}) {
    const double c = good_event_complexity(n);
    CHECK(pac_bayes_gen_bound(4.0, 1.0, n, 0.05, c) >= 1.0);
  }
}

TEST_CASE("pac bayes failure constants") {
  const auto c16 = pacbayes_failure_constants(16, 16.0);
  CHECK(c16.residual_prob == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c16.conditional_prob == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(c16.classical_prob ==
        doctest::Approx(0.10657504262605796).epsilon(1e-12));
  CHECK(c16.classical_branch_valid);
  CHECK(c16.conditional_threshold == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(c16.classical_threshold ==
        doctest::Approx(0.6 * 4096.0 - 0.5).epsilon(1e-15));

  const auto c15 = pacbayes_failure_constants(15, 16.0);
  CHECK(c15.classical_prob ==
        doctest::Approx(0.053064398692416706).epsilon(1e-12));
  CHECK_FALSE(c15.classical_branch_valid);

  CHECK_THROWS_AS((void)pacbayes_failure_constants(0, 16.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pacbayes_failure_constants(16, -1.0),
                  std::invalid_argument);
}
