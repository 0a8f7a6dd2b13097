#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gdlab/numerics.hpp"
#include "gdlab/rng.hpp"

using namespace gdlab;

namespace {

// Two-sided significance 0.001 gate for standardized statistics.
double sig_gate() { return normal_quantile(1.0 - 0.0005); }

// p-value style gate for CDF-valued statistics at the same significance.
bool cdf_in_gate(double c) { return c > 0.0005 && c < 0.9995; }

}  // namespace

TEST_CASE("ball projection") {
  std::vector<double> w{3.0, 4.0};
  auto p = project_ball(w, 1.0);
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(norm2(p) <= 1.0 + 1e-15);

  std::vector<double> inside{0.1, -0.2, 0.05};
  auto q = project_ball(inside, 1.0);
  CHECK(q == inside);

  std::vector<double> r{3.0, 4.0};
  project_ball_inplace(r, 2.5);
  CHECK(r[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)project_ball(w, -1.0), std::invalid_argument);
  std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS((void)project_ball(bad, 1.0), std::invalid_argument);
}

TEST_CASE("pairwise sum, mean, std error") {
  std::vector<double> ones(1000);
  for (std::size_t i = 0; i < ones.size(); ++i)
    ones[i] = static_cast<double>(i + 1);
  CHECK(pairwise_sum(ones) == 500500.0);

  std::vector<double> alt(4001);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < alt.size(); ++i) {
    alt[i] = (i % 2 ? -1.0 : 1.0) / static_cast<double>(i + 1);
    ref += alt[i];
  }
  CHECK(pairwise_sum(alt) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));

  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
  std::vector<double> m{2.0, 4.0, 6.0};
  CHECK(mean(m) == doctest::Approx(4.0).epsilon(1e-15));
  std::vector<double> two{1.0, 3.0};
  CHECK(std_error(two) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gaussian tail") {
  CHECK(gaussian_tail_q(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_tail_q(1.0) ==
        doctest::Approx(0.15865525393145705141).epsilon(1e-13));
  CHECK(gaussian_tail_q(8.0) ==
        doctest::Approx(6.2209605742717841235e-16).epsilon(1e-11));
  for (double x : {0.3, 1.7, 2.5, 4.0})
    CHECK(gaussian_tail_q(x) + gaussian_tail_q(-x) ==
          doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_tail_q(2.0) < gaussian_tail_q(1.0));
}

TEST_CASE("normal quantile") {
  CHECK(std::abs(normal_quantile(0.5)) < 1e-15);
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.9599639845400542355).epsilon(1e-13));
  CHECK(normal_quantile(1e-100) ==
        doctest::Approx(-21.273453560965324295).epsilon(1e-12));
  for (double p : {0.01, 0.2, 0.43, 0.77, 0.999})
    CHECK(normal_quantile(p) ==
          doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-11));
  // Round trip against the tail function.
  for (double p : {1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-6})
    CHECK(gaussian_tail_q(normal_quantile(1.0 - p)) ==
          doctest::Approx(p).epsilon(1e-9));
  CHECK_THROWS_AS((void)normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)normal_quantile(-0.1), std::invalid_argument);
}

TEST_CASE("entropies") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(binary_entropy(0.25) ==
        doctest::Approx(0.56233514461880835).epsilon(1e-14));
  CHECK(binary_entropy_bits(0.75) ==
        doctest::Approx(0.81127812445913286).epsilon(1e-14));
  for (double p : {0.1, 0.3, 0.47})
    CHECK(binary_entropy(p) ==
          doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-14));
}

TEST_CASE("discrete kl") {
  std::vector<double> p{0.9, 0.1}, q{0.5, 0.5};
  CHECK(kl_discrete(p, q) ==
        doctest::Approx(0.36806420716849707).epsilon(1e-14));
  CHECK(kl_discrete(q, q) == doctest::Approx(0.0).epsilon(1e-15));
  std::vector<double> q0{1.0, 0.0};
  CHECK(std::isinf(kl_discrete(p, q0)));
  std::vector<double> short_q{1.0};
  CHECK_THROWS_AS((void)kl_discrete(p, short_q), std::invalid_argument);
  std::vector<double> neg{1.1, -0.1};
  CHECK_THROWS_AS((void)kl_discrete(neg, q), std::invalid_argument);
  std::vector<double> nosum{0.4, 0.4};
  CHECK_THROWS_AS((void)kl_discrete(nosum, q), std::invalid_argument);
}

TEST_CASE("mixture kl upper bound") {
  std::vector<double> kls{0.5, 1.0}, ws{0.25, 0.75};
  CHECK(mixture_kl_upper(kls, ws) ==
        doctest::Approx(1.2876820724517808).epsilon(1e-14));

  // Validity against exact mixtures of discrete laws.
  RngStream rng(1234, 0);
  for (int rep = 0; rep < 200; ++rep) {
    auto draw_law = [&](std::size_t k) {
      std::vector<double> v(k);
      double s = 0.0;
      for (auto& x : v) {
        x = rng.next_unit() + 0.01;
        s += x;
      }
      for (auto& x : v) x /= s;
      return v;
    };
    auto pl = draw_law(4);
    auto q1 = draw_law(4);
    auto q2 = draw_law(4);
    const double w1 = 0.1 + 0.8 * rng.next_unit();
    std::vector<double> mix(4);
    for (std::size_t i = 0; i < 4; ++i) mix[i] = w1 * q1[i] + (1.0 - w1) * q2[i];
    std::vector<double> comps{kl_discrete(pl, q1), kl_discrete(pl, q2)};
    std::vector<double> weights{w1, 1.0 - w1};
    CHECK(kl_discrete(pl, mix) <= mixture_kl_upper(comps, weights) + 1e-12);
  }

  CHECK_THROWS_AS((void)mixture_kl_upper({}, {}), std::invalid_argument);
  std::vector<double> badw{0.4, 0.4};
  CHECK_THROWS_AS((void)mixture_kl_upper(kls, badw), std::invalid_argument);
  std::vector<double> shortw{1.0};
  CHECK_THROWS_AS((void)mixture_kl_upper(kls, shortw), std::invalid_argument);
}

TEST_CASE("reverse markov vs brute force") {
  RngStream rng(99, 0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t k = 2 + static_cast<std::size_t>(rng.next_below(6));
    const double m_tilde = 0.5 + rng.next_unit();
    std::vector<double> vals(k), probs(k);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      vals[i] = m_tilde * rng.next_unit();
      probs[i] = rng.next_unit() + 0.01;
      s += probs[i];
    }
    for (auto& p : probs) p /= s;
    const double a = 0.8 * m_tilde * rng.next_unit();
    const double m = a + (m_tilde - a) * (0.1 + 0.9 * rng.next_unit());
    double ex = 0.0, p_ge_a = 0.0, p_ge_m = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ex += probs[i] * vals[i];
      if (vals[i] >= a) p_ge_a += probs[i];
      if (vals[i] >= m) p_ge_m += probs[i];
    }
    const double lower = reverse_markov_lower(ex, a, m, m_tilde, p_ge_m);
    CHECK(p_ge_a >= lower - 1e-12);
  }
  CHECK_THROWS_AS((void)reverse_markov_lower(0.5, 0.3, 0.3, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)reverse_markov_lower(0.5, 0.1, 1.2, 1.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("fano entropy upper") {
  CHECK(fano_entropy_upper(0.02, 10.0) ==
        doctest::Approx(0.298039113279732).epsilon(1e-13));
  // Large p: the ln 2 branch takes over.
  const double p = 0.5;
  CHECK(fano_entropy_upper(p, 3.0) ==
        doctest::Approx(kLn2 + p * 3.0).epsilon(1e-14));
  CHECK(fano_entropy_upper(0.1, 2.0) < fano_entropy_upper(0.1, 5.0));
}

TEST_CASE("exp safe") {
  CHECK(exp_safe(-800.0) == 0.0);
  CHECK(exp_safe(0.0) == 1.0);
  CHECK(exp_safe(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
}

TEST_CASE("incomplete gamma and chi square") {
  for (double x : {0.5, 1.0, 2.0, 4.60517018598809136804, 9.0})
    CHECK(chi_square_cdf(x, 2.0) ==
          doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
  CHECK(chi_square_cdf(1.0, 1.0) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));
  for (double x : {0.25, 1.0, 2.25})
    CHECK(gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK(chi_square_cdf(500.0, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chi_square_cdf(3.0, 5.0) < chi_square_cdf(4.0, 5.0));
}

TEST_CASE("wilson halfwidth") {
  CHECK(wilson_halfwidth(5, 10, 1.0) ==
        doctest::Approx(0.1507556722888818).epsilon(1e-14));
  CHECK(wilson_halfwidth(0, 100, 1.0) ==
        doctest::Approx(0.0049504950495049506).epsilon(1e-14));
  CHECK(wilson_halfwidth(9, 10, 2.0) ==
        doctest::Approx(0.1969149821727174).epsilon(1e-14));
}

TEST_CASE("gaussian vector sampler") {
  {
    RngStream a(7, 3), b(7, 3);
    auto v = sample_gaussian_vector(16, 0.0, a);
    for (double x : v) CHECK(x == 0.0);
    // sigma = 0 consumed no draws: the streams stay aligned.
    CHECK(a.next_u64() == b.next_u64());
  }
  const std::size_t d = 5000;
  const double sigma = 3.0;
  RngStream rng(2024, 1);
  auto v = sample_gaussian_vector(d, sigma, rng);
  REQUIRE(v.size() == d);
  const double z = pairwise_sum(v) / (sigma * std::sqrt(double(d)));
  CHECK(std::abs(z) <= sig_gate());
  double chi2 = 0.0;
  for (double x : v) chi2 += (x / sigma) * (x / sigma);
  CHECK(cdf_in_gate(chi_square_cdf(chi2, static_cast<double>(d))));
}

TEST_CASE("polar independence of gaussian vectors") {
  // For spherical Gaussians the radius and the direction are independent:
  // the correlation between ||xi|| and a fixed direction coordinate is 0.
  const int trials = 5000;
  const std::size_t d = 8;
  RngStream rng(5150, 0);
  std::vector<double> radii(trials), dir0(trials);
  for (int i = 0; i < trials; ++i) {
    auto v = sample_gaussian_vector(d, 1.0, rng);
    radii[i] = norm2(v);
    dir0[i] = v[0] / radii[i];
  }
  const double mr = mean(radii), md = mean(dir0);
  double num = 0.0, vr = 0.0, vd = 0.0;
  for (int i = 0; i < trials; ++i) {
    num += (radii[i] - mr) * (dir0[i] - md);
    vr += (radii[i] - mr) * (radii[i] - mr);
    vd += (dir0[i] - md) * (dir0[i] - md);
  }
  const double corr = num / std::sqrt(vr * vd);
  CHECK(std::abs(corr) * std::sqrt(static_cast<double>(trials)) <= sig_gate());
}

TEST_CASE("bernoulli word sampler") {
  const std::size_t rows = 3, cols = 70;
  {
    RngStream rng(11, 0);
    auto w = sample_bernoulli_words(rows, cols, 0.0, rng);
    for (auto x : w) CHECK(x == 0u);
  }
  {
    RngStream rng(11, 1);
    auto w = sample_bernoulli_words(rows, cols, 1.0, rng);
    std::size_t pop = 0;
    for (auto x : w) pop += static_cast<std::size_t>(__builtin_popcountll(x));
    CHECK(pop == rows * cols);  // padding bits stay clear
  }
  {
    RngStream a(12, 5), b(12, 5);
    CHECK(sample_bernoulli_words(4, 100, 0.3, a) ==
          sample_bernoulli_words(4, 100, 0.3, b));
  }
  {
    const std::size_t r = 50, c = 640;
    RngStream rng(13, 2);
    auto w = sample_bernoulli_words(r, c, 0.5, rng);
    double pop = 0;
    for (auto x : w) pop += __builtin_popcountll(x);
    const double meanp = 0.5 * static_cast<double>(r * c);
    const double sd = std::sqrt(static_cast<double>(r * c) * 0.25);
    CHECK(std::abs(pop - meanp) <= sig_gate() * sd);
  }
}

TEST_CASE("binomial sampler") {
  RngStream rng(314, 0);
  CHECK(sample_binomial(100, 0.0, rng) == 0);
  CHECK(sample_binomial(100, 1.0, rng) == 100);
  CHECK(sample_binomial(0, 0.5, rng) == 0);
  {
    // Sparse regime: mean 0.1 successes out of a million slots.
    RngStream r2(314, 1);
    std::int64_t acc = 0;
    for (int i = 0; i < 50; ++i) acc += sample_binomial(1000000, 1e-7, r2);
    CHECK(acc >= 0);
    CHECK(acc < 40);  // mean 5, a 40+ draw has probability ~1e-25
  }
  {
    // Goodness of fit, Binomial(5, 0.3), chi-square on the 6 cells.
    RngStream r3(314, 2);
    const int draws = 20000;
    std::vector<double> obs(6, 0.0);
    for (int i = 0; i < draws; ++i) {
      const std::int64_t k = sample_binomial(5, 0.3, r3);
      REQUIRE(k >= 0);
      REQUIRE(k <= 5);
      obs[static_cast<std::size_t>(k)] += 1.0;
    }
    const double pmf[6] = {0.16807, 0.36015, 0.30870, 0.13230, 0.02835,
                           0.00243};
    double stat = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double e = draws * pmf[k];
      stat += (obs[static_cast<std::size_t>(k)] - e) *
              (obs[static_cast<std::size_t>(k)] - e) / e;
    }
    CHECK(cdf_in_gate(chi_square_cdf(stat, 5.0)));
  }
  {
    // Mean test at a large count.
    RngStream r4(314, 3);
    const int draws = 2000;
    std::vector<double> xs(draws);
    for (int i = 0; i < draws; ++i)
      xs[i] = static_cast<double>(r4.next_binomial(1000, 0.37));
    const double sd = std::sqrt(1000 * 0.37 * 0.63);
    const double z =
        (mean(xs) - 370.0) / (sd / std::sqrt(static_cast<double>(draws)));
    CHECK(std::abs(z) <= sig_gate());
  }
}

TEST_CASE("rng streams") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    if (x != b.next_u64()) all_equal = false;
    if (x != c.next_u64()) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RngStream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_unit();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  std::vector<int> residues(7, 0);
  for (int i = 0; i < 10000; ++i)
    residues[static_cast<std::size_t>(u.next_below(7))] += 1;
  for (int r : residues) CHECK(r > 0);

  {
    // Normal draws: decile goodness of fit.
    RngStream g(8, 8);
    const int draws = 20000;
    std::vector<double> edges(9);
    for (int i = 1; i <= 9; ++i) edges[static_cast<std::size_t>(i - 1)] =
        normal_quantile(static_cast<double>(i) / 10.0);
    std::vector<double> obs(10, 0.0);
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double x = g.next_normal();
      sum += x;
      std::size_t bin = 0;
      while (bin < 9 && x > edges[bin]) ++bin;
      obs[bin] += 1.0;
    }
    double stat = 0.0;
    const double e = draws / 10.0;
    for (double o : obs) stat += (o - e) * (o - e) / e;
    CHECK(cdf_in_gate(chi_square_cdf(stat, 9.0)));
    CHECK(std::abs(sum / std::sqrt(static_cast<double>(draws))) <= sig_gate());
  }
  {
    // Gamma draws: mean tests on both sides of the shape = 1 boundary.
    for (double shape : {0.5, 3.0}) {
      RngStream g(9, shape < 1 ? 1u : 2u);
      const int draws = 20000;
      std::vector<double> xs(draws);
      for (int i = 0; i < draws; ++i) xs[i] = g.next_gamma(shape);
      const double z = (mean(xs) - shape) /
                       std::sqrt(shape / static_cast<double>(draws));
      CHECK(std::abs(z) <= sig_gate());
    }
  }
}
