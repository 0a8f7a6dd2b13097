#include "gdlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Fixed binary-tree reduction; the split point depends only on the length.
double pairwise_sum_rec(const double* x, std::size_t len) {
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum_rec(x, half) + pairwise_sum_rec(x + half, len - half);
}

}  // namespace

std::vector<double> project_ball(std::span<const double> w, double radius) {
  std::vector<double> out(w.begin(), w.end());
  project_ball_inplace(out, radius);
  return out;
}

void project_ball_inplace(std::vector<double>& w, double radius) {
  require(std::isfinite(radius) && radius >= 0.0,
          "project_ball: radius must be finite and nonnegative");
  double ss = 0.0;
  for (double v : w) {
    require(std::isfinite(v), "project_ball: non-finite coordinate");
    ss += v * v;
  }
  const double nrm = std::sqrt(ss);
  if (nrm > radius) {
    const double scale = radius / nrm;
    for (double& v : w) v *= scale;
  }
}

double norm2(std::span<const double> w) {
  double ss = 0.0;
  for (double v : w) ss += v * v;
  return std::sqrt(ss);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double pairwise_sum(std::span<const double> x) {
  return x.empty() ? 0.0 : pairwise_sum_rec(x.data(), x.size());
}

double mean(std::span<const double> x) {
  require(!x.empty(), "mean: empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double std_error(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double m = mean(x);
  std::vector<double> dev2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - m;
    dev2[i] = d * d;
  }
  const double var = pairwise_sum(dev2) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

ProbValue gaussian_tail_q(double x) {
  require(std::isfinite(x) || x == kInf || x == -kInf,
          "gaussian_tail_q: NaN argument");
  if (x == kInf) return 0.0;
  if (x == -kInf) return 1.0;
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  // Wichura's algorithm AS 241 (PPND16): rational approximations on three
  // regions, accurate to ~1e-16 relative over (0, 1).
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
             3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
           5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
         4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
             2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
           3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
         4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
           6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
         2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
           2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
         5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
         5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double binary_entropy(double p) {
  require(p >= 0.0 && p <= 1.0, "binary_entropy: p must lie in [0, 1]");
  return -xlogx(p) - xlogx(1.0 - p);
}

double binary_entropy_bits(double p) { return binary_entropy(p) / kLn2; }

double kl_discrete(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "kl_discrete: length mismatch");
  require(!p.empty(), "kl_discrete: empty distributions");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0 && q[i] >= 0.0, "kl_discrete: negative mass");
    sp += p[i];
    sq += q[i];
  }
  require(std::fabs(sp - 1.0) <= 1e-9 && std::fabs(sq - 1.0) <= 1e-9,
          "kl_discrete: masses must sum to 1");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;  // support violation sentinel
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double mixture_kl_upper(std::span<const double> kl_components,
                        std::span<const double> weights) {
  require(!kl_components.empty(), "mixture_kl_upper: empty mixture");
  require(kl_components.size() == weights.size(),
          "mixture_kl_upper: length mismatch");
  double sw = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "mixture_kl_upper: negative weight");
    sw += w;
  }
  require(std::fabs(sw - 1.0) <= 1e-9,
          "mixture_kl_upper: weights must sum to 1");
  double best = kInf;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(kl_components[i] >= 0.0, "mixture_kl_upper: negative divergence");
    if (weights[i] == 0.0) continue;
    best = std::min(best, kl_components[i] - std::log(weights[i]));
  }
  return best;
}

double reverse_markov_lower(double mean_x, double a, double m, double m_tilde,
                            double prob_x_ge_m) {
  require(a < m, "reverse_markov_lower: need a < m");
  require(m <= m_tilde, "reverse_markov_lower: need m <= m_tilde");
  require(prob_x_ge_m >= 0.0 && prob_x_ge_m <= 1.0,
          "reverse_markov_lower: probability outside [0, 1]");
  return (mean_x - a - (m_tilde - m) * prob_x_ge_m) / (m - a);
}

double fano_entropy_upper(double p_error, double log_cardinality) {
  require(log_cardinality >= 0.0, "fano_entropy_upper: negative log card");
  return std::min(binary_entropy(p_error) + p_error * log_cardinality,
                  kLn2 + p_error * log_cardinality);
}

double exp_safe(double x) {
  if (std::isnan(x)) throw std::invalid_argument("exp_safe: NaN argument");
  return x < -745.0 ? 0.0 : std::exp(x);
}

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^-x / Gamma(a) * sum_k x^k / (a(a+1)...(a+k)).
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 10000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * exp_safe(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a,x); P = 1 - Q.
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - exp_safe(-x + a * std::log(x) - lg) * h;
}

double chi_square_cdf(double x, double dof) {
  return gamma_p(dof / 2.0, x / 2.0);
}

double wilson_halfwidth(std::int64_t successes, std::int64_t trials, double z) {
  require(trials >= 1 && successes >= 0 && successes <= trials,
          "wilson_halfwidth: bad counts");
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) /
         (1.0 + z2 / n);
}

std::vector<double> sample_gaussian_vector(std::size_t dim, double sigma,
                                           RngStream& rng) {
  require(sigma >= 0.0, "sample_gaussian_vector: negative sigma");
  std::vector<double> out(dim, 0.0);
  if (sigma == 0.0) return out;
  for (std::size_t i = 0; i < dim; ++i) out[i] = sigma * rng.next_normal();
  return out;
}

std::vector<std::uint64_t> sample_bernoulli_words(std::size_t rows,
                                                  std::size_t cols, double p,
                                                  RngStream& rng) {
  require(p >= 0.0 && p <= 1.0, "sample_bernoulli_words: p outside [0, 1]");
  const std::size_t wpr = (cols + 63) / 64;
  std::vector<std::uint64_t> words(rows * wpr, 0);
  const std::uint64_t tail_mask =
      (cols % 64 == 0) ? ~0ull : ((1ull << (cols % 64)) - 1);
  if (p == 0.5) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t w = 0; w < wpr; ++w)
        words[r * wpr + w] = rng.next_u64();
      words[r * wpr + wpr - 1] &= tail_mask;
    }
    return words;
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (rng.next_bernoulli(p)) words[r * wpr + c / 64] |= 1ull << (c % 64);
  return words;
}

std::int64_t sample_binomial(std::int64_t count, double p, RngStream& rng) {
  return rng.next_binomial(count, p);
}

// --- RngStream variate methods (here so they can use normal_quantile) --------

double RngStream::next_normal() { return normal_quantile(next_unit()); }

double RngStream::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("next_gamma: shape <= 0");
  if (shape < 1.0) {
    const double u = next_unit();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = next_unit();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

std::int64_t RngStream::next_binomial(std::int64_t count, double p) {
  if (count < 0) throw std::invalid_argument("next_binomial: count < 0");
  if (count == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return count;
  if (p > 0.5) return count - next_binomial(count, 1.0 - p);
  // Geometric gap skipping: successive success positions advance by
  // 1 + floor(ln U / ln(1-p)); expected work O(count * p + 1).
  const double log1mp = std::log1p(-p);
  std::int64_t successes = 0;
  std::int64_t pos = -1;
  for (;;) {
    const double u = next_unit();
    const double skip = std::floor(std::log(u) / log1mp);
    if (skip >= static_cast<double>(count)) break;  // past the end for sure
    pos += 1 + static_cast<std::int64_t>(skip);
    if (pos >= count) break;
    ++successes;
  }
  return successes;
}

}  // namespace gdlab
