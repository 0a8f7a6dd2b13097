#include "gdlab/info.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "gdlab/gd.hpp"
#include "gdlab/numerics.hpp"
#include "gdlab/parallel.hpp"
#include "gdlab/report.hpp"
#include "json.hpp"

namespace gdlab {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// n ln 2 minus the conditional entropy H(U | F-table) for one fixed grid of
// 2n coordinate indices, by enumeration of all 2^n masks. The iterate lives
// on the <= 2n distinct indices, so masks are grouped by the quantized loss
// table restricted to the supersample slots.
double ecmi_grid_nats(std::span<const std::uint32_t> g0,
                      std::span<const std::uint32_t> g1, std::int64_t n,
                      double eta, std::int64_t T) {
  const std::size_t nn = g0.size();
  std::vector<std::uint32_t> uniq;
  std::vector<std::size_t> uid0(nn), uid1(nn);
  auto uid_of = [&](std::uint32_t idx) {
    for (std::size_t k = 0; k < uniq.size(); ++k)
      if (uniq[k] == idx) return k;
    uniq.push_back(idx);
    return uniq.size() - 1;
  };
  for (std::size_t i = 0; i < nn; ++i) uid0[i] = uid_of(g0[i]);
  for (std::size_t i = 0; i < nn; ++i) uid1[i] = uid_of(g1[i]);

  const double etaT = eta * static_cast<double>(T);
  const double dn = static_cast<double>(n);
  const std::uint64_t mask_count = std::uint64_t{1} << n;
  std::vector<std::int64_t> cnt(uniq.size());
  std::vector<std::int64_t> key(2 * nn);
  std::map<std::vector<std::int64_t>, std::int64_t> groups;
  for (std::uint64_t m = 0; m < mask_count; ++m) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (std::size_t i = 0; i < nn; ++i)
      ++cnt[((m >> i) & 1u) ? uid1[i] : uid0[i]];
    double s2 = 0.0;
    for (std::int64_t c : cnt) s2 += static_cast<double>(c) * c;
    const double mu_norm = std::sqrt(s2) / dn;
    const double scale = (etaT * mu_norm <= 1.0) ? etaT : 1.0 / mu_norm;
    for (std::size_t i = 0; i < nn; ++i) {
      key[i] = std::llround(-scale * cnt[uid0[i]] / dn * 1e9);
      key[nn + i] = std::llround(-scale * cnt[uid1[i]] / dn * 1e9);
    }
    ++groups[key];
  }
  double h = 0.0;
  for (const auto& [k, c] : groups)
    h += static_cast<double>(c) / static_cast<double>(mask_count) *
         std::log(static_cast<double>(c));
  return dn * kLn2 - h;
}

// Quantized final iterate (full d-vector) for one training multiset given as
// per-coordinate counts; scratch `key` must have size d.
void iterate_key(const std::vector<std::int64_t>& cnt, std::int64_t n,
                 double etaT, std::vector<std::int64_t>& key) {
  double s2 = 0.0;
  for (std::int64_t c : cnt) s2 += static_cast<double>(c) * c;
  const double dn = static_cast<double>(n);
  const double mu_norm = std::sqrt(s2) / dn;
  const double scale = (etaT * mu_norm <= 1.0) ? etaT : 1.0 / mu_norm;
  for (std::size_t i = 0; i < key.size(); ++i)
    key[i] = std::llround(scale * static_cast<double>(cnt[i]) / dn * 1e9);
}

}  // namespace

Dataset MemorizationSupersample::derived() const {
  const std::size_t rows = static_cast<std::size_t>(n);
  const std::size_t wpr = grid0.words_per_row();
  std::vector<std::uint64_t> words(rows * wpr, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    const BitMatrix& src = mask[i] ? grid1 : grid0;
    const auto rw = src.row_words(i);
    std::copy(rw.begin(), rw.end(), words.begin() + i * wpr);
  }
  Dataset ds;
  ds.tag = ProblemTag::kMemorization;
  ds.n = n;
  ds.d = d;
  ds.bits = BitMatrix::from_words(rows, static_cast<std::size_t>(d),
                                  std::move(words));
  return ds;
}

Dataset CoordinateSupersample::derived() const {
  Dataset ds;
  ds.tag = ProblemTag::kCoordinate;
  ds.n = n;
  ds.d = d;
  ds.indices.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < ds.indices.size(); ++i)
    ds.indices[i] = mask[i] ? grid1[i] : grid0[i];
  return ds;
}

MemorizationSupersample make_memorization_supersample(std::int64_t n,
                                                      std::int64_t d,
                                                      RngStream& rng) {
  require(n >= 1 && n <= 0xFFFF, "supersample: n out of range");
  require(d >= 1, "supersample: d must be >= 1");
  MemorizationSupersample ss;
  ss.n = n;
  ss.d = d;
  const std::size_t rows = static_cast<std::size_t>(n);
  const std::size_t cols = static_cast<std::size_t>(d);
  ss.grid0 = BitMatrix::from_words(rows, cols,
                                   sample_bernoulli_words(rows, cols, 0.5, rng));
  ss.grid1 = BitMatrix::from_words(rows, cols,
                                   sample_bernoulli_words(rows, cols, 0.5, rng));
  ss.mask.resize(rows);
  for (std::size_t i = 0; i < rows; ++i)
    ss.mask[i] = rng.next_bernoulli(0.5) ? 1 : 0;
  return ss;
}

CoordinateSupersample make_coordinate_supersample(std::int64_t n,
                                                  std::int64_t d,
                                                  RngStream& rng) {
  require(n >= 1 && n <= 0xFFFF, "supersample: n out of range");
  require(d >= 1, "supersample: d must be >= 1");
  CoordinateSupersample ss;
  ss.n = n;
  ss.d = d;
  const std::size_t rows = static_cast<std::size_t>(n);
  ss.grid0.resize(rows);
  ss.grid1.resize(rows);
  ss.mask.resize(rows);
  for (std::size_t i = 0; i < rows; ++i)
    ss.grid0[i] = static_cast<std::uint32_t>(
        rng.next_below(static_cast<std::uint64_t>(d)));
  for (std::size_t i = 0; i < rows; ++i)
    ss.grid1[i] = static_cast<std::uint32_t>(
        rng.next_below(static_cast<std::uint64_t>(d)));
  for (std::size_t i = 0; i < rows; ++i)
    ss.mask[i] = rng.next_bernoulli(0.5) ? 1 : 0;
  return ss;
}

LossTable coordinate_loss_table(const CoordinateSupersample& ss,
                                std::span<const double> w) {
  require(static_cast<std::int64_t>(w.size()) == ss.d,
          "coordinate_loss_table: dimension mismatch");
  LossTable t;
  t.n = ss.n;
  t.row0.resize(ss.grid0.size());
  t.row1.resize(ss.grid1.size());
  for (std::size_t i = 0; i < ss.grid0.size(); ++i) t.row0[i] = -w[ss.grid0[i]];
  for (std::size_t i = 0; i < ss.grid1.size(); ++i) t.row1[i] = -w[ss.grid1[i]];
  return t;
}

double decoder_threshold(double eta, double lambda, std::int64_t T) {
  require(eta > 0.0 && lambda >= 0.0 && T >= 1, "decoder_threshold: bad args");
  return 0.5 * (eta + eta * lambda * static_cast<double>(T));
}

std::vector<std::uint8_t> decoder_psi(std::span<const double> w, double h) {
  std::vector<std::uint8_t> bits(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    bits[i] = std::fabs(w[i]) >= h ? 1 : 0;
  return bits;
}

DecoderReport decoder_error_mc(std::int64_t n, double sigma,
                               std::int64_t trials,
                               std::uint64_t master_seed) {
  // At n = 1 the schedule gives lambda T > 1, so no threshold separates the
  // two magnitude scales and the decoder is undefined.
  require(n >= 2, "decoder_error_mc: n must be >= 2");
  require(sigma >= 0.0, "decoder_error_mc: sigma must be nonnegative");
  require(trials >= 1, "decoder_error_mc: trials must be >= 1");
  const MemorizationProblem p = MemorizationProblem::with_schedule(n);
  const double h = decoder_threshold(p.eta, p.lambda, p.T);
  const double dd = static_cast<double>(p.d);

  std::vector<std::uint8_t> err(static_cast<std::size_t>(trials), 0);
  parallel_for_indexed(trials, [&](std::int64_t j) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(j));
    const ColumnHistogram hist = sample_column_histogram(n, p.d, rng);
    CompressedIterate it;
    if (memorization_event_holds(p, hist.bad_count)) {
      it = memorization_closed_form(hist, p.eta, p.lambda, p.T);
    } else {
      GdConfig cfg;
      cfg.eta = p.eta;
      cfg.T = p.T;
      it = run_gd_compressed(hist, cfg, p.lambda);
    }
    bool bad = false;
    // Good buckets: value v_k reads as 1 iff |v_k + sigma g| >= h.
    for (std::size_t k = 0; k < it.bucket_values.size(); ++k) {
      const std::int64_t c = it.bucket_counts[k];
      if (c == 0) continue;
      const double v = it.bucket_values[k];
      const double pk = sigma > 0.0
                            ? gaussian_tail_q((h - v) / sigma) +
                                  gaussian_tail_q((h + v) / sigma)
                            : 0.0;
      if (rng.next_binomial(c, pk) > 0) bad = true;
    }
    // Activated bad coordinates at -eta flip iff |-eta + sigma g| < h.
    if (it.bad_activated > 0) {
      const double q = sigma > 0.0
                           ? gaussian_tail_q((p.eta - h) / sigma) -
                                 gaussian_tail_q((p.eta + h) / sigma)
                           : 0.0;
      if (rng.next_binomial(it.bad_activated, q) > 0) bad = true;
    }
    // Dormant bad coordinates at 0 are missed unless the noise alone clears h.
    const std::int64_t dormant = it.bad_total - it.bad_activated;
    if (dormant > 0) {
      const double miss =
          sigma > 0.0 ? 1.0 - 2.0 * gaussian_tail_q(h / sigma) : 1.0;
      if (rng.next_binomial(dormant, miss) > 0) bad = true;
    }
    if (sigma > 0.0) {
      const double norm2 = it.norm_squared();
      const double g = rng.next_normal();
      const double chi2 = 2.0 * rng.next_gamma(dd / 2.0);
      if (norm2 + 2.0 * sigma * std::sqrt(norm2) * g + sigma * sigma * chi2 >
          1.0)
        bad = true;
    }
    err[j] = bad ? 1 : 0;
  });

  DecoderReport rep;
  rep.n = n;
  rep.sigma = sigma;
  rep.h = h;
  rep.trials = trials;
  rep.error_count = 0;
  for (std::uint8_t e : err) rep.error_count += e;
  rep.error_rate =
      static_cast<double>(rep.error_count) / static_cast<double>(trials);
  rep.wilson_halfwidth = gdlab::wilson_halfwidth(rep.error_count, trials, 1.0);
  return rep;
}

std::vector<std::uint8_t> u_decoder(const MemorizationSupersample& ss,
                                    std::span<const std::uint32_t> bad_indices,
                                    RngStream& rng) {
  const std::size_t rows = static_cast<std::size_t>(ss.n);
  std::vector<std::uint8_t> guess(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    bool zero0 = true, zero1 = true;
    for (std::uint32_t b : bad_indices) {
      if (ss.grid0.get(i, b)) zero0 = false;
      if (ss.grid1.get(i, b)) zero1 = false;
      if (!zero0 && !zero1) break;
    }
    if (zero0 != zero1)
      guess[i] = zero1 ? 1 : 0;
    else
      guess[i] = rng.next_bernoulli(0.5) ? 1 : 0;
  }
  return guess;
}

double expected_two_pow_neg_bad(std::int64_t n, std::int64_t d) {
  require(n >= 1 && n <= 62 && d >= 1, "expected_two_pow_neg_bad: bad args");
  const double half_p = std::ldexp(1.0, -static_cast<int>(n + 1));
  return std::exp(static_cast<double>(d) * std::log1p(-half_p));
}

double u_decoder_error_prediction(std::int64_t n, std::int64_t d) {
  require(n >= 1 && n <= 62 && d >= 1, "u_decoder_error_prediction: bad args");
  const double p = std::ldexp(1.0, -static_cast<int>(n));
  double logpmf = static_cast<double>(d) * std::log1p(-p);
  const double logratio = std::log(p) - std::log1p(-p);
  // Sum E[1 - (1 - 2^-(B+1))^n] term by term through expm1 so every term is
  // nonnegative; the direct 1 - E[...] form cancels to noise when the error
  // probability sits below double precision.
  double acc = 0.0;
  for (std::int64_t b = 0; b <= d; ++b) {
    if (b > 0)
      logpmf += std::log(static_cast<double>(d - b + 1) / b) + logratio;
    const int shift = static_cast<int>(std::min<std::int64_t>(b + 1, 1074));
    const double miss = -std::expm1(static_cast<double>(n) *
                                    std::log1p(-std::ldexp(1.0, -shift)));
    acc += exp_safe(logpmf) * miss;
  }
  return acc;
}

double tightness_iomi_exact_bits(std::int64_t n) {
  require(n >= 1, "tightness_iomi_exact_bits: n must be >= 1");
  // Pr(Binomial(n, 1/2) >= ceil(n/2)), summed smallest-term-first.
  const std::int64_t lo = (n + 1) / 2;
  double p = 0.0;
  for (std::int64_t k = n; k >= lo; --k) {
    const double lg = std::lgamma(static_cast<double>(n + 1)) -
                      std::lgamma(static_cast<double>(k + 1)) -
                      std::lgamma(static_cast<double>(n - k + 1)) -
                      static_cast<double>(n) * kLn2;
    p += exp_safe(lg);
  }
  p = std::min(p, 1.0);
  return binary_entropy_bits(p);
}

double supersample_distinct_probability(std::int64_t n, std::int64_t d) {
  require(n >= 1 && d >= 1, "supersample_distinct_probability: bad args");
  if (2 * n > d) return 0.0;
  double prod = 1.0;
  for (std::int64_t k = 1; k < 2 * n; ++k)
    prod *= 1.0 - static_cast<double>(k) / static_cast<double>(d);
  return prod;
}

EcmiEstimate ecmi_coordinate_estimate(std::int64_t n, std::int64_t d,
                                      std::int64_t trials,
                                      std::uint64_t master_seed) {
  require(n >= 1 && n <= 20, "ecmi_coordinate_estimate: n must be in [1, 20]");
  require(d >= 1, "ecmi_coordinate_estimate: d must be >= 1");
  require(trials >= 1, "ecmi_coordinate_estimate: trials must be >= 1");
  const double eta = CoordinateProblem::schedule_eta(n);
  const std::int64_t T = CoordinateProblem::schedule_steps(n);
  const std::size_t rows = static_cast<std::size_t>(n);

  std::vector<double> vals(static_cast<std::size_t>(trials));
  parallel_for_indexed(trials, [&](std::int64_t j) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(j));
    std::vector<std::uint32_t> g0(rows), g1(rows);
    for (std::size_t i = 0; i < rows; ++i)
      g0[i] = static_cast<std::uint32_t>(
          rng.next_below(static_cast<std::uint64_t>(d)));
    for (std::size_t i = 0; i < rows; ++i)
      g1[i] = static_cast<std::uint32_t>(
          rng.next_below(static_cast<std::uint64_t>(d)));
    vals[j] = ecmi_grid_nats(g0, g1, n, eta, T);
  });

  EcmiEstimate est;
  est.n = n;
  est.d = d;
  est.trials = trials;
  est.mc_nats = mean(vals);
  est.mc_se = std_error(vals);
  est.pr_all_distinct = supersample_distinct_probability(n, d);
  est.certified_lower_nats =
      est.pr_all_distinct * static_cast<double>(n) * kLn2;
  return est;
}

double ecmi_coordinate_exact(std::int64_t n, std::int64_t d) {
  require(n >= 1 && n <= 2 && d >= 1 && d <= 8,
          "ecmi_coordinate_exact: enumeration needs n <= 2 and d <= 8");
  const double eta = CoordinateProblem::schedule_eta(n);
  const std::int64_t T = CoordinateProblem::schedule_steps(n);
  const std::size_t rows = static_cast<std::size_t>(n);
  const std::size_t slots = 2 * rows;
  std::vector<std::uint32_t> digits(slots, 0);
  double acc = 0.0;
  std::int64_t grids = 0;
  for (;;) {
    std::span<const std::uint32_t> g0(digits.data(), rows);
    std::span<const std::uint32_t> g1(digits.data() + rows, rows);
    acc += ecmi_grid_nats(g0, g1, n, eta, T);
    ++grids;
    std::size_t pos = 0;
    while (pos < slots && ++digits[pos] == static_cast<std::uint32_t>(d)) {
      digits[pos] = 0;
      ++pos;
    }
    if (pos == slots) break;
  }
  return acc / static_cast<double>(grids);
}

double icmi_coordinate_exact(std::int64_t n, std::int64_t d) {
  require(n >= 1 && n <= 2 && d >= 1 && d <= 8,
          "icmi_coordinate_exact: enumeration needs n <= 2 and d <= 8");
  const double eta = CoordinateProblem::schedule_eta(n);
  const std::int64_t T = CoordinateProblem::schedule_steps(n);
  const double etaT = eta * static_cast<double>(T);
  const std::size_t rows = static_cast<std::size_t>(n);
  const std::size_t slots = 2 * rows;
  const std::uint64_t mask_count = std::uint64_t{1} << n;
  std::vector<std::uint32_t> digits(slots, 0);
  std::vector<std::int64_t> cnt(static_cast<std::size_t>(d));
  std::vector<std::int64_t> key(static_cast<std::size_t>(d) + 2);
  // Conditioning is on column 1's two candidate points only; everything else
  // in the supersample (other columns, other selector bits) is marginalized.
  // Group by (pair, quantized iterate) and count the selector bit.
  std::map<std::vector<std::int64_t>, std::array<std::int64_t, 2>> groups;
  std::int64_t total = 0;
  for (;;) {
    for (std::uint64_t m = 0; m < mask_count; ++m) {
      std::fill(cnt.begin(), cnt.end(), 0);
      for (std::size_t i = 0; i < rows; ++i)
        ++cnt[digits[((m >> i) & 1u) ? rows + i : i]];
      iterate_key(cnt, n, etaT, key);
      key[static_cast<std::size_t>(d)] = digits[0];
      key[static_cast<std::size_t>(d) + 1] = digits[rows];
      ++groups[key][m & 1u];
      ++total;
    }
    std::size_t pos = 0;
    while (pos < slots && ++digits[pos] == static_cast<std::uint32_t>(d)) {
      digits[pos] = 0;
      ++pos;
    }
    if (pos == slots) break;
  }
  double h = 0.0;
  for (const auto& [k, g] : groups) {
    const double c = static_cast<double>(g[0] + g[1]);
    for (std::int64_t cc : g)
      if (cc > 0 && cc < g[0] + g[1])
        h += static_cast<double>(cc) * std::log(c / static_cast<double>(cc));
  }
  return kLn2 - h / static_cast<double>(total);
}

double icmi_coordinate_lower(std::int64_t n, std::int64_t d) {
  require(n >= 1, "icmi_coordinate_lower: n must be >= 1");
  require(d >= 2 * n - 1, "icmi_coordinate_lower: needs d >= 2n - 1");
  return supersample_distinct_probability(n, d) * kLn2;
}

double iomi_lower_memorization(std::int64_t n, double p_error) {
  require(n >= 1, "iomi_lower_memorization: n must be >= 1");
  require(p_error >= 0.0 && p_error <= 1.0,
          "iomi_lower_memorization: p_error must be a probability");
  const double n3 = static_cast<double>(n) * n * n;
  return 1.5 * n3 * (1.0 - 2.0 * p_error) - 1.0;
}

double iomi_lower_memorization_refined(std::int64_t n, double p_error) {
  require(n >= 1, "iomi_lower_memorization_refined: n must be >= 1");
  require(p_error >= 0.0 && p_error <= 1.0,
          "iomi_lower_memorization_refined: p_error must be a probability");
  const double n3 = static_cast<double>(n) * n * n;
  const double factor =
      1.0 - (static_cast<double>(n + 1) / static_cast<double>(n)) * p_error;
  return 1.5 * n3 * factor - 1.0;
}

double cmi_gap_upper(std::int64_t n) {
  require(n >= 1 && n <= 62, "cmi_gap_upper: n out of range");
  const double dn = static_cast<double>(n);
  const double ln_n = std::log(dn);
  const double two_n = std::ldexp(1.0, static_cast<int>(n));
  const double a = exp_safe(ln_n - dn * dn * kLn2);
  const double b = exp_safe(ln_n - dn * dn / 18.0);
  const double c = exp_safe(kLn2 + 5.0 * ln_n + dn * kLn2 - two_n / dn);
  const double e = exp_safe(std::log(12.0) + 3.0 * ln_n - dn * dn / 18.0);
  return a + b + c + e + 1.0;
}

double cmi_lower_memorization(std::int64_t n) {
  return static_cast<double>(n) - cmi_gap_upper(n);
}

std::string decoder_report_json(const DecoderReport& rep) {
  nlohmann::ordered_json j;
  j["n"] = rep.n;
  j["sigma"] = round_sig10(rep.sigma);
  j["h"] = round_sig10(rep.h);
  j["trials"] = rep.trials;
  j["error_count"] = rep.error_count;
  j["error_rate"] = round_sig10(rep.error_rate);
  j["wilson_halfwidth"] = round_sig10(rep.wilson_halfwidth);
  return j.dump();
}

}  // namespace gdlab
