#include "gdlab/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace gdlab {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

constexpr std::uint8_t kMagic = 0xD5;

std::uint64_t tail_mask_for(std::size_t cols) {
  return (cols % 64 == 0) ? ~0ull : ((1ull << (cols % 64)) - 1);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

}  // namespace

BitMatrix BitMatrix::from_words(std::size_t rows, std::size_t cols,
                                std::vector<std::uint64_t> words) {
  BitMatrix m(rows, cols);
  require(words.size() == m.data_.size(), "BitMatrix: word count mismatch");
  m.data_ = std::move(words);
  // Clear any tail bits beyond cols so popcounts and all-zero scans are exact.
  if (cols % 64 != 0 && m.words_per_row_ > 0) {
    const std::uint64_t mask = tail_mask_for(cols);
    for (std::size_t r = 0; r < rows; ++r)
      m.data_[r * m.words_per_row_ + m.words_per_row_ - 1] &= mask;
  }
  return m;
}

std::size_t BitMatrix::row_popcount(std::size_t r) const {
  std::size_t total = 0;
  for (std::uint64_t w : row_words(r)) total += std::popcount(w);
  return total;
}

std::vector<std::uint8_t> serialize_dataset(const Dataset& ds) {
  require(ds.n >= 0 && ds.n <= 0xFFFF, "serialize_dataset: n out of range");
  require(ds.d >= 0 && ds.d <= 0xFFFFFFFFll, "serialize_dataset: d out of range");
  std::vector<std::uint8_t> out;
  out.push_back(kMagic);
  out.push_back(static_cast<std::uint8_t>(ds.tag));
  put_u16(out, static_cast<std::uint16_t>(ds.n));
  put_u32(out, static_cast<std::uint32_t>(ds.d));
  if (ds.tag == ProblemTag::kCoordinate) {
    require(static_cast<std::int64_t>(ds.indices.size()) == ds.n,
            "serialize_dataset: index count mismatch");
    for (std::uint32_t idx : ds.indices) put_u32(out, idx);
    return out;
  }
  const std::size_t expect_cols = ds.tag == ProblemTag::kTightness
                                      ? 1
                                      : static_cast<std::size_t>(ds.d);
  require(ds.bits.rows() == static_cast<std::size_t>(ds.n) &&
              ds.bits.cols() == expect_cols,
          "serialize_dataset: bit matrix shape mismatch");
  for (std::uint64_t w : ds.bits.words())
    for (int i = 0; i < 8; ++i)
      out.push_back(static_cast<std::uint8_t>((w >> (8 * i)) & 0xFF));
  return out;
}

Dataset deserialize_dataset(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 8, "deserialize_dataset: truncated header");
  require(bytes[0] == kMagic, "deserialize_dataset: bad magic byte");
  const std::uint8_t tag_raw = bytes[1];
  require(tag_raw >= 1 && tag_raw <= 3, "deserialize_dataset: unknown tag");
  Dataset ds;
  ds.tag = static_cast<ProblemTag>(tag_raw);
  ds.n = get_u16(bytes, 2);
  ds.d = get_u32(bytes, 4);
  const std::size_t n = static_cast<std::size_t>(ds.n);
  if (ds.tag == ProblemTag::kCoordinate) {
    require(bytes.size() == 8 + 4 * n, "deserialize_dataset: bad payload size");
    ds.indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ds.indices[i] = get_u32(bytes, 8 + 4 * i);
      require(ds.indices[i] < static_cast<std::uint64_t>(ds.d),
              "deserialize_dataset: index out of range");
    }
    return ds;
  }
  const std::size_t cols =
      ds.tag == ProblemTag::kTightness ? 1 : static_cast<std::size_t>(ds.d);
  const std::size_t wpr = (cols + 63) / 64;
  require(bytes.size() == 8 + 8 * n * wpr,
          "deserialize_dataset: bad payload size");
  std::vector<std::uint64_t> words(n * wpr, 0);
  for (std::size_t j = 0; j < words.size(); ++j) {
    std::uint64_t w = 0;
    for (int i = 0; i < 8; ++i)
      w |= static_cast<std::uint64_t>(bytes[8 + 8 * j + i]) << (8 * i);
    words[j] = w;
  }
  ds.bits = BitMatrix::from_words(n, cols, std::move(words));
  return ds;
}

// --- Tightness problem ----------------------------------------------------------

TightnessProblem::TightnessProblem(double L_, double R_,
                                   std::span<const double> direction)
    : L(L_), R(R_) {
  require(L > 0.0 && R > 0.0, "TightnessProblem: L, R must be positive");
  require(!direction.empty(), "TightnessProblem: empty direction");
  const double nrm = norm2(direction);
  require(nrm > 0.0, "TightnessProblem: zero direction");
  z0.assign(direction.begin(), direction.end());
  for (double& v : z0) v *= R / nrm;
}

TightnessProblem::TightnessProblem(double L_, double R_, std::size_t dim)
    : L(L_), R(R_) {
  require(L > 0.0 && R > 0.0, "TightnessProblem: L, R must be positive");
  require(dim >= 1, "TightnessProblem: dim must be >= 1");
  z0.assign(dim, 0.0);
  z0[0] = R;
}

double tightness_loss(const TightnessProblem& p, std::span<const double> w,
                      int sign) {
  require(sign == 1 || sign == -1, "tightness_loss: sign must be +1 or -1");
  require(static_cast<std::int64_t>(w.size()) == p.dim(),
          "tightness_loss: dimension mismatch");
  // z = sign * z0 / R, so f = -L <w, z> = -(L sign / R) <w, z0>.
  return -(p.L * sign / p.R) * dot(w, p.z0);
}

std::vector<double> tightness_erm(const TightnessProblem& p,
                                  const Dataset& ds) {
  require(ds.tag == ProblemTag::kTightness, "tightness_erm: wrong dataset");
  require(ds.n >= 1, "tightness_erm: empty dataset");
  std::int64_t plus = 0;
  for (std::int64_t i = 0; i < ds.n; ++i)
    if (ds.bits.get(static_cast<std::size_t>(i), 0)) ++plus;
  const std::int64_t sum = 2 * plus - ds.n;
  std::vector<double> w = p.z0;
  if (sum < 0)
    for (double& v : w) v = -v;
  return w;  // sum == 0 resolves to +z0
}

Dataset sample_tightness_dataset(std::int64_t n, RngStream& rng) {
  require(n >= 1, "sample_tightness_dataset: n must be >= 1");
  Dataset ds;
  ds.tag = ProblemTag::kTightness;
  ds.n = n;
  ds.d = 1;
  ds.bits = BitMatrix::from_words(
      static_cast<std::size_t>(n), 1,
      sample_bernoulli_words(static_cast<std::size_t>(n), 1, 0.5, rng));
  return ds;
}

double rademacher_sum_abs_mean(std::int64_t n) {
  require(n >= 1, "rademacher_sum_abs_mean: n must be >= 1");
  // E|sum| = sum_k C(n,k) 2^-n |2k - n|, evaluated in log space.
  const double ln2n = static_cast<double>(n) * kLn2;
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double total = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double dev = std::fabs(static_cast<double>(2 * k - n));
    if (dev == 0.0) continue;
    const double lw = lgn - std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0) - ln2n;
    total += dev * exp_safe(lw);
  }
  return total;
}

double tightness_erm_gap_exact(const TightnessProblem& p, std::int64_t n) {
  return p.L * p.R / static_cast<double>(n) * rademacher_sum_abs_mean(n);
}

// --- Memorization problem -------------------------------------------------------

double MemorizationProblem::L_effective() const {
  return 3.0 + lambda * std::sqrt(static_cast<double>(d));
}

std::int64_t MemorizationProblem::schedule_dim(std::int64_t n) {
  require(n >= 1 && n <= 40, "MemorizationProblem: schedule needs 1 <= n <= 40");
  // ceil(0.75 T 2^n) = 1.5 n^2 2^n, an exact integer for every n >= 1.
  return 3 * n * n * (std::int64_t{1} << n) / 2;
}

std::int64_t MemorizationProblem::schedule_steps(std::int64_t n) {
  return 2 * n * n;
}

double MemorizationProblem::schedule_eta(std::int64_t n) {
  return 1.0 / (static_cast<double>(n) * std::sqrt(5.0 * static_cast<double>(n)));
}

MemorizationProblem MemorizationProblem::with_schedule(std::int64_t n) {
  const std::int64_t d = schedule_dim(n);
  MemorizationProblem p;
  p.n = n;
  p.d = d;
  p.T = schedule_steps(n);
  p.eta = schedule_eta(n);
  p.lambda = 1.0 / (static_cast<double>(n) * std::sqrt(static_cast<double>(d)));
  return p;
}

MemorizationProblem MemorizationProblem::custom(std::int64_t n, std::int64_t d,
                                                std::int64_t T, double eta,
                                                double lambda) {
  require(n >= 1 && d >= 1 && T >= 1, "MemorizationProblem: n, d, T >= 1");
  require(eta > 0.0, "MemorizationProblem: eta must be positive");
  const double cap =
      1.0 / (static_cast<double>(n) * std::sqrt(static_cast<double>(d)));
  require(lambda >= 0.0 && lambda <= cap * (1.0 + 1e-12),
          "MemorizationProblem: lambda must lie in [0, 1/(n sqrt(d))]");
  MemorizationProblem p;
  p.n = n;
  p.d = d;
  p.T = T;
  p.eta = eta;
  p.lambda = lambda;
  return p;
}

double memorization_loss(const MemorizationProblem& p,
                         std::span<const double> w,
                         std::span<const double> z) {
  require(static_cast<std::int64_t>(w.size()) == p.d &&
              static_cast<std::int64_t>(z.size()) == p.d,
          "memorization_loss: dimension mismatch");
  double quad = 0.0, lin = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    quad += z[i] * w[i] * w[i];
    lin += z[i] * w[i];
    mx = std::max(mx, w[i]);
  }
  return quad + p.lambda * lin + std::max(mx, 0.0);
}

std::vector<double> memorization_subgrad(const MemorizationProblem& p,
                                         std::span<const double> w,
                                         std::span<const double> mu) {
  require(static_cast<std::int64_t>(w.size()) == p.d &&
              static_cast<std::int64_t>(mu.size()) == p.d,
          "memorization_subgrad: dimension mismatch");
  std::vector<double> g(w.size());
  bool all_zero = true;
  double mx = -std::numeric_limits<double>::infinity();
  std::size_t mx_at = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    g[i] = 2.0 * mu[i] * w[i] + p.lambda * mu[i];
    if (w[i] != 0.0) all_zero = false;
    if (w[i] > mx) {
      mx = w[i];
      mx_at = i;
    }
  }
  // Max-term subgradient: zero at the origin and when every maximizer is
  // negative; otherwise the basis vector of the smallest maximizing index.
  if (!all_zero && mx >= 0.0) g[mx_at] += 1.0;
  return g;
}

double memorization_population_risk(const MemorizationProblem& p,
                                    std::span<const double> w) {
  require(static_cast<std::int64_t>(w.size()) == p.d,
          "memorization_population_risk: dimension mismatch");
  double ss = 0.0, s = 0.0, mx = 0.0;
  for (double v : w) {
    ss += v * v;
    s += v;
    mx = std::max(mx, v);
  }
  return 0.5 * ss + 0.5 * p.lambda * s + std::max(mx, 0.0);
}

double memorization_empirical_risk(const MemorizationProblem& p,
                                   std::span<const double> w,
                                   std::span<const double> mu) {
  require(static_cast<std::int64_t>(w.size()) == p.d &&
              static_cast<std::int64_t>(mu.size()) == p.d,
          "memorization_empirical_risk: dimension mismatch");
  double quad = 0.0, lin = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    quad += mu[i] * w[i] * w[i];
    lin += mu[i] * w[i];
    mx = std::max(mx, w[i]);
  }
  return quad + p.lambda * lin + std::max(mx, 0.0);
}

Dataset sample_memorization_dataset(const MemorizationProblem& p,
                                    RngStream& rng) {
  Dataset ds;
  ds.tag = ProblemTag::kMemorization;
  ds.n = p.n;
  ds.d = p.d;
  ds.bits = BitMatrix::from_words(
      static_cast<std::size_t>(p.n), static_cast<std::size_t>(p.d),
      sample_bernoulli_words(static_cast<std::size_t>(p.n),
                             static_cast<std::size_t>(p.d), 0.5, rng));
  return ds;
}

BadCoordinates bad_coordinates(const Dataset& ds) {
  require(ds.tag == ProblemTag::kMemorization,
          "bad_coordinates: memorization dataset required");
  const std::size_t n = ds.bits.rows();
  const std::size_t wpr = ds.bits.words_per_row();
  std::vector<std::uint64_t> seen(wpr, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = ds.bits.row_words(r);
    for (std::size_t w = 0; w < wpr; ++w) seen[w] |= row[w];
  }
  BadCoordinates out;
  const std::size_t d = ds.bits.cols();
  for (std::size_t w = 0; w < wpr; ++w) {
    std::uint64_t unseen = ~seen[w];
    if (w == wpr - 1 && d % 64 != 0) unseen &= tail_mask_for(d);
    while (unseen != 0) {
      const int bit = std::countr_zero(unseen);
      out.indices.push_back(static_cast<std::uint32_t>(64 * w + bit));
      unseen &= unseen - 1;
    }
  }
  out.count = static_cast<std::int64_t>(out.indices.size());
  return out;
}

std::int64_t bad_coordinate_count(const Dataset& ds) {
  return bad_coordinates(ds).count;
}

std::vector<std::uint8_t> column_counts(const Dataset& ds) {
  require(ds.tag == ProblemTag::kMemorization,
          "column_counts: memorization dataset required");
  require(ds.n <= 255, "column_counts: n must be <= 255");
  std::vector<std::uint8_t> counts(ds.bits.cols(), 0);
  for (std::size_t r = 0; r < ds.bits.rows(); ++r) {
    const auto row = ds.bits.row_words(r);
    for (std::size_t w = 0; w < row.size(); ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        counts[64 * w + std::countr_zero(bits)] += 1;
        bits &= bits - 1;
      }
    }
  }
  return counts;
}

ColumnHistogram histogram_from_dataset(const Dataset& ds) {
  const std::vector<std::uint8_t> counts = column_counts(ds);
  ColumnHistogram hist;
  hist.n = ds.n;
  hist.d = static_cast<std::int64_t>(counts.size());
  hist.bucket_counts.assign(static_cast<std::size_t>(ds.n), 0);
  for (std::uint8_t c : counts) {
    if (c == 0)
      ++hist.bad_count;
    else
      ++hist.bucket_counts[c - 1];
  }
  return hist;
}

ColumnHistogram sample_column_histogram(std::int64_t n, std::int64_t d,
                                        RngStream& rng) {
  require(n >= 1 && n <= 64, "sample_column_histogram: need 1 <= n <= 64");
  require(d >= 1, "sample_column_histogram: d must be >= 1");
  const std::uint64_t mask =
      (n == 64) ? ~0ull : ((std::uint64_t{1} << n) - 1);
  ColumnHistogram hist;
  hist.n = n;
  hist.d = d;
  hist.bucket_counts.assign(static_cast<std::size_t>(n), 0);
  for (std::int64_t i = 0; i < d; ++i) {
    const int k = std::popcount(rng.next_u64() & mask);
    if (k == 0)
      ++hist.bad_count;
    else
      ++hist.bucket_counts[static_cast<std::size_t>(k - 1)];
  }
  return hist;
}

bool memorization_event_holds(const MemorizationProblem& p,
                              std::int64_t bad_count) {
  return 2 * bad_count >= p.T && bad_count <= p.T;
}

double memorization_event_probability_lower(std::int64_t n) {
  const double T = static_cast<double>(MemorizationProblem::schedule_steps(n));
  return 1.0 - 2.0 * exp_safe(-T / 36.0);
}

// --- Coordinate problem ---------------------------------------------------------

double CoordinateProblem::schedule_eta(std::int64_t n) {
  return 1.0 / (static_cast<double>(n) * std::sqrt(static_cast<double>(n)));
}

std::int64_t CoordinateProblem::schedule_steps(std::int64_t n) { return n * n; }

std::int64_t CoordinateProblem::schedule_dim(std::int64_t n) {
  return 2 * n * n;
}

double coordinate_loss(const CoordinateProblem& p, std::span<const double> w,
                       std::uint32_t index) {
  require(static_cast<std::int64_t>(w.size()) == p.d,
          "coordinate_loss: dimension mismatch");
  require(index < static_cast<std::uint64_t>(p.d),
          "coordinate_loss: index out of range");
  return -w[index];
}

std::uint32_t sample_coordinate_point(const CoordinateProblem& p,
                                      RngStream& rng) {
  return static_cast<std::uint32_t>(
      rng.next_below(static_cast<std::uint64_t>(p.d)));
}

Dataset sample_coordinate_dataset(const CoordinateProblem& p, std::int64_t n,
                                  RngStream& rng) {
  require(n >= 1, "sample_coordinate_dataset: n must be >= 1");
  Dataset ds;
  ds.tag = ProblemTag::kCoordinate;
  ds.n = n;
  ds.d = p.d;
  ds.indices.resize(static_cast<std::size_t>(n));
  for (auto& idx : ds.indices) idx = sample_coordinate_point(p, rng);
  return ds;
}

std::vector<double> empirical_mean(const Dataset& ds) {
  require(ds.n >= 1, "empirical_mean: empty dataset");
  const double dn = static_cast<double>(ds.n);
  switch (ds.tag) {
    case ProblemTag::kTightness: {
      std::int64_t plus = 0;
      for (std::int64_t i = 0; i < ds.n; ++i)
        if (ds.bits.get(static_cast<std::size_t>(i), 0)) ++plus;
      return {static_cast<double>(2 * plus - ds.n) / dn};
    }
    case ProblemTag::kMemorization: {
      // Count integer column sums first so mu(i) is computed as k/n in one
      // division (the compressed paths key buckets by that exact value).
      std::vector<std::uint16_t> counts(static_cast<std::size_t>(ds.d), 0);
      for (std::size_t r = 0; r < ds.bits.rows(); ++r) {
        const auto row = ds.bits.row_words(r);
        for (std::size_t w = 0; w < row.size(); ++w) {
          std::uint64_t bits = row[w];
          while (bits != 0) {
            counts[64 * w + std::countr_zero(bits)] += 1;
            bits &= bits - 1;
          }
        }
      }
      std::vector<double> mu(counts.size());
      for (std::size_t i = 0; i < counts.size(); ++i)
        mu[i] = static_cast<double>(counts[i]) / dn;
      return mu;
    }
    case ProblemTag::kCoordinate: {
      std::vector<std::uint32_t> counts(static_cast<std::size_t>(ds.d), 0);
      for (std::uint32_t idx : ds.indices) counts[idx] += 1;
      std::vector<double> mu(counts.size());
      for (std::size_t i = 0; i < counts.size(); ++i)
        mu[i] = static_cast<double>(counts[i]) / dn;
      return mu;
    }
  }
  throw std::invalid_argument("empirical_mean: unknown dataset tag");
}

}  // namespace gdlab
