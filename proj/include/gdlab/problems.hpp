#pragma once
// The three hard-instance learning problems and their dataset machinery.
//
// All three are convex-Lipschitz-bounded losses over a Euclidean ball:
//   * tightness:    two-point alphabet {+z0/R, -z0/R}, linear loss; the ERM
//                   is an exact majority vote, so every quantity of interest
//                   has a closed form.
//   * memorization: Bernoulli bit vectors gate per-coordinate parabolas plus
//                   a small linear tilt and a max-of-coordinates term;
//                   gradient descent on the empirical risk writes the
//                   dataset into the dormant ("bad") coordinates.
//   * coordinate:   standard basis vectors with loss -<w, z>; GD ends at a
//                   scaled empirical mean with a fully explicit form.

#include <cstdint>
#include <span>
#include <vector>

#include "gdlab/numerics.hpp"
#include "gdlab/rng.hpp"

namespace gdlab {

enum class ProblemTag : std::uint8_t {
  kTightness = 1,
  kMemorization = 2,
  kCoordinate = 3,
};

// Packed row-major bit matrix, 64 columns per word.
class BitMatrix {
 public:
  BitMatrix() : rows_(0), cols_(0) {}
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        data_(rows * words_per_row_, 0) {}

  static BitMatrix from_words(std::size_t rows, std::size_t cols,
                              std::vector<std::uint64_t> words);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * words_per_row_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = data_[r * words_per_row_ + c / 64];
    const std::uint64_t bit = 1ull << (c % 64);
    w = v ? (w | bit) : (w & ~bit);
  }

  std::span<const std::uint64_t> row_words(std::size_t r) const {
    return {data_.data() + r * words_per_row_, words_per_row_};
  }
  std::size_t words_per_row() const { return words_per_row_; }
  const std::vector<std::uint64_t>& words() const { return data_; }

  std::size_t row_popcount(std::size_t r) const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> data_;
};

// A sampled training set. Exactly one payload is active, selected by tag:
//   kTightness    -> bits with one column; bit = 1 means z = +z0/R.
//   kMemorization -> bits with d columns (one row per example).
//   kCoordinate   -> indices (one basis index per example).
struct Dataset {
  ProblemTag tag;
  std::int64_t n = 0;
  std::int64_t d = 0;
  BitMatrix bits;
  std::vector<std::uint32_t> indices;
};

// Binary serialization:
//   byte 0      magic 0xD5
//   byte 1      tag (1 tightness / 2 memorization / 3 coordinate)
//   bytes 2-3   n, uint16 little-endian
//   bytes 4-7   d, uint32 little-endian
//   payload     bit rows packed LSB-first, 64-bit words little-endian
//               (tightness: 1 column per row; memorization: d columns per
//               row), or n uint32 little-endian basis indices.
std::vector<std::uint8_t> serialize_dataset(const Dataset& ds);
Dataset deserialize_dataset(std::span<const std::uint8_t> bytes);

// --- Tightness problem --------------------------------------------------------

// Loss f(w, z) = -L <w, z> on the two-point alphabet {+z0/R, -z0/R} with
// ||z0|| = R; the direction is normalized inside the constructor so the
// invariant holds exactly up to rounding.
struct TightnessProblem {
  double L = 1.0;
  double R = 1.0;
  std::vector<double> z0;

  TightnessProblem(double L_, double R_, std::span<const double> direction);
  // Axis-aligned direction e_1 in dimension dim.
  TightnessProblem(double L_, double R_, std::size_t dim);

  std::int64_t dim() const { return static_cast<std::int64_t>(z0.size()); }
};

// sign = +1 selects z = +z0/R, sign = -1 selects -z0/R.
double tightness_loss(const TightnessProblem& p, std::span<const double> w,
                      int sign);

// Exact empirical risk minimizer over the R-ball: majority vote of the
// dataset signs times z0, with ties (sum = 0) resolved to +z0.
std::vector<double> tightness_erm(const TightnessProblem& p, const Dataset& ds);

Dataset sample_tightness_dataset(std::int64_t n, RngStream& rng);

// E|sum of n independent signs| (exact, binomial weights in log space).
double rademacher_sum_abs_mean(std::int64_t n);
// Exact expected generalization gap of the ERM: (L R / n) E|sum of signs|.
double tightness_erm_gap_exact(const TightnessProblem& p, std::int64_t n);

// --- Memorization problem -------------------------------------------------------

// f(w, z) = sum_i z(i) w(i)^2 + lambda <w, z> + max(max_i w(i), 0) over the
// unit ball, z ~ Bernoulli(1/2)^d. Defaults follow the schedule T = 2n^2,
// eta = 1/(n sqrt(5n)), d = ceil(0.75 T 2^n), lambda = 1/(n sqrt(d)); d and
// lambda may be overridden but lambda <= 1/(n sqrt(d)) is enforced so the
// effective Lipschitz constant 3 + lambda sqrt(d) stays <= 4.
struct MemorizationProblem {
  std::int64_t n;
  std::int64_t d;
  std::int64_t T;
  double eta;
  double lambda;
  double R = 1.0;

  double L_effective() const;

  static MemorizationProblem with_schedule(std::int64_t n);
  static MemorizationProblem custom(std::int64_t n, std::int64_t d,
                                    std::int64_t T, double eta, double lambda);
  static std::int64_t schedule_dim(std::int64_t n);
  static std::int64_t schedule_steps(std::int64_t n);
  static double schedule_eta(std::int64_t n);
};

double memorization_loss(const MemorizationProblem& p,
                         std::span<const double> w, std::span<const double> z);

// Subgradient of the empirical risk at w given the empirical mean mu of the
// dataset bits: 2 diag(mu) w + lambda mu + g3, where g3 is the max-term
// subgradient (zero when w = 0 or no maximizing coordinate is nonnegative,
// else the basis vector of the smallest maximizing index with w(i) >= 0).
std::vector<double> memorization_subgrad(const MemorizationProblem& p,
                                         std::span<const double> w,
                                         std::span<const double> mu);

// Population risk under Bernoulli(1/2)^d:
//   0.5 ||w||^2 + 0.5 lambda sum_i w(i) + max(max_i w(i), 0).
double memorization_population_risk(const MemorizationProblem& p,
                                    std::span<const double> w);
double memorization_empirical_risk(const MemorizationProblem& p,
                                   std::span<const double> w,
                                   std::span<const double> mu);

Dataset sample_memorization_dataset(const MemorizationProblem& p,
                                    RngStream& rng);

// Coordinates never set across the dataset rows ("bad" = dormant), ascending,
// plus the count.
struct BadCoordinates {
  std::vector<std::uint32_t> indices;
  std::int64_t count = 0;
};
BadCoordinates bad_coordinates(const Dataset& ds);
std::int64_t bad_coordinate_count(const Dataset& ds);

// Dataset summary sufficient for the GD dynamics: bucket_counts[k-1] = number
// of coordinates set in exactly k of the n rows (k = 1..n), bad_count =
// coordinates set in none. Sampled directly: one 64-bit word per coordinate
// holds that column's n Bernoulli bits and its popcount is the bucket draw,
// which reproduces the exact joint law of the histogram without
// materializing the n x d matrix.
struct ColumnHistogram {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::vector<std::int64_t> bucket_counts;  // size n, k = 1..n
  std::int64_t bad_count = 0;
};
ColumnHistogram sample_column_histogram(std::int64_t n, std::int64_t d,
                                        RngStream& rng);
ColumnHistogram histogram_from_dataset(const Dataset& ds);

// Per-column set-bit counts of a memorization dataset (n <= 255).
std::vector<std::uint8_t> column_counts(const Dataset& ds);

// The "bad-coordinate event" T/2 <= bad_count <= T and its Chernoff lower
// bound 1 - 2 exp(-T/36), valid at the default schedule where
// E[bad_count] = d 2^-n = 0.75 T.
bool memorization_event_holds(const MemorizationProblem& p,
                              std::int64_t bad_count);
double memorization_event_probability_lower(std::int64_t n);

// --- Coordinate problem ---------------------------------------------------------

// f(w, z) = -<w, z> with z ranging over the standard basis of R^d, sampled
// uniformly. Schedule: T = n^2, eta = 1/(n sqrt(n)), d = 2n^2.
struct CoordinateProblem {
  std::int64_t d;

  static double schedule_eta(std::int64_t n);
  static std::int64_t schedule_steps(std::int64_t n);
  static std::int64_t schedule_dim(std::int64_t n);
};

double coordinate_loss(const CoordinateProblem& p, std::span<const double> w,
                       std::uint32_t index);
std::uint32_t sample_coordinate_point(const CoordinateProblem& p,
                                      RngStream& rng);
Dataset sample_coordinate_dataset(const CoordinateProblem& p, std::int64_t n,
                                  RngStream& rng);

// Per-coordinate statistics of a dataset: column means (memorization),
// index frequencies (coordinate), or the mean sign in [-1, 1] (tightness,
// single entry).
std::vector<double> empirical_mean(const Dataset& ds);

}  // namespace gdlab
