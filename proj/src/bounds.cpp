#include "gdlab/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "gdlab/numerics.hpp"

namespace gdlab {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_lrn(double L, double R, std::int64_t n) {
  require(L > 0.0 && R > 0.0, "bound evaluator: L and R must be positive");
  require(n >= 1, "bound evaluator: n must be >= 1");
}

}  // namespace

double ege_from_iomi(double L, double R, std::int64_t n, double iomi_nats) {
  check_lrn(L, R, n);
  require(iomi_nats >= 0.0, "ege_from_iomi: information must be nonnegative");
  return L * R * std::sqrt(2.0 * iomi_nats / static_cast<double>(n));
}

double ege_from_cmi(double L, double R, std::int64_t n, double cmi_nats) {
  check_lrn(L, R, n);
  require(cmi_nats >= 0.0, "ege_from_cmi: information must be nonnegative");
  return L * R * std::sqrt(8.0 * cmi_nats / static_cast<double>(n));
}

double ege_individual_iomi(double L, double R, std::int64_t n,
                           std::span<const double> per_sample_mi) {
  check_lrn(L, R, n);
  require(static_cast<std::int64_t>(per_sample_mi.size()) == n,
          "ege_individual_iomi: need one information term per sample");
  double acc = 0.0;
  for (double v : per_sample_mi) {
    require(v >= 0.0, "ege_individual_iomi: information must be nonnegative");
    acc += std::sqrt(2.0 * v);
  }
  return L * R * acc / static_cast<double>(n);
}

double ege_individual_cmi(double L, double R, std::int64_t n,
                          std::span<const double> per_sample_cmi) {
  check_lrn(L, R, n);
  require(static_cast<std::int64_t>(per_sample_cmi.size()) == n,
          "ege_individual_cmi: need one information term per sample");
  double acc = 0.0;
  for (double v : per_sample_cmi) {
    require(v >= 0.0, "ege_individual_cmi: information must be nonnegative");
    acc += std::sqrt(2.0 * v);
  }
  return 2.0 * L * R * acc / static_cast<double>(n);
}

double ege_from_ecmi(double L, double R, std::int64_t n, double ecmi_nats) {
  check_lrn(L, R, n);
  require(ecmi_nats >= 0.0, "ege_from_ecmi: information must be nonnegative");
  return L * R * std::sqrt(8.0 * ecmi_nats / static_cast<double>(n));
}

double gd_opt_error(double eta, std::int64_t T, double L, double R) {
  require(eta > 0.0, "gd_opt_error: eta must be positive");
  require(T >= 1, "gd_opt_error: T must be >= 1");
  require(L > 0.0 && R > 0.0, "gd_opt_error: L and R must be positive");
  const double dT = static_cast<double>(T);
  return R * R / (2.0 * eta * dT) + (std::log(dT) + 2.0) * eta * L * L / 2.0;
}

double gd_gen_error(double eta, std::int64_t T, double L, std::int64_t n) {
  require(eta > 0.0, "gd_gen_error: eta must be positive");
  require(T >= 1, "gd_gen_error: T must be >= 1");
  require(L > 0.0, "gd_gen_error: L must be positive");
  require(n >= 1, "gd_gen_error: n must be >= 1");
  const double dT = static_cast<double>(T);
  return 4.0 * L * L * std::sqrt(dT) * eta +
         4.0 * L * L * dT * eta / static_cast<double>(n);
}

double gd_excess_risk(double eta, std::int64_t T, double L, double R,
                      std::int64_t n) {
  return gd_opt_error(eta, T, L, R) + gd_gen_error(eta, T, L, n);
}

double proberror_bound(std::int64_t n) {
  require(n >= 1 && n <= 62, "proberror_bound: n out of range");
  const double dn = static_cast<double>(n);
  const double two_n = std::ldexp(1.0, static_cast<int>(n));
  const double first = exp_safe(2.0 * std::log(dn) + dn * kLn2 - two_n / dn);
  const double second = 6.0 * exp_safe(-dn * dn / 18.0);
  return first + second;
}

double pac_bayes_gen_bound(double L, double R, std::int64_t n, double delta,
                           double complexity) {
  check_lrn(L, R, n);
  require(delta > 0.0 && delta < 1.0,
          "pac_bayes_gen_bound: delta must be in (0, 1)");
  require(complexity >= 0.0,
          "pac_bayes_gen_bound: complexity must be nonnegative");
  const double dn = static_cast<double>(n);
  return L * R * std::sqrt((complexity + std::log(dn / delta)) / dn);
}

double good_event_complexity(std::int64_t n) {
  require(n >= 1, "good_event_complexity: n must be >= 1");
  const double n3 = static_cast<double>(n) * n * n;
  return 5.0 * n3 + 1.0;
}

PacBayesFailureConstants pacbayes_failure_constants(std::int64_t n,
                                                    double M_res) {
  require(n >= 1 && n <= 62, "pacbayes_failure_constants: n out of range");
  require(M_res >= 0.0,
          "pacbayes_failure_constants: M_res must be nonnegative");
  const double dn = static_cast<double>(n);
  const double n3 = dn * dn * dn;
  PacBayesFailureConstants k;
  k.residual_prob = M_res / 32.0;
  k.conditional_prob = 1.0 / 9.0;
  k.conditional_threshold = 0.1 * dn;
  k.classical_threshold = 0.6 * n3 - 0.5;
  const double correction =
      3.0 * n3 * std::ldexp(1.0, static_cast<int>(n)) * exp_safe(-dn * dn / 18.0);
  k.classical_prob = (k.classical_threshold - correction) / (4.4 * n3 + 1.5);
  k.classical_branch_valid = n >= 16;
  return k;
}

}  // namespace gdlab
