#pragma once
// Named experiments reproducing the desk-scale claims, with CSV/JSON reports
// and machine-readable pass/fail.

#include <cstdint>
#include <string>
#include <vector>

#include "gdlab/report.hpp"

namespace gdlab {

struct ExperimentSpec {
  // One of: tightness, gd-dynamics, residual, decoder, ecmi, bounds-eval,
  // figures.
  std::string name;
  std::vector<std::int64_t> n_grid;  // empty -> experiment default
  std::int64_t trials = 0;           // 0 -> experiment default
  std::vector<double> sigma_grid;    // empty -> experiment default
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string out;             // report path; figures: output directory
  std::string format = "json"; // csv | json
};

ExperimentReport cmd_tightness(const ExperimentSpec& spec);
ExperimentReport cmd_gd_dynamics(const ExperimentSpec& spec);
ExperimentReport cmd_residual(const ExperimentSpec& spec);
ExperimentReport cmd_decoder(const ExperimentSpec& spec);
ExperimentReport cmd_ecmi(const ExperimentSpec& spec);
ExperimentReport cmd_bounds_eval(const ExperimentSpec& spec);
ExperimentReport cmd_figures(const ExperimentSpec& spec);

// Validates the spec (SpecError on violations), dispatches, writes the
// report to the requested sink, and returns the process exit code: 0 when
// every verdict passes, 2 otherwise. Wall-clock is printed to stderr only,
// so output files stay byte-identical across runs and thread counts.
int run_experiment(const ExperimentSpec& spec);

}  // namespace gdlab
