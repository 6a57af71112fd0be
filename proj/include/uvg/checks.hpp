#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uvg/denoiser.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

/// One check inside an oracle suite. `value` is the measured error or
/// statistic and `limit` the bound it was held to.
struct CheckOutcome {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

const std::vector<std::string>& check_suites();

/// Runs every suite whose name contains `filter` (all when empty). Fixture
/// CSVs are read from `fixture_dir`; a missing, unparsable or tampered
/// fixture is reported as a failed check naming the file.
std::vector<CheckOutcome> run_checks(const std::string& fixture_dir, std::string_view filter = {});

std::string checks_csv(const std::vector<CheckOutcome>& results);

std::uint64_t fnv1a64(std::string_view s);

/// Deterministic probe value shared with the fixture generator.
double probe(long k, int salt);

// Building blocks also used directly by the acceptance tests.

/// Worst elementwise error at the bias window knots over random instances:
/// ramp values, and forward_biased against forward_standard of the target
/// at t_m and of the condition at t_n with a shared draw.
double bgn_knot_error(std::size_t instances, std::uint64_t seed);

struct GaussianSamplingResult {
  /// Largest |sample mean - true mean| over coordinates, in standard errors.
  double mean_error_se = 0.0;
  /// |tr(sample cov) - tr(cov)| / tr(cov).
  double trace_rel_error = 0.0;
  /// The sampler is a composition of affine maps for Gaussian data, so its
  /// exact output law is known. These compare the samples with that law
  /// (in standard errors) and the law with the target (relative trace gap).
  double mean_vs_predicted_se = 0.0;
  double trace_vs_predicted_se = 0.0;
  double predicted_trace_rel_error = 0.0;
};

/// Bayes-optimal Gaussian denoiser pushed through the deterministic sampler.
GaussianSamplingResult gaussian_sampling_check(const NoiseSchedule& s, int steps, std::size_t n, std::uint64_t seed);

/// Largest relative error (per parameter array, 2-norm) between backward()
/// and central finite differences with step h.
double gradient_check(const ModelConfig& cfg, std::uint64_t seed, double h = 1e-5);

}  // namespace uvg
