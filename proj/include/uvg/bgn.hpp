#pragma once

#include <span>

#include "uvg/array.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

/// Only the linear ramp is implemented; the enum leaves room for others.
enum class RampKind { linear };

/// Bias window [t_m, t_n]: target-only noising below t_m, condition-only
/// noising from t_n on, linear blend in between.
struct BiasedNoiseSpec {
  int t_m = 0;
  int t_n = 700;
  RampKind ramp = RampKind::linear;

  /// Throws InvalidArgument unless 0 <= t_m < t_n <= N.
  void validate(const NoiseSchedule& s) const;
};

/// Condition/target pair with the shared Gaussian draw. Rows are samples.
struct PairedSample {
  Array target;     // v^T
  Array condition;  // v^C
  Array eps;
};

double bias_ramp(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t);

/// sqrt(alpha_bar) / sqrt(1 - alpha_bar); 0 when alpha_bar = 0.
/// Throws NumericError at alpha_bar = 1.
double bias_coefficient(const NoiseSchedule& s, int t);

Array biased_noise(const BiasedNoiseSpec& spec, const NoiseSchedule& s, const PairedSample& p, int t);
Array forward_biased(const BiasedNoiseSpec& spec, const NoiseSchedule& s, const PairedSample& p, int t);
Array forward_standard(const NoiseSchedule& s, const Array& x0, const Array& eps, int t);

// Row kernels used by the training loop, where t varies per row. The array
// functions above are thin loops over these.
void biased_noise_row(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t,
                      std::span<const double> target, std::span<const double> condition,
                      std::span<const double> eps, std::span<double> out);
void forward_biased_row(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t,
                        std::span<const double> target, std::span<const double> condition,
                        std::span<const double> eps, std::span<double> out);
void forward_standard_row(const NoiseSchedule& s, int t, std::span<const double> x0,
                          std::span<const double> eps, std::span<double> out);

}  // namespace uvg
