#pragma once

#include <vector>

#include "uvg/array.hpp"
#include "uvg/rng.hpp"

namespace uvg {

/// Discrete noise schedule indexed by t in {1..N}; t = 0 denotes clean data
/// and is accepted by the accessors with alpha_bar(0) = 1.
class NoiseSchedule {
 public:
  NoiseSchedule(std::vector<double> beta, std::vector<double> alpha_bar, bool terminal_rescaled);

  int n_steps() const { return static_cast<int>(beta_.size()); }
  bool terminal_rescaled() const { return terminal_rescaled_; }

  double beta(int t) const;
  double alpha_bar(int t) const;
  /// sqrt(alpha_bar(t)) and sqrt(1 - alpha_bar(t)).
  double signal(int t) const;
  double noise(int t) const;

  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

  /// Throws InvalidArgument unless lo <= t <= N.
  void check_timestep(int t, int lo = 1) const;

 private:
  std::vector<double> beta_;       // beta_[t-1]
  std::vector<double> alpha_bar_;  // alpha_bar_[t-1]
  std::vector<double> signal_;
  bool terminal_rescaled_;
};

NoiseSchedule make_linear_schedule(int n_steps, double beta_start, double beta_end);

/// Affine map on sqrt(alpha_bar) pinning the first entry and sending the last
/// to exactly zero. Betas are re-derived, so beta(N) becomes 1.
NoiseSchedule rescale_zero_terminal_snr(const NoiseSchedule& s);

/// alpha_bar / (1 - alpha_bar), with 0 at alpha_bar = 0.
double snr(const NoiseSchedule& s, int t);

struct OffsetNoiseConfig {
  double strength = 0.0;
};

/// eps + s * z broadcast over all but the leading axis, one z per row.
/// With s = 0 no z is drawn, so the stream matches plain Gaussian sampling.
Array sample_offset_noise(const Shape& shape, const OffsetNoiseConfig& cfg, Rng& rng);

/// Elementwise standard normal.
Array sample_normal(const Shape& shape, Rng& rng);

}  // namespace uvg
