#include "uvg/schedule.hpp"

#include <cmath>
#include <string>

#include "uvg/error.hpp"

namespace uvg {

NoiseSchedule::NoiseSchedule(std::vector<double> beta, std::vector<double> alpha_bar,
                             bool terminal_rescaled)
    : beta_(std::move(beta)), alpha_bar_(std::move(alpha_bar)), terminal_rescaled_(terminal_rescaled) {
  if (beta_.size() < 2 || beta_.size() != alpha_bar_.size()) {
    throw InvalidArgument("schedule needs matching beta/alpha_bar tables of length >= 2");
  }
  signal_.reserve(alpha_bar_.size());
  for (std::size_t i = 0; i < alpha_bar_.size(); ++i) {
    const double a = alpha_bar_[i];
    if (!(a >= 0.0 && a < 1.0) || (i && !(a < alpha_bar_[i - 1]))) {
      throw NumericError("alpha_bar must be strictly decreasing within [0, 1)");
    }
    signal_.push_back(std::sqrt(a));
  }
}

void NoiseSchedule::check_timestep(int t, int lo) const {
  if (t < lo || t > n_steps()) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(n_steps()) + "]");
  }
}

double NoiseSchedule::beta(int t) const {
  check_timestep(t);
  return beta_[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  check_timestep(t, 0);
  return t == 0 ? 1.0 : alpha_bar_[t - 1];
}

double NoiseSchedule::signal(int t) const {
  check_timestep(t, 0);
  return t == 0 ? 1.0 : signal_[t - 1];
}

double NoiseSchedule::noise(int t) const { return std::sqrt(1.0 - alpha_bar(t)); }

NoiseSchedule make_linear_schedule(int n_steps, double beta_start, double beta_end) {
  if (n_steps < 2 || !(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
    throw InvalidArgument("linear schedule requires n_steps >= 2 and 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> beta(n_steps), ab(n_steps);
  double prod = 1.0;
  for (int i = 0; i < n_steps; ++i) {
    beta[i] = beta_start + (beta_end - beta_start) * i / (n_steps - 1);
    prod *= 1.0 - beta[i];
    ab[i] = prod;
  }
  return NoiseSchedule(std::move(beta), std::move(ab), false);
}

NoiseSchedule rescale_zero_terminal_snr(const NoiseSchedule& s) {
  if (s.terminal_rescaled()) throw StateError("schedule is already terminal-rescaled");
  const int n = s.n_steps();
  const double first = s.signal(1), last = s.signal(n);
  if (!(first > last)) throw NumericError("degenerate schedule: sqrt(alpha_bar) is flat");
  std::vector<double> beta(n), ab(n);
  double prev = 1.0;
  for (int t = 1; t <= n; ++t) {
    const double r = (s.signal(t) - last) * first / (first - last);
    ab[t - 1] = r * r;
    beta[t - 1] = 1.0 - ab[t - 1] / prev;
    prev = ab[t - 1];
  }
  return NoiseSchedule(std::move(beta), std::move(ab), true);
}

double snr(const NoiseSchedule& s, int t) {
  const double a = s.alpha_bar(t);
  s.check_timestep(t);
  return a == 0.0 ? 0.0 : a / (1.0 - a);
}

Array sample_normal(const Shape& shape, Rng& rng) {
  Array out(shape);
  for (double& v : out.values()) v = rng.normal();
  return out;
}

Array sample_offset_noise(const Shape& shape, const OffsetNoiseConfig& cfg, Rng& rng) {
  if (shape.empty() || shape_size(shape) == 0) throw InvalidArgument("offset noise needs a non-empty shape");
  if (!(cfg.strength >= 0.0)) throw InvalidArgument("offset noise strength must be >= 0");
  Array out = sample_normal(shape, rng);
  if (cfg.strength == 0.0) return out;
  for (std::size_t r = 0; r < shape[0]; ++r) {
    const double z = cfg.strength * rng.normal();
    for (double& v : out.row(r)) v += z;
  }
  return out;
}

}  // namespace uvg
