#include "uvg/bgn.hpp"

#include <string>

#include "uvg/error.hpp"

namespace uvg {

void BiasedNoiseSpec::validate(const NoiseSchedule& s) const {
  if (t_m < 0 || t_m >= t_n || t_n > s.n_steps()) {
    throw InvalidArgument("bias window requires 0 <= t_m < t_n <= N, got t_m=" + std::to_string(t_m) +
                          " t_n=" + std::to_string(t_n));
  }
}

double bias_ramp(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t) {
  spec.validate(s);
  s.check_timestep(t, 0);
  if (t < spec.t_m) return 0.0;
  if (t >= spec.t_n) return 1.0;
  return static_cast<double>(t - spec.t_m) / static_cast<double>(spec.t_n - spec.t_m);
}

double bias_coefficient(const NoiseSchedule& s, int t) {
  const double a = s.alpha_bar(t);
  if (a == 0.0) return 0.0;
  if (a == 1.0) throw NumericError("bias coefficient undefined at alpha_bar = 1");
  return s.signal(t) / s.noise(t);
}

namespace {

void check_rows(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                std::span<double> out) {
  if (a.size() != b.size() || a.size() != c.size() || a.size() != out.size()) {
    throw InvalidArgument("paired sample rows differ in length");
  }
}

void check_pair(const PairedSample& p) {
  require_same_shape(p.target, p.condition, "paired sample");
  require_same_shape(p.target, p.eps, "paired sample");
  if (p.target.rank() == 0) throw InvalidArgument("paired sample is empty");
}

}  // namespace

void biased_noise_row(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t,
                      std::span<const double> target, std::span<const double> condition,
                      std::span<const double> eps, std::span<double> out) {
  check_rows(target, condition, eps, out);
  const double lam = bias_ramp(spec, s, t);
  if (lam == 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eps[i];
    return;
  }
  const double k = lam * bias_coefficient(s, t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eps[i] + k * (condition[i] - target[i]);
}

void forward_biased_row(const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t,
                        std::span<const double> target, std::span<const double> condition,
                        std::span<const double> eps, std::span<double> out) {
  // sqrt(ab) vT + sqrt(1-ab) eps' regrouped as sqrt(ab) (vT + lam (vC - vT)) + sqrt(1-ab) eps.
  // At the knots the mixed signal is exactly vT or vC, so both boundaries
  // coincide with the standard forward process bit for bit.
  check_rows(target, condition, eps, out);
  const double lam = bias_ramp(spec, s, t);
  const double a = s.signal(t), b = s.noise(t);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double y;
    if (lam == 0.0) {
      y = target[i];
    } else if (lam == 1.0) {
      y = condition[i];
    } else {
      y = target[i] + lam * (condition[i] - target[i]);
    }
    out[i] = a * y + b * eps[i];
  }
}

void forward_standard_row(const NoiseSchedule& s, int t, std::span<const double> x0,
                          std::span<const double> eps, std::span<double> out) {
  if (x0.size() != eps.size() || x0.size() != out.size()) throw InvalidArgument("forward: shape mismatch");
  const double a = s.signal(t), b = s.noise(t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x0[i] + b * eps[i];
}

Array biased_noise(const BiasedNoiseSpec& spec, const NoiseSchedule& s, const PairedSample& p, int t) {
  check_pair(p);
  Array out(p.eps.shape());
  biased_noise_row(spec, s, t, p.target.values(), p.condition.values(), p.eps.values(), out.values());
  return out;
}

Array forward_biased(const BiasedNoiseSpec& spec, const NoiseSchedule& s, const PairedSample& p, int t) {
  check_pair(p);
  Array out(p.eps.shape());
  forward_biased_row(spec, s, t, p.target.values(), p.condition.values(), p.eps.values(), out.values());
  return out;
}

Array forward_standard(const NoiseSchedule& s, const Array& x0, const Array& eps, int t) {
  require_same_shape(x0, eps, "forward_standard");
  Array out(x0.shape());
  forward_standard_row(s, t, x0.values(), eps.values(), out.values());
  return out;
}

}  // namespace uvg
