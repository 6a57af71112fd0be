#include "uvg/guidance.hpp"

#include <cmath>
#include <string>

#include "uvg/error.hpp"

namespace uvg {

void GuidanceSpec::validate(std::size_t n_streams) const {
  for (const auto& [stream, w] : weights) {
    if (stream >= n_streams) throw InvalidArgument("guidance names stream " + std::to_string(stream));
    if (!std::isfinite(w)) throw InvalidArgument("guidance weight must be finite");
  }
}

Array to_x0(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s) {
  require_same_shape(pred, x_t, "to_x0");
  const double a = s.signal(t), b = s.noise(t);
  switch (kind) {
    case PredictionKind::epsilon: {
      if (a == 0.0) throw NumericError("epsilon prediction carries no x0 information at alpha_bar = 0");
      Array out(x_t.shape());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x_t[i] - b * pred[i]) / a;
      return out;
    }
    case PredictionKind::v: return axpby(a, x_t, -b, pred);
    case PredictionKind::x0: return pred;
  }
  throw InvalidArgument("unknown prediction kind");
}

Array to_epsilon(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s) {
  require_same_shape(pred, x_t, "to_epsilon");
  const double a = s.signal(t), b = s.noise(t);
  switch (kind) {
    case PredictionKind::epsilon: return pred;
    case PredictionKind::v: return axpby(b, x_t, a, pred);
    case PredictionKind::x0: {
      if (b == 0.0) throw NumericError("x0 prediction carries no noise information at alpha_bar = 1");
      Array out(x_t.shape());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x_t[i] - a * pred[i]) / b;
      return out;
    }
  }
  throw InvalidArgument("unknown prediction kind");
}

Array from_x0_eps(const Array& x0, const Array& eps, PredictionKind kind, int t, const NoiseSchedule& s) {
  require_same_shape(x0, eps, "from_x0_eps");
  switch (kind) {
    case PredictionKind::epsilon: return eps;
    case PredictionKind::x0: return x0;
    case PredictionKind::v: return axpby(s.signal(t), eps, -s.noise(t), x0);
  }
  throw InvalidArgument("unknown prediction kind");
}

Array to_v(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s) {
  if (kind == PredictionKind::v) return pred;
  return from_x0_eps(to_x0(pred, kind, x_t, t, s), to_epsilon(pred, kind, x_t, t, s), PredictionKind::v, t, s);
}

Array combine_cfg(const Array& uncond, const std::vector<std::pair<Array, double>>& conds) {
  Array out = uncond;
  for (const auto& [c, w] : conds) {
    require_same_shape(uncond, c, "combine_cfg");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * (c[i] - uncond[i]);
  }
  return out;
}

}  // namespace uvg
