#include "uvg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "uvg/error.hpp"

namespace uvg {

SamplerKind parse_sampler_kind(std::string_view s) {
  if (s == "deterministic") return SamplerKind::deterministic;
  if (s == "ancestral") return SamplerKind::ancestral;
  throw InvalidArgument("unknown sampler '" + std::string(s) + "'");
}

std::string to_string(SamplerKind k) { return k == SamplerKind::ancestral ? "ancestral" : "deterministic"; }

BgnStepper parse_bgn_stepper(std::string_view s) {
  if (s == "bridge") return BgnStepper::bridge;
  if (s == "plain") return BgnStepper::plain;
  throw InvalidArgument("unknown BGN stepper '" + std::string(s) + "'");
}

std::string to_string(BgnStepper k) { return k == BgnStepper::plain ? "plain" : "bridge"; }

void SamplerConfig::validate(int n_steps) const {
  if (!(start_fraction > 0.0 && start_fraction <= 1.0)) throw InvalidArgument("start_fraction must be in (0, 1]");
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be >= 0");
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  const int t0 = start_timestep(*this, n_steps);
  if (steps > t0) {
    throw InvalidArgument(std::to_string(steps) + " steps exceed the " + std::to_string(t0) +
                          " available timesteps");
  }
}

int start_timestep(const SamplerConfig& sc, int n_steps) {
  // The small slack keeps e.g. 0.7 * 1000 from landing on 699.
  return std::max(1, static_cast<int>(std::floor(sc.start_fraction * n_steps + 1e-9)));
}

std::vector<int> timestep_grid(const SamplerConfig& sc, int n_steps) {
  sc.validate(n_steps);
  const int t0 = start_timestep(sc, n_steps);
  if (sc.steps == 1) return {t0};
  std::vector<int> grid;
  for (int i = sc.steps - 1; i >= 0; --i) {
    const double t = 1.0 + static_cast<double>(i) * (t0 - 1) / (sc.steps - 1);
    const int ti = static_cast<int>(std::nearbyint(t));
    if (grid.empty() || grid.back() != ti) grid.push_back(ti);
  }
  return grid;
}

Array guided_prediction(const Predictor& model, const Array& x_t, int t, const ConditionTokens& cond,
                        const GuidanceSpec& g) {
  if (g.plain) return model.predict(x_t, t, cond);
  g.validate(cond.count());
  const Array uncond = model.predict(x_t, t, cond.null());
  std::vector<std::pair<Array, double>> conds;
  for (const auto& [stream, w] : g.weights) {
    if (w == 0.0) continue;
    conds.emplace_back(model.predict(x_t, t, cond.only(stream)), w);
  }
  return combine_cfg(uncond, conds);
}

StepEstimate estimate(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s) {
  if (kind == PredictionKind::epsilon && s.alpha_bar(t) == 0.0) return {Array(x_t.shape()), x_t};
  return {to_x0(pred, kind, x_t, t, s), to_epsilon(pred, kind, x_t, t, s)};
}

namespace {

void check_state(const Array& x, int t) { x.check_finite("sampler state at t=" + std::to_string(t)); }

}  // namespace

Array reverse_from(const Predictor& model, Array x, const std::vector<int>& grid, const ConditionTokens& cond,
                   const GuidanceSpec& g, const SamplerConfig& sc, const NoiseSchedule& s, Rng& rng) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int t = grid[i];
    const int tp = i + 1 < grid.size() ? grid[i + 1] : 0;
    const Array pred = guided_prediction(model, x, t, cond, g);
    const StepEstimate e = estimate(pred, model.kind(), x, t, s);
    const double ap = s.signal(tp);
    if (sc.kind == SamplerKind::deterministic) {
      x = axpby(ap, e.x0, s.noise(tp), e.eps);
    } else {
      const double ab = s.alpha_bar(t), abp = s.alpha_bar(tp);
      const double var = (1.0 - abp) / (1.0 - ab) * (1.0 - ab / abp);
      const double sigma = sc.eta * std::sqrt(std::max(0.0, var));
      const double keep = std::sqrt(std::max(0.0, 1.0 - abp - sigma * sigma));
      Array next = axpby(ap, e.x0, keep, e.eps);
      for (double& v : next.values()) v += sigma * rng.normal();
      x = std::move(next);
    }
    check_state(x, t);
  }
  return x;
}

Array sample(const Predictor& model, const ConditionTokens& cond, const GuidanceSpec& g, const SamplerConfig& sc,
             const NoiseSchedule& s, const std::optional<Array>& init, Rng& rng, std::size_t x_dim) {
  const std::vector<int> grid = timestep_grid(sc, s.n_steps());
  const std::size_t rows = cond.batch();
  Array x;
  if (sc.start_fraction < 1.0) {
    if (!init) throw InvalidArgument("start_fraction < 1 requires an init sample");
    if (init->rank() != 2 || init->dim(0) != rows) throw InvalidArgument("init rows must match condition batch");
    x = forward_standard(s, *init, sample_normal(init->shape(), rng), grid.front());
  } else {
    const std::size_t d = init ? init->dim(1) : x_dim;
    if (!d) throw InvalidArgument("sample needs x_dim or an init to fix the sample shape");
    x = sample_normal({rows, d}, rng);
  }
  return reverse_from(model, std::move(x), grid, cond, g, sc, s, rng);
}

Array sample_bgn(const Predictor& model, const Array& condition, const ConditionTokens& cond,
                 const BiasedNoiseSpec& spec, const GuidanceSpec& g, const SamplerConfig& sc, const NoiseSchedule& s,
                 Rng& rng, BgnStepper stepper) {
  spec.validate(s);
  if (sc.kind != SamplerKind::deterministic) throw InvalidArgument("the BGN sampler is deterministic only");
  if (model.kind() == PredictionKind::x0) throw InvalidArgument("BGN models predict epsilon' or v'");
  if (condition.rank() != 2 || condition.dim(0) != cond.batch()) {
    throw InvalidArgument("condition rows must match token batch");
  }
  const std::vector<int> grid = timestep_grid(sc, s.n_steps());
  if (grid.front() < spec.t_n) {
    std::cerr << "warning: BGN sampling starts at t=" << grid.front() << " below t_n=" << spec.t_n << "\n";
  }
  Array x = forward_standard(s, condition, sample_normal(condition.shape(), rng), grid.front());
  if (stepper == BgnStepper::plain) return reverse_from(model, std::move(x), grid, cond, g, sc, s, rng);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int t = grid[i];
    const int tp = i + 1 < grid.size() ? grid[i + 1] : 0;
    const Array pred = guided_prediction(model, x, t, cond, g);
    Array x0, eps_b;
    if (model.kind() == PredictionKind::epsilon && s.alpha_bar(t) == 0.0) {
      // No signal left: the state is pure noise and the bridge sits at v^C.
      x0 = condition;
      eps_b = x;
    } else {
      x0 = to_x0(pred, model.kind(), x, t, s);
      eps_b = to_epsilon(pred, model.kind(), x, t, s);
    }
    const double k = bias_ramp(spec, s, t) * bias_coefficient(s, t);
    const double lp = bias_ramp(spec, s, tp);
    const double ap = s.signal(tp), bp = s.noise(tp);
    Array next(x.shape());
    for (std::size_t j = 0; j < n; ++j) {
      const double eps = eps_b[j] - k * (condition[j] - x0[j]);
      double y;
      if (lp == 0.0) {
        y = x0[j];
      } else if (lp == 1.0) {
        y = condition[j];
      } else {
        y = x0[j] + lp * (condition[j] - x0[j]);
      }
      next[j] = ap * y + bp * eps;
    }
    x = std::move(next);
    check_state(x, t);
  }
  return x;
}

Array editing_baseline(const Predictor& model, const Array& init, const ConditionTokens& cond, const GuidanceSpec& g,
                       const SamplerConfig& sc, const NoiseSchedule& s, Rng& rng) {
  if (!(sc.start_fraction < 1.0)) throw InvalidArgument("editing needs start_fraction < 1");
  return sample(model, cond, g, sc, s, init, rng);
}

}  // namespace uvg
