#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "uvg/array.hpp"
#include "uvg/bgn.hpp"
#include "uvg/guidance.hpp"
#include "uvg/prediction.hpp"
#include "uvg/rng.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

enum class SamplerKind { ancestral, deterministic };

SamplerKind parse_sampler_kind(std::string_view s);
std::string to_string(SamplerKind k);

/// How the BGN sampler moves between timesteps. `plain` is the ordinary
/// deterministic step applied to the biased model's output; `bridge`
/// re-derives the unbiased noise from the current target estimate so the
/// state stays on the biased forward path.
enum class BgnStepper { bridge, plain };

BgnStepper parse_bgn_stepper(std::string_view s);
std::string to_string(BgnStepper k);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::deterministic;
  int steps = 50;
  /// 1.0 starts from pure noise at t = N; below 1 partially noises `init`.
  double start_fraction = 1.0;
  /// Scale on the ancestral posterior noise; 0 reduces to the deterministic step.
  double eta = 1.0;

  void validate(int n_steps) const;
};

/// floor(start_fraction * N), at least 1.
int start_timestep(const SamplerConfig& sc, int n_steps);

/// Descending grid from the start timestep to 1, uniformly strided.
std::vector<int> timestep_grid(const SamplerConfig& sc, int n_steps);

/// Model output combined across guidance branches, in the model's own
/// prediction space.
Array guided_prediction(const Predictor& model, const Array& x_t, int t, const ConditionTokens& cond,
                        const GuidanceSpec& g);

/// Clean-data and noise estimates at (x_t, t). An epsilon model at a
/// zero-signal timestep yields x0 = 0 and eps = x_t.
struct StepEstimate {
  Array x0;
  Array eps;
};
StepEstimate estimate(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s);

/// Reverse process from start_timestep down to clean data. Rows come from
/// cond.batch(); x_dim is used only when no init is supplied.
Array sample(const Predictor& model, const ConditionTokens& cond, const GuidanceSpec& g, const SamplerConfig& sc,
             const NoiseSchedule& s, const std::optional<Array>& init, Rng& rng, std::size_t x_dim = 0);

/// Runs the reverse process over `grid` starting from state x.
Array reverse_from(const Predictor& model, Array x, const std::vector<int>& grid, const ConditionTokens& cond,
                   const GuidanceSpec& g, const SamplerConfig& sc, const NoiseSchedule& s, Rng& rng);

/// Starts from the noised condition and walks the biased bridge back to the
/// target domain (deterministic sampler only).
Array sample_bgn(const Predictor& model, const Array& condition, const ConditionTokens& cond,
                 const BiasedNoiseSpec& spec, const GuidanceSpec& g, const SamplerConfig& sc, const NoiseSchedule& s,
                 Rng& rng, BgnStepper stepper = BgnStepper::bridge);

/// Partial-noising editing with a target-domain model; start_fraction < 1.
Array editing_baseline(const Predictor& model, const Array& init, const ConditionTokens& cond, const GuidanceSpec& g,
                       const SamplerConfig& sc, const NoiseSchedule& s, Rng& rng);

}  // namespace uvg
