#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uvg/bgn.hpp"
#include "uvg/data.hpp"
#include "uvg/denoiser.hpp"
#include "uvg/rng.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

/// What the network regresses onto. The primed kinds are the biased-noise
/// objective: eps' itself, or v' = sqrt(ab) eps' - sqrt(1-ab) v^T.
enum class TrainTarget { epsilon, v, x0, epsilon_prime, v_prime };

TrainTarget parse_train_target(std::string_view s);
std::string to_string(TrainTarget t);
PredictionKind prediction_kind(TrainTarget t);
bool is_biased(TrainTarget t);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ParameterStore m;
  ParameterStore v;
  long step = 0;
};

AdamState adam_init(const ParameterStore& params);
void adam_update(ParameterStore& params, const ParameterStore& grads, AdamState& state, double lr,
                 const AdamConfig& cfg = {});

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  int n_iterations = 2000;
  double text_dropout = 0.5;
  double image_dropout = 0.1;
  TrainTarget target = TrainTarget::v;
  OffsetNoiseConfig offset_noise{0.1};
  std::optional<BiasedNoiseSpec> bgn;
  int eval_every = 500;
  std::uint64_t seed = 0;
  AdamConfig adam;

  /// Dropout probability of stream i: text for stream 0, image for the rest.
  double dropout(std::size_t stream) const { return stream == 0 ? text_dropout : image_dropout; }
  void validate() const;
};

/// A batch of training examples; `condition` is required for biased targets.
struct TrainBatch {
  Array target;
  Array condition;
  ConditionTokens tokens;
};

/// Draws t, noise and dropout from `rng` in that order, regresses onto the
/// configured target and applies one Adam update. Returns the MSE loss.
double train_step(Denoiser& model, const TrainBatch& batch, const TrainConfig& cfg, const NoiseSchedule& s,
                  AdamState& adam, Rng& rng);

struct MetricRow {
  int iteration;
  std::string mode;
  std::string metric;
  double value;
};

/// Everything needed to continue a run bit-for-bit.
struct TrainState {
  int iteration = 0;
  std::string data_rng;
  std::string noise_rng;
};

/// Called at iteration 0, every eval_every iterations and at the end.
using EvalHook = std::function<std::vector<MetricRow>(const Denoiser&, int iteration)>;
/// Called at every eval_every multiple and at the end.
using CheckpointHook = std::function<void(const Denoiser&, const AdamState&, const TrainState&)>;

struct TrainResult {
  Denoiser model;
  AdamState adam;
  TrainState state;
  std::vector<MetricRow> log;
  std::vector<double> losses;
};

struct ResumePoint {
  Denoiser model;
  AdamState adam;
  TrainState state;
};

ModelConfig model_config_for(const TaskSpec& task, const TrainConfig& cfg, int n_steps);

/// Generates a fresh task batch each iteration and trains for n_iterations.
TrainResult train_run(const TrainConfig& cfg, const TaskSpec& task, const NoiseSchedule& s,
                      const EvalHook& eval = {}, const CheckpointHook& checkpoint = {},
                      std::optional<ResumePoint> resume = std::nullopt);

}  // namespace uvg
