#pragma once

#include <string>
#include <vector>

#include "uvg/bgn.hpp"
#include "uvg/config.hpp"
#include "uvg/data.hpp"
#include "uvg/guidance.hpp"
#include "uvg/sampler.hpp"
#include "uvg/schedule.hpp"
#include "uvg/train.hpp"

namespace uvg {

/// A config with every task-dependent default filled in.
struct Experiment {
  NoiseSchedule schedule = make_linear_schedule(2, 0.5, 0.5);
  double beta_start = 1e-4;
  double beta_end = 2e-2;
  TaskSpec task;
  TrainConfig train;
  TrainTarget bgn_target = TrainTarget::epsilon_prime;
  BiasedNoiseSpec bgn;
  int bgn_t_start = 0;
  BgnStepper bgn_stepper = BgnStepper::bridge;
  /// The train command fits the biased model instead of the standard one.
  bool objective_bgn = false;
  SamplerConfig sampler;
  std::vector<double> edit_fractions;
  double w_text = 1.0;
  double w_image = 1.0;
  std::size_t eval_samples = 1000;
  std::uint64_t eval_seed = 12345;
  std::string checkpoint;

  /// Training settings for the standard or the biased model.
  TrainConfig training(bool biased) const;
  /// Guidance over the task's streams from (w_text, w_image).
  GuidanceSpec guidance() const;
  /// Every key with its effective value, sorted: reloading it reproduces
  /// this experiment.
  std::string resolved_text() const;
};

/// Throws ConfigError on malformed or inconsistent values.
Experiment resolve_experiment(const Config& cfg);

/// Steps used when sampling starts at t0 instead of N.
int scaled_steps(int steps, int t0, int n_steps);

/// Conditioning modes evaluated during training: text, image, both (or only
/// text for single-stream tasks).
std::vector<std::string> eval_modes(const TaskSpec& task);
ConditionTokens tokens_for_mode(const TaskBatch& batch, const std::string& mode);

/// Frechet distance between [samples, f] and [targets, f], where f stacks the
/// condition features visible in `mode`. Unlike the pooled distance it is
/// sensitive to whether samples follow their conditions.
double conditional_frechet(const Array& samples, const TaskBatch& eval, const std::string& mode);

/// Samples a model on the evaluation batch in a conditioning mode, using
/// the BGN sampler for biased models.
Array sample_for_eval(const Denoiser& model, const TaskBatch& eval, const std::string& mode, const Experiment& ex,
                      Rng& rng);

EvalHook make_eval_hook(const Experiment& ex);

struct MethodScores {
  std::string method;
  double frechet = 0.0;
  double energy = 0.0;
  double paired_mse = 0.0;
  double sharpness = 0.0;
};

struct CompareResult {
  std::vector<MethodScores> rows;
  std::vector<MetricRow> standard_log;
  std::vector<MetricRow> bgn_log;

  const MethodScores& at(const std::string& method) const;
};

/// Trains a standard and a biased model on the paired task and scores
/// editing at each edit fraction against BGN sampling on held-out pairs.
CompareResult compare_bgn(const Experiment& ex);

struct SweepCell {
  double w_text;
  double w_image;
  double to_text_marginal;
  double to_image_marginal;
  double to_pooled_marginal;
};

/// Guidance grid {0, 0.5, 1, 2}^2 for a gauss2d model at the fixed
/// condition (class 0, anchor (0, 1.5)).
std::vector<SweepCell> sweep_guidance(const Denoiser& model, const Experiment& ex);

std::string metric_log_csv(const std::vector<MetricRow>& log);
std::string compare_csv(const CompareResult& r);
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace uvg
