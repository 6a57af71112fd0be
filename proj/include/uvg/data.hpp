#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uvg/array.hpp"
#include "uvg/metrics.hpp"
#include "uvg/prediction.hpp"
#include "uvg/rng.hpp"

namespace uvg {

struct DegradationSpec {
  int blur_width = 5;
  double blur_sigma = 1.0;
  int downsample_stride = 2;

  void validate(std::size_t dims) const;
};

struct TaskSpec {
  TaskKind kind = TaskKind::gauss2d;
  std::size_t dims = 2;
  int n_classes = 4;
  DegradationSpec degradation;
  /// Seeds the token projections; data draws use the caller's Rng.
  std::uint64_t seed = 0;
  std::size_t tokens_per_stream = 4;
  std::size_t token_dim = 8;

  // sr1d: Gaussian amplitudes on modes 0..2 and one high mode.
  double amplitude = 1.0;
  int high_mode = 6;

  // traj: 8 frames of 2-D positions.
  double start_scale = 1.0;
  double velocity_scale = 0.5;
  double jitter = 0.05;

  void validate() const;
  /// Feature width of each token stream, which fixes the model's streams.
  std::vector<std::size_t> stream_features() const;
  bool paired() const { return kind != TaskKind::gauss2d; }
};

/// Default dims per task: gauss2d 2, sr1d 16, traj 16.
TaskSpec default_task(TaskKind kind);

/// Fixed seeded affine projections from per-stream features to K tokens of
/// width d_cond. The null encoding is the zero matrix; the constant part of
/// the map keeps every real encoding away from it.
class TokenEncoder {
 public:
  TokenEncoder(std::uint64_t seed, const std::vector<std::size_t>& feature_dims, std::size_t tokens,
               std::size_t token_dim);
  /// features[i] is (n, feature_dims[i]).
  ConditionTokens encode(const std::vector<Array>& features) const;
  std::size_t streams() const { return proj_.size(); }

 private:
  std::vector<Array> proj_;  // (f_i + 1, K * d_cond), last row constant
  std::size_t tokens_, token_dim_;
};

/// One generated batch. `condition` is empty for gauss2d; `labels` and
/// `anchors` are filled for gauss2d only.
struct TaskBatch {
  Array target;
  Array condition;
  ConditionTokens tokens;
  std::vector<Array> features;
  std::vector<int> labels;
  Array anchors;
};

TaskBatch gen_gauss2d(const TaskSpec& spec, std::size_t n, Rng& rng);
TaskBatch gen_sr1d(const TaskSpec& spec, std::size_t n, Rng& rng);
TaskBatch gen_traj(const TaskSpec& spec, std::size_t n, Rng& rng);
TaskBatch generate(const TaskSpec& spec, std::size_t n, Rng& rng);

/// Class means on the unit circle at angles 2 pi c / n_classes.
std::vector<std::array<double, 2>> class_means(int n_classes);

/// Periodic Gaussian blur, stride subsample, periodic linear re-interpolation.
Array degrade(const Array& signals, const DegradationSpec& d);

/// Encodes gauss2d features for given classes and anchors (guidance sweeps).
ConditionTokens gauss2d_tokens(const TaskSpec& spec, const std::vector<int>& labels, const Array& anchors);

/// CSV dump: one row per sample with target, condition and feature columns.
std::string dataset_csv(const TaskBatch& batch);

}  // namespace uvg
