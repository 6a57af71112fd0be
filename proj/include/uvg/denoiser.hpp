#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "uvg/autodiff.hpp"
#include "uvg/prediction.hpp"
#include "uvg/rng.hpp"

namespace uvg {

/// Named arrays in a fixed order (the checkpoint manifest order).
class ParameterStore {
 public:
  void add(std::string name, Array value);
  bool contains(const std::string& name) const;
  Array& at(const std::string& name);
  const Array& at(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_[i].first; }
  Array& value(std::size_t i) { return entries_[i].second; }
  const Array& value(std::size_t i) const { return entries_[i].second; }
  std::size_t scalar_count() const;

  /// Same names and shapes, all zeros.
  ParameterStore zeros_like() const;
  bool same_layout(const ParameterStore& other) const;

  bool operator==(const ParameterStore& other) const = default;

 private:
  std::vector<std::pair<std::string, Array>> entries_;
};

/// Projection weights of the multi-condition cross-attention block.
struct McaWeights {
  Array w_q;  // (d_model, d)
  Array b_q;  // (d); zeros when unused
  std::vector<Array> w_k;  // per stream (d_cond, d)
  std::vector<Array> w_v;
  std::size_t d = 0;

  std::size_t streams() const { return w_k.size(); }
  void validate() const;
};

/// F_out = sum_i softmax(Q K_i^T / sqrt(d)) V_i with one shared query row per
/// sample. f_in is (B, d_model); returns (B, d).
Array mca_forward(const McaWeights& w, const Array& f_in, const ConditionTokens& cond);

/// Appends n_new streams whose key/value projections copy stream 0.
McaWeights mca_extend(const McaWeights& w, std::size_t n_new);

/// Records the attention block on a tape. Returns the (B, d) output.
Tape::Var mca_record(Tape& tape, Tape::Var w_q, Tape::Var b_q, const std::vector<Tape::Var>& w_k,
                     const std::vector<Tape::Var>& w_v, std::size_t d, Tape::Var f_in,
                     const ConditionTokens& cond);

/// Sinusoidal embedding of t/N: [sin(a_0..a_{h-1}), cos(a_0..a_{h-1})] with
/// a_i = 1000 (t/N) 10000^(-i/h), h = dim/2.
Array time_embedding(int t, std::size_t dim, int n_steps);

struct ModelConfig {
  std::size_t x_dim = 2;
  std::size_t hidden = 64;
  std::size_t time_dim = 16;
  std::size_t attn_dim = 16;
  std::size_t cond_dim = 8;
  std::vector<std::size_t> tokens_per_stream{4, 4};
  int n_steps = 1000;
  PredictionKind kind = PredictionKind::v;
  bool biased = false;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

class Denoiser;

/// One recorded forward pass. backward() is valid only after a forward was
/// recorded into it.
class Recording {
 public:
  Recording() = default;
  const Array& output() const;
  /// Gradients of sum(output * loss_grad) for every model parameter.
  ParameterStore backward(const Array& loss_grad);
  bool recorded() const { return tape_ != nullptr; }

 private:
  friend class Denoiser;
  std::unique_ptr<Tape> tape_;
  Tape::Var out_;
  std::vector<std::pair<std::string, Tape::Var>> params_;
};

/// Two tanh layers over [x_t, time embedding], one cross-attention block
/// queried by the trunk state, a tanh mixing layer and a linear head.
class Denoiser final : public Predictor {
 public:
  Denoiser(ModelConfig cfg, Rng& rng);
  Denoiser(ModelConfig cfg, ParameterStore params);

  const ModelConfig& config() const { return cfg_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  PredictionKind kind() const override { return cfg_.kind; }
  bool biased() const override { return cfg_.biased; }

  /// Same t for every row. Rows are evaluated in parallel chunks.
  Array predict(const Array& x_t, int t, const ConditionTokens& cond) const override;
  /// Per-row timesteps, no recording.
  Array forward(const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond) const;
  Recording record(const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond) const;

  McaWeights mca_weights() const;
  /// Adds condition streams initialized from stream 0's key/value weights.
  void extend_streams(std::size_t n_new, std::size_t tokens_each);

 private:
  Tape::Var build(Tape& tape, const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond,
                  std::vector<std::pair<std::string, Tape::Var>>* leaves) const;

  ModelConfig cfg_;
  ParameterStore params_;
};

}  // namespace uvg
