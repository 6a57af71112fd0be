#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uvg/array.hpp"

namespace uvg {

/// Output parameterization of a denoiser.
enum class PredictionKind { epsilon, v, x0 };

std::string to_string(PredictionKind k);
PredictionKind parse_prediction_kind(std::string_view s);

/// Condition token streams, each (B, K_i, d_cond). A stream that is not
/// present holds the null encoding: zeros of the same shape.
struct ConditionTokens {
  std::vector<Array> streams;
  std::vector<bool> present;

  ConditionTokens() = default;
  explicit ConditionTokens(std::vector<Array> s);

  std::size_t count() const { return streams.size(); }
  std::size_t batch() const;

  /// Replace stream i by the null encoding.
  void drop(std::size_t i);
  /// Null the given rows of stream i (per-sample dropout).
  void drop_rows(std::size_t i, const std::vector<bool>& rows);

  /// Copy with every stream except `keep` nulled.
  ConditionTokens only(std::size_t keep) const;
  /// Copy with every stream nulled.
  ConditionTokens null() const;
  ConditionTokens with_present(const std::vector<bool>& mask) const;
  ConditionTokens slice_rows(std::size_t begin, std::size_t end) const;
  /// Broadcast a single-row token set to n rows.
  ConditionTokens repeat_rows(std::size_t n) const;
};

/// Anything that maps (x_t, t, tokens) to a prediction: trained networks,
/// analytic oracles and teachers.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionKind kind() const = 0;
  /// True when trained on the biased-noise objective.
  virtual bool biased() const { return false; }
  virtual Array predict(const Array& x_t, int t, const ConditionTokens& cond) const = 0;
};

}  // namespace uvg
