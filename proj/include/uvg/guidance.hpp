#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "uvg/array.hpp"
#include "uvg/prediction.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

/// Per-stream guidance weights. With `plain` set the sampler makes a single
/// conditional pass on the supplied tokens and ignores `weights`; otherwise
/// an empty weight list means unconditional sampling.
struct GuidanceSpec {
  std::vector<std::pair<std::size_t, double>> weights;
  bool plain = false;

  static GuidanceSpec conditional() { return GuidanceSpec{{}, true}; }
  void validate(std::size_t n_streams) const;
};

Array to_x0(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s);
Array to_epsilon(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s);
/// v = sqrt(ab) eps - sqrt(1-ab) x0, built from any kind.
Array to_v(const Array& pred, PredictionKind kind, const Array& x_t, int t, const NoiseSchedule& s);
/// Inverse maps: express (x0, eps) in the requested kind.
Array from_x0_eps(const Array& x0, const Array& eps, PredictionKind kind, int t, const NoiseSchedule& s);

/// uncond + sum_i w_i (cond_i - uncond)
Array combine_cfg(const Array& uncond, const std::vector<std::pair<Array, double>>& conds);

}  // namespace uvg
