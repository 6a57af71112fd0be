#pragma once

#include <string_view>

#include "uvg/array.hpp"
#include "uvg/rng.hpp"

namespace uvg {

/// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2) over rows
/// of two (n, d) batches, unbiased covariances.
double frechet_distance(const Array& a, const Array& b);

/// 2 E|X-Y| - E|X-X'| - E|Y-Y'| with U-statistics for the within terms.
double energy_distance(const Array& a, const Array& b);

struct PermutationResult {
  double statistic = 0.0;
  /// 95th percentile of the statistic under random relabelling.
  double threshold = 0.0;
  double p_value = 1.0;
};

/// Permutation test on the energy distance. Pairwise distances are computed
/// once and reused for every shuffle.
PermutationResult energy_permutation_test(const Array& a, const Array& b, int shuffles, Rng& rng);

/// Mean over rows of squared distance divided by d.
double paired_mse(const Array& pred, const Array& truth);

enum class TaskKind { gauss2d, sr1d, traj };
TaskKind parse_task_kind(std::string_view s);
std::string to_string(TaskKind k);

/// High-frequency energy: mean squared first difference along each row for
/// sr1d, mean squared frame-to-frame acceleration for traj. gauss2d has none.
double sharpness_proxy(const Array& batch, TaskKind task);

/// Mean squared first difference along each row.
double first_difference_energy(const Array& batch);

}  // namespace uvg
