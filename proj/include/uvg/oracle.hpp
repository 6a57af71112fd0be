#pragma once

#include <Eigen/Dense>

#include "uvg/array.hpp"
#include "uvg/bgn.hpp"
#include "uvg/prediction.hpp"
#include "uvg/schedule.hpp"

namespace uvg {

struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  /// Throws InvalidArgument unless cov is symmetric positive definite.
  void validate() const;
};

/// Posterior-mean noise for x0 ~ N(mean, cov):
/// x0_hat = mu + sqrt(ab) cov (ab cov + (1-ab) I)^-1 (x_t - sqrt(ab) mu).
/// Rows of x_t are samples.
Array optimal_x0_prediction(const GaussianSpec& g, const Array& x_t, int t, const NoiseSchedule& s);
Array optimal_eps_prediction(const GaussianSpec& g, const Array& x_t, int t, const NoiseSchedule& s);

/// The exact epsilon' that built v_t from (v^C, v^T, eps).
Array teacher_eps_prime(const PairedSample& pair, const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t);

/// Distribution of the trailing block given the leading `cond_dims` block.
/// The returned covariance is the Schur complement; `gain` maps the
/// centred condition into the conditional mean.
struct GaussianConditional {
  Eigen::VectorXd mean_offset;  // mu_T - gain mu_C
  Eigen::MatrixXd gain;
  Eigen::MatrixXd cov;

  GaussianSpec given(const Eigen::VectorXd& condition) const;
};
GaussianConditional gaussian_conditional_transfer(const GaussianSpec& joint, std::size_t cond_dims);

/// Bayes-optimal denoiser for Gaussian data, ignoring condition tokens.
class GaussianOracle final : public Predictor {
 public:
  GaussianOracle(GaussianSpec g, const NoiseSchedule& s) : g_(std::move(g)), s_(s) { g_.validate(); }
  PredictionKind kind() const override { return PredictionKind::epsilon; }
  Array predict(const Array& x_t, int t, const ConditionTokens& cond) const override;

 private:
  GaussianSpec g_;
  const NoiseSchedule& s_;
};

/// Returns the true forward noise of a fixed (x0, eps) pair.
class ExactEpsTeacher final : public Predictor {
 public:
  explicit ExactEpsTeacher(Array eps) : eps_(std::move(eps)) {}
  PredictionKind kind() const override { return PredictionKind::epsilon; }
  Array predict(const Array& x_t, int t, const ConditionTokens& cond) const override;

 private:
  Array eps_;
};

/// Returns the true epsilon' for hidden (v^C, v^T, eps).
class BiasedNoiseTeacher final : public Predictor {
 public:
  BiasedNoiseTeacher(PairedSample pair, BiasedNoiseSpec spec, const NoiseSchedule& s)
      : pair_(std::move(pair)), spec_(spec), s_(s) {}
  PredictionKind kind() const override { return PredictionKind::epsilon; }
  bool biased() const override { return true; }
  Array predict(const Array& x_t, int t, const ConditionTokens& cond) const override;

 private:
  PairedSample pair_;
  BiasedNoiseSpec spec_;
  const NoiseSchedule& s_;
};

Eigen::MatrixXd to_matrix(const Array& a);
Array from_matrix(const Eigen::MatrixXd& m);

}  // namespace uvg
