#include "uvg/oracle.hpp"

#include <cmath>

#include "uvg/error.hpp"

namespace uvg {

Eigen::MatrixXd to_matrix(const Array& a) {
  if (a.rank() != 2) throw InvalidArgument("expected a 2-D array, got " + shape_string(a.shape()));
  Eigen::MatrixXd m(a.dim(0), a.dim(1));
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) m(i, j) = a(i, j);
  return m;
}

Array from_matrix(const Eigen::MatrixXd& m) {
  Array a({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

void GaussianSpec::validate() const {
  if (cov.rows() != mean.size() || cov.cols() != mean.size() || mean.size() == 0) {
    throw InvalidArgument("Gaussian mean/covariance dimensions disagree");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
}

Array optimal_x0_prediction(const GaussianSpec& g, const Array& x_t, int t, const NoiseSchedule& s) {
  const Eigen::Index d = g.mean.size();
  if (x_t.rank() != 2 || x_t.dim(1) != static_cast<std::size_t>(d)) throw InvalidArgument("oracle input has wrong shape");
  const double ab = s.alpha_bar(t), a = s.signal(t);
  const Eigen::MatrixXd m = ab * g.cov + (1.0 - ab) * Eigen::MatrixXd::Identity(d, d);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (std::abs(lu.determinant()) < 1e-300) throw NumericError("oracle posterior system is singular");
  const Eigen::MatrixXd gain = a * g.cov * lu.inverse();
  const Eigen::MatrixXd x = to_matrix(x_t);
  const Eigen::MatrixXd centred = x.rowwise() - (a * g.mean).transpose();
  const Eigen::MatrixXd x0 = (centred * gain.transpose()).rowwise() + g.mean.transpose();
  return from_matrix(x0);
}

Array optimal_eps_prediction(const GaussianSpec& g, const Array& x_t, int t, const NoiseSchedule& s) {
  const double a = s.signal(t), b = s.noise(t);
  if (b == 0.0) throw NumericError("noise prediction undefined at alpha_bar = 1");
  const Array x0 = optimal_x0_prediction(g, x_t, t, s);
  Array out(x_t.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x_t[i] - a * x0[i]) / b;
  return out;
}

Array teacher_eps_prime(const PairedSample& pair, const BiasedNoiseSpec& spec, const NoiseSchedule& s, int t) {
  require_same_shape(pair.target, pair.eps, "teacher");
  require_same_shape(pair.condition, pair.eps, "teacher");
  s.check_timestep(t, 0);
  double lam;
  if (t < spec.t_m) {
    lam = 0.0;
  } else if (t >= spec.t_n) {
    lam = 1.0;
  } else {
    lam = static_cast<double>(t - spec.t_m) / static_cast<double>(spec.t_n - spec.t_m);
  }
  Array out = pair.eps;
  if (lam == 0.0) return out;
  const double ab = s.alpha_bar(t);
  const double coef = ab == 0.0 ? 0.0 : std::sqrt(ab) / std::sqrt(1.0 - ab);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pair.eps[i] + (lam * coef) * (pair.condition[i] - pair.target[i]);
  return out;
}

GaussianSpec GaussianConditional::given(const Eigen::VectorXd& condition) const {
  return GaussianSpec{mean_offset + gain * condition, cov};
}

GaussianConditional gaussian_conditional_transfer(const GaussianSpec& joint, std::size_t cond_dims) {
  const Eigen::Index n = joint.mean.size(), c = static_cast<Eigen::Index>(cond_dims);
  if (c <= 0 || c >= n) throw InvalidArgument("condition block must be a proper, non-empty prefix");
  const Eigen::MatrixXd scc = joint.cov.topLeftCorner(c, c);
  const Eigen::MatrixXd stc = joint.cov.bottomLeftCorner(n - c, c);
  const Eigen::MatrixXd stt = joint.cov.bottomRightCorner(n - c, n - c);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scc);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
    throw NumericError("condition block covariance is singular");
  }
  GaussianConditional out;
  out.gain = ldlt.solve(stc.transpose()).transpose();
  out.mean_offset = joint.mean.tail(n - c) - out.gain * joint.mean.head(c);
  Eigen::MatrixXd cov = stt - out.gain * stc.transpose();
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

Array GaussianOracle::predict(const Array& x_t, int t, const ConditionTokens&) const {
  return optimal_eps_prediction(g_, x_t, t, s_);
}

Array ExactEpsTeacher::predict(const Array& x_t, int, const ConditionTokens&) const {
  require_same_shape(x_t, eps_, "teacher");
  return eps_;
}

Array BiasedNoiseTeacher::predict(const Array& x_t, int t, const ConditionTokens&) const {
  require_same_shape(x_t, pair_.eps, "teacher");
  return teacher_eps_prime(pair_, spec_, s_, t);
}

}  // namespace uvg
