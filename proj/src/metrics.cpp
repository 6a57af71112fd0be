#include "uvg/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <iostream>
#include <cmath>
#include <numeric>
#include <vector>

#include "uvg/error.hpp"
#include "uvg/oracle.hpp"

namespace uvg {

namespace {

void check_batches(const Array& a, const Array& b, std::size_t min_rows) {
  if (a.rank() != 2 || b.rank() != 2) throw InvalidArgument("metric batches must be (n, d)");
  if (a.dim(1) != b.dim(1)) throw InvalidArgument("metric batches differ in dimension");
  if (a.dim(0) < min_rows || b.dim(0) < min_rows) {
    throw InvalidArgument("metric needs at least " + std::to_string(min_rows) + " rows per batch");
  }
}

void moments(const Array& x, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd m = to_matrix(x);
  mean = m.colwise().mean().transpose();
  const Eigen::MatrixXd c = m.rowwise() - mean.transpose();
  cov = (c.transpose() * c) / static_cast<double>(m.rows() - 1);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -1e-10) throw NumericError("covariance product is not positive semidefinite");
    w(i) = std::sqrt(std::max(0.0, w(i)));
  }
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

double trace_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w < -1e-10) throw NumericError("covariance product is not positive semidefinite");
    s += std::sqrt(std::max(0.0, w));
  }
  return s;
}

double row_distance(const Array& x, std::size_t i, const Array& y, std::size_t j) {
  const std::size_t d = x.dim(1);
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = x(i, k) - y(j, k);
    s += t * t;
  }
  return std::sqrt(s);
}

// Energy statistic from a pooled distance matrix and a group labelling.
double energy_from_pooled(const std::vector<double>& dist, std::size_t n, const std::vector<int>& group,
                          std::size_t na, std::size_t nb) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = dist[i * n + j];
      if (group[i] != group[j]) {
        xy += v;
      } else if (group[i] == 0) {
        xx += v;
      } else {
        yy += v;
      }
    }
  const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
  return 2.0 * xy / (fa * fb) - 2.0 * xx / (fa * (fa - 1.0)) - 2.0 * yy / (fb * (fb - 1.0));
}

}  // namespace

double frechet_distance(const Array& a, const Array& b) {
  check_batches(a, b, 2);
  if (a.dim(0) < a.dim(1) + 1 || b.dim(0) < b.dim(1) + 1) {
    std::cerr << "warning: frechet_distance with fewer than d+1 rows per batch\n";
  }
  Eigen::VectorXd ma, mb;
  Eigen::MatrixXd ca, cb;
  moments(a, ma, ca);
  moments(b, mb, cb);
  const Eigen::MatrixXd ra = psd_sqrt(ca);
  const double cross = trace_sqrt(ra * cb * ra);
  const double d = (ma - mb).squaredNorm() + ca.trace() + cb.trace() - 2.0 * cross;
  return std::max(0.0, d);
}

double energy_distance(const Array& a, const Array& b) {
  check_batches(a, b, 2);
  const std::size_t na = a.dim(0), nb = b.dim(0);
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) xy += row_distance(a, i, b, j);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = i + 1; j < na; ++j) xx += row_distance(a, i, a, j);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i + 1; j < nb; ++j) yy += row_distance(b, i, b, j);
  const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
  return 2.0 * xy / (fa * fb) - 2.0 * xx / (fa * (fa - 1.0)) - 2.0 * yy / (fb * (fb - 1.0));
}

PermutationResult energy_permutation_test(const Array& a, const Array& b, int shuffles, Rng& rng) {
  check_batches(a, b, 2);
  if (shuffles < 1) throw InvalidArgument("permutation test needs at least one shuffle");
  const std::size_t na = a.dim(0), nb = b.dim(0), n = na + nb;
  std::vector<double> dist(n * n, 0.0);
  auto pooled = [&](std::size_t i) -> std::pair<const Array*, std::size_t> {
    return i < na ? std::pair{&a, i} : std::pair{&b, i - na};
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [xi, ri] = pooled(i);
      const auto [xj, rj] = pooled(j);
      dist[i * n + j] = row_distance(*xi, ri, *xj, rj);
    }
  std::vector<int> group(n, 1);
  std::fill(group.begin(), group.begin() + static_cast<std::ptrdiff_t>(na), 0);

  PermutationResult r;
  r.statistic = energy_from_pooled(dist, n, group, na, nb);
  std::vector<double> null(static_cast<std::size_t>(shuffles));
  int exceed = 0;
  for (int s = 0; s < shuffles; ++s) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(group[i], group[j]);
    }
    null[static_cast<std::size_t>(s)] = energy_from_pooled(dist, n, group, na, nb);
    if (null[static_cast<std::size_t>(s)] >= r.statistic) ++exceed;
  }
  std::sort(null.begin(), null.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * shuffles)) - 1;
  r.threshold = null[std::min(idx, null.size() - 1)];
  r.p_value = (1.0 + exceed) / (1.0 + shuffles);
  return r;
}

double paired_mse(const Array& pred, const Array& truth) {
  require_same_shape(pred, truth, "paired_mse");
  if (pred.rank() != 2 || pred.dim(0) == 0) throw InvalidArgument("paired_mse needs (n, d) batches");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double t = pred[i] - truth[i];
    s += t * t;
  }
  return s / static_cast<double>(pred.size());
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "gauss2d") return TaskKind::gauss2d;
  if (s == "sr1d") return TaskKind::sr1d;
  if (s == "traj") return TaskKind::traj;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::gauss2d: return "gauss2d";
    case TaskKind::sr1d: return "sr1d";
    case TaskKind::traj: return "traj";
  }
  return "?";
}

double first_difference_energy(const Array& batch) {
  if (batch.rank() != 2 || batch.dim(1) < 2 || batch.dim(0) == 0) {
    throw InvalidArgument("first difference needs (n, d>=2) signals");
  }
  const std::size_t n = batch.dim(0), d = batch.dim(1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j < d; ++j) {
      const double t = batch(i, j) - batch(i, j - 1);
      s += t * t;
    }
  return s / static_cast<double>(n * (d - 1));
}

double sharpness_proxy(const Array& batch, TaskKind task) {
  switch (task) {
    case TaskKind::sr1d: return first_difference_energy(batch);
    case TaskKind::traj: {
      // Frames are interleaved (x, y) pairs.
      if (batch.rank() != 2 || batch.dim(1) % 2 || batch.dim(1) < 6) throw InvalidArgument("traj batch must be (n, 2F), F>=3");
      const std::size_t n = batch.dim(0), f = batch.dim(1) / 2;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 1; k + 1 < f; ++k)
          for (std::size_t c = 0; c < 2; ++c) {
            const double acc = batch(i, 2 * (k + 1) + c) - 2.0 * batch(i, 2 * k + c) + batch(i, 2 * (k - 1) + c);
            s += acc * acc;
          }
      return s / static_cast<double>(n * (f - 2) * 2);
    }
    case TaskKind::gauss2d: break;
  }
  throw InvalidArgument("task " + to_string(task) + " defines no sharpness proxy");
}

}  // namespace uvg
