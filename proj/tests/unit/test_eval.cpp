#include <cmath>

#include <Eigen/QR>

#include "doctest.h"
#include "uvg/data.hpp"
#include "uvg/error.hpp"
#include "uvg/metrics.hpp"
#include "uvg/oracle.hpp"

using namespace uvg;

namespace {

GaussianSpec joint4() {
  Eigen::MatrixXd a(4, 4);
  a << 1.0, 0.2, -0.3, 0.1, 0.4, 0.9, 0.0, -0.2, 0.1, 0.3, 1.1, 0.5, -0.2, 0.0, 0.4, 0.8;
  return {Eigen::Vector4d(0.2, -0.1, 0.5, 1.0), a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(4, 4)};
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("spd validation") {
    GaussianSpec g{Eigen::Vector2d(0, 0), Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}}};
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g.cov = Eigen::Matrix2d{{1.0, 0.1}, {0.0, 1.0}};
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
  }

  TEST_CASE("posterior mean at the extremes") {
    const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
    const GaussianSpec g = joint4();
    Rng r(1);
    const Array xt = sample_normal({5, 4}, r);
    // Zero signal: the best guess is the prior mean.
    const Array at_n = optimal_x0_prediction(g, xt, 1000, s);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(at_n(i, j) == doctest::Approx(g.mean(j)).epsilon(1e-12));
    // x0 and eps predictions are consistent with x_t.
    const Array x0 = optimal_x0_prediction(g, xt, 300, s), eps = optimal_eps_prediction(g, xt, 300, s);
    CHECK(max_abs_diff(axpby(s.signal(300), x0, s.noise(300), eps), xt) < 1e-12);
  }

  TEST_CASE("transfer is the Schur complement") {
    const GaussianSpec g = joint4();
    const GaussianConditional c = gaussian_conditional_transfer(g, 2);
    const Eigen::MatrixXd s11 = g.cov.topLeftCorner(2, 2), s12 = g.cov.topRightCorner(2, 2);
    const Eigen::MatrixXd s22 = g.cov.bottomRightCorner(2, 2);
    CHECK((c.cov - (s22 - s12.transpose() * s11.inverse() * s12)).norm() < 1e-12);
    const GaussianSpec at_mean = c.given(g.mean.head(2));
    CHECK((at_mean.mean - g.mean.tail(2)).norm() < 1e-12);
    CHECK_THROWS_AS(gaussian_conditional_transfer(g, 4), InvalidArgument);
  }

  TEST_CASE("eps' teacher rebuilds the biased state") {
    const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
    Rng r(2);
    const PairedSample p{sample_normal({6, 3}, r), sample_normal({6, 3}, r), sample_normal({6, 3}, r)};
    const BiasedNoiseSpec spec{600, 990};
    for (int t : {300, 650, 800, 995}) {
      const Array ep = teacher_eps_prime(p, spec, s, t);
      CHECK(max_abs_diff(axpby(s.signal(t), p.target, s.noise(t), ep), forward_biased(spec, s, p, t)) < 1e-12);
    }
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("frechet basics") {
    Rng r(3);
    const Array a = sample_normal({500, 3}, r);
    CHECK(std::abs(frechet_distance(a, a)) < 1e-8);
    Array b = a;
    for (std::size_t i = 0; i < b.dim(0); ++i) b(i, 0) += 2.0;
    CHECK(frechet_distance(a, b) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK_THROWS_AS(frechet_distance(a, Array({10, 2})), InvalidArgument);
  }

  TEST_CASE("frechet is rotation invariant") {
    Rng r(4);
    const Array a = sample_normal({300, 4}, r), b0 = sample_normal({200, 4}, r);
    Array b = b0;
    for (std::size_t i = 0; i < b.dim(0); ++i) b(i, 1) = 0.5 * b(i, 1) + b(i, 0);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Random(4, 4));
    const Eigen::MatrixXd q = qr.householderQ();
    const double before = frechet_distance(a, b);
    const double after = frechet_distance(from_matrix(to_matrix(a) * q), from_matrix(to_matrix(b) * q));
    CHECK(std::abs(before - after) < 1e-8);
  }

  TEST_CASE("energy distance closed forms") {
    const Array p({3, 2}, {0, 0, 0, 0, 0, 0}), q({3, 2}, {2, 0, 2, 0, 2, 0});
    CHECK(energy_distance(p, q) == doctest::Approx(4.0));
    Array shifted = p;
    for (std::size_t i = 0; i < 3; ++i) shifted(i, 1) = -1.5;
    CHECK(energy_distance(p, shifted) == doctest::Approx(3.0));
    Rng r(5);
    const Array a = sample_normal({40, 2}, r), b = sample_normal({30, 2}, r);
    CHECK(std::abs(energy_distance(a, b) - energy_distance(b, a)) < 1e-12);
  }

  TEST_CASE("energy permutation band holds for equal laws") {
    Rng r(6);
    const Array a = sample_normal({1000, 2}, r), b = sample_normal({1000, 2}, r);
    Rng perm(7);
    const PermutationResult res = energy_permutation_test(a, b, 200, perm);
    CHECK(res.statistic <= res.threshold);
    Array c = b;
    for (std::size_t i = 0; i < c.dim(0); ++i) c(i, 0) += 0.3;
    Rng perm2(7);
    CHECK(energy_permutation_test(a, c, 200, perm2).p_value < 0.01);
  }

  TEST_CASE("paired mse and sharpness") {
    const Array a({2, 3}, {0, 0, 0, 1, 1, 1}), b({2, 3}, {1, 1, 1, 2, 2, 2});
    CHECK(paired_mse(a, a) == 0.0);
    CHECK(paired_mse(a, b) == 1.0);
    CHECK_THROWS_AS(paired_mse(a, Array({3, 2})), InvalidArgument);
    Array alt({1, 16});
    for (std::size_t i = 0; i < 16; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
    CHECK(sharpness_proxy(alt, TaskKind::sr1d) == 4.0);
    CHECK(sharpness_proxy(Array({3, 16}, 0.7), TaskKind::sr1d) == 0.0);
    CHECK_THROWS_AS(sharpness_proxy(a, TaskKind::gauss2d), InvalidArgument);
    Array line({1, 16});
    for (std::size_t f = 0; f < 8; ++f) line[2 * f] = 0.3 * static_cast<double>(f);
    CHECK(sharpness_proxy(line, TaskKind::traj) < 1e-28);
  }
}

TEST_SUITE("data") {
  TEST_CASE("generators are deterministic") {
    for (auto k : {TaskKind::gauss2d, TaskKind::sr1d, TaskKind::traj}) {
      const TaskSpec spec = default_task(k);
      Rng a(8), b(8);
      const TaskBatch x = generate(spec, 50, a), y = generate(spec, 50, b);
      CHECK(x.target == y.target);
      CHECK(x.condition == y.condition);
      CHECK(x.tokens.streams == y.tokens.streams);
      CHECK(x.target.dim(1) == spec.dims);
    }
  }

  TEST_CASE("real encodings differ from the null encoding") {
    const TaskSpec spec = default_task(TaskKind::gauss2d);
    Array anchors({1, 2});
    const ConditionTokens c = gauss2d_tokens(spec, {0}, anchors);
    const ConditionTokens n = c.null();
    for (std::size_t i = 0; i < c.count(); ++i) CHECK(max_abs_diff(c.streams[i], n.streams[i]) > 0.0);
    CHECK_THROWS_AS(gauss2d_tokens(spec, {4}, anchors), InvalidArgument);
  }

  TEST_CASE("degradation is periodic and removes high frequencies") {
    const DegradationSpec d;
    Array c({1, 16}, 2.5);
    CHECK(max_abs_diff(degrade(c, d), c) < 1e-12);
    Rng r(9);
    const TaskBatch b = gen_sr1d(default_task(TaskKind::sr1d), 500, r);
    CHECK(sharpness_proxy(b.target, TaskKind::sr1d) > sharpness_proxy(b.condition, TaskKind::sr1d));
    CHECK_THROWS_AS(degrade(c, DegradationSpec{4, 1.0, 2}), InvalidArgument);
    CHECK_THROWS_AS(degrade(c, DegradationSpec{5, 1.0, 3}), InvalidArgument);
  }

  TEST_CASE("traj condition repeats the first frame") {
    Rng r(10);
    const TaskBatch b = gen_traj(default_task(TaskKind::traj), 20, r);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t f = 0; f < 8; ++f) {
        CHECK(b.condition(i, 2 * f) == b.target(i, 0));
        CHECK(b.condition(i, 2 * f + 1) == b.target(i, 1));
      }
  }

  TEST_CASE("spec validation") {
    TaskSpec s = default_task(TaskKind::gauss2d);
    s.dims = 3;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = default_task(TaskKind::sr1d);
    s.high_mode = 9;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
  }
}
