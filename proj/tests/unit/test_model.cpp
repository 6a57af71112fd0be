#include <cmath>

#include "doctest.h"
#include "uvg/bgn.hpp"
#include "uvg/checks.hpp"
#include "uvg/denoiser.hpp"
#include "uvg/error.hpp"
#include "uvg/guidance.hpp"
#include "uvg/oracle.hpp"
#include "uvg/sampler.hpp"

using namespace uvg;

namespace {

const NoiseSchedule& zsnr() {
  static const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
  return s;
}

PairedSample random_pair(std::size_t n, std::size_t d, Rng& rng) {
  return {sample_normal({n, d}, rng), sample_normal({n, d}, rng), sample_normal({n, d}, rng)};
}

ConditionTokens random_tokens(std::size_t b, const std::vector<std::size_t>& k, std::size_t dc, Rng& rng) {
  std::vector<Array> s;
  for (std::size_t kk : k) s.push_back(sample_normal({b, kk, dc}, rng));
  return ConditionTokens(std::move(s));
}

}  // namespace

TEST_SUITE("bgn") {
  TEST_CASE("ramp knots and clamping") {
    const BiasedNoiseSpec spec{600, 990};
    CHECK(bias_ramp(spec, zsnr(), 0) == 0.0);
    CHECK(bias_ramp(spec, zsnr(), 600) == 0.0);
    CHECK(bias_ramp(spec, zsnr(), 795) == doctest::Approx(0.5));
    CHECK(bias_ramp(spec, zsnr(), 990) == 1.0);
    CHECK(bias_ramp(spec, zsnr(), 1000) == 1.0);
    CHECK_THROWS_AS(bias_ramp(BiasedNoiseSpec{700, 700}, zsnr(), 5), InvalidArgument);
    CHECK_THROWS_AS(bias_ramp(BiasedNoiseSpec{0, 1001}, zsnr(), 5), InvalidArgument);
    CHECK_THROWS_AS(bias_ramp(spec, zsnr(), 1001), InvalidArgument);
  }

  TEST_CASE("coefficient is zero at zero signal") {
    CHECK(bias_coefficient(zsnr(), 1000) == 0.0);
    CHECK(bias_coefficient(zsnr(), 500) == doctest::Approx(std::sqrt(snr(zsnr(), 500))));
    CHECK_THROWS_AS(bias_coefficient(zsnr(), 0), NumericError);
  }

  TEST_CASE("biased forward matches the eps' form and the knots") {
    Rng r(5);
    const PairedSample p = random_pair(20, 3, r);
    const BiasedNoiseSpec spec{600, 990};
    for (int t : {1, 600, 700, 900, 990, 999}) {
      const Array ep = biased_noise(spec, zsnr(), p, t);
      const Array direct = axpby(zsnr().signal(t), p.target, zsnr().noise(t), ep);
      CHECK(max_abs_diff(forward_biased(spec, zsnr(), p, t), direct) < 1e-12);
    }
    CHECK(forward_biased(spec, zsnr(), p, 600) == forward_standard(zsnr(), p.target, p.eps, 600));
    CHECK(forward_biased(spec, zsnr(), p, 990) == forward_standard(zsnr(), p.condition, p.eps, 990));
    CHECK(bgn_knot_error(1000, 3) == 0.0);
  }

  TEST_CASE("equal condition and target gives plain noise") {
    Rng r(6);
    PairedSample p = random_pair(10, 4, r);
    p.condition = p.target;
    const BiasedNoiseSpec spec{0, 700};
    for (int t : {1, 350, 700, 1000}) {
      CHECK(biased_noise(spec, zsnr(), p, t) == p.eps);
      CHECK(forward_biased(spec, zsnr(), p, t) == forward_standard(zsnr(), p.target, p.eps, t));
    }
  }

  TEST_CASE("shape mismatch is rejected") {
    Rng r(7);
    PairedSample p = random_pair(4, 3, r);
    p.condition = Array({4, 2});
    CHECK_THROWS_AS(forward_biased(BiasedNoiseSpec{}, zsnr(), p, 10), InvalidArgument);
  }
}

TEST_SUITE("nn") {
  TEST_CASE("time embedding layout") {
    const Array e = time_embedding(0, 8, 1000);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(e[i] == 0.0);
      CHECK(e[4 + i] == 1.0);
    }
    const Array f = time_embedding(500, 4, 1000);
    CHECK(f[0] == doctest::Approx(std::sin(500.0)).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(std::sin(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(time_embedding(1, 3, 1000), InvalidArgument);
    CHECK_THROWS_AS(time_embedding(1001, 4, 1000), InvalidArgument);
  }

  TEST_CASE("mirrored stream doubles the attention output exactly") {
    Rng r(8);
    McaWeights w{sample_normal({5, 4}, r), Array({4}), {sample_normal({3, 4}, r)}, {sample_normal({3, 4}, r)}, 4};
    const Array f = sample_normal({6, 5}, r);
    const ConditionTokens one = random_tokens(6, {3}, 3, r);
    const McaWeights w2 = mca_extend(w, 1);
    const ConditionTokens two({one.streams[0], one.streams[0]});
    CHECK(mca_forward(w2, f, two) == 2.0 * mca_forward(w, f, one));
  }

  TEST_CASE("null stream still contributes its uniform attention term") {
    Rng r(9);
    McaWeights w{sample_normal({5, 4}, r), Array({4}), {sample_normal({3, 4}, r), sample_normal({3, 4}, r)},
                 {sample_normal({3, 4}, r), sample_normal({3, 4}, r)}, 4};
    const Array f = sample_normal({2, 5}, r);
    ConditionTokens c = random_tokens(2, {3, 2}, 3, r);
    c.drop(1);
    // Zero tokens give zero values, so the dropped stream adds nothing.
    McaWeights w1{w.w_q, w.b_q, {w.w_k[0]}, {w.w_v[0]}, 4};
    CHECK(max_abs_diff(mca_forward(w, f, c), mca_forward(w1, f, ConditionTokens({c.streams[0]}))) < 1e-15);
    CHECK_THROWS_AS(mca_forward(w1, f, c), InvalidArgument);
  }

  TEST_CASE("denoiser gradients match finite differences") {
    ModelConfig cfg;
    cfg.hidden = 12;
    cfg.time_dim = 6;
    cfg.attn_dim = 5;
    cfg.cond_dim = 4;
    cfg.tokens_per_stream = {3, 2};
    CHECK(gradient_check(cfg, 1) < 1e-6);
    cfg.tokens_per_stream = {4};
    cfg.kind = PredictionKind::epsilon;
    CHECK(gradient_check(cfg, 2) < 1e-6);
  }

  TEST_CASE("predict agrees with the recorded forward") {
    ModelConfig cfg;
    cfg.hidden = 8;
    cfg.tokens_per_stream = {2, 3};
    Rng r(10);
    const Denoiser m(cfg, r);
    const Array x = sample_normal({200, 2}, r);
    const ConditionTokens c = random_tokens(200, {2, 3}, cfg.cond_dim, r);
    const Recording rec = m.record(x, std::vector<int>(200, 321), c);
    CHECK(max_abs_diff(m.predict(x, 321, c), rec.output()) < 1e-13);
    Recording empty;
    CHECK_THROWS_AS(empty.backward(Array({1})), StateError);
  }

  TEST_CASE("extend_streams keeps parameters and adds copies") {
    ModelConfig cfg;
    cfg.tokens_per_stream = {4};
    Rng r(11);
    Denoiser m(cfg, r);
    const McaWeights before = m.mca_weights();
    m.extend_streams(1, 4);
    const McaWeights after = m.mca_weights();
    REQUIRE(after.streams() == 2);
    CHECK(after.w_k[1] == before.w_k[0]);
    CHECK(after.w_v[1] == before.w_v[0]);
    CHECK(m.config().tokens_per_stream.size() == 2);
  }
}

TEST_SUITE("guidance") {
  TEST_CASE("prediction space round trips") {
    Rng r(12);
    const Array x0 = sample_normal({8, 3}, r), eps = sample_normal({8, 3}, r);
    const NoiseSchedule lin = make_linear_schedule(1000, 1e-4, 2e-2);
    // Near zero signal the eps -> x0 inversion scales rounding by 1/sqrt(alpha_bar).
    for (auto [s, t, tol] : {std::tuple{&lin, 1, 1e-12}, std::tuple{&lin, 250, 1e-12}, std::tuple{&lin, 1000, 1e-12},
                             std::tuple{&zsnr(), 999, 1e-10}}) {
      const Array xt = forward_standard(*s, x0, eps, t);
      for (auto k : {PredictionKind::epsilon, PredictionKind::v, PredictionKind::x0}) {
        const Array p = from_x0_eps(x0, eps, k, t, *s);
        CHECK(max_abs_diff(to_x0(p, k, xt, t, *s), x0) < tol);
        CHECK(max_abs_diff(to_epsilon(p, k, xt, t, *s), eps) < tol);
        CHECK(max_abs_diff(to_v(p, k, xt, t, *s), from_x0_eps(x0, eps, PredictionKind::v, t, *s)) < tol);
      }
    }
  }

  TEST_CASE("epsilon at zero signal has no x0") {
    const Array x({1, 2}, {0.3, -0.2});
    CHECK_THROWS_AS(to_x0(x, PredictionKind::epsilon, x, 1000, zsnr()), NumericError);
    const StepEstimate e = estimate(x, PredictionKind::epsilon, x, 1000, zsnr());
    CHECK(e.x0 == Array({1, 2}));
    CHECK(e.eps == x);
  }

  TEST_CASE("cfg combination") {
    const Array u({2}, {1, 2}), a({2}, {3, 2}), b({2}, {1, 6});
    CHECK(combine_cfg(u, {}) == u);
    CHECK(combine_cfg(u, {{a, 1.0}}) == a);
    CHECK(combine_cfg(u, {{a, 2.0}, {b, 0.5}}) == Array({2}, {5.0, 4.0}));
    CHECK_THROWS_AS((GuidanceSpec{{{2, 1.0}}}.validate(2)), InvalidArgument);
    CHECK_THROWS_AS((GuidanceSpec{{{0, NAN}}}.validate(2)), InvalidArgument);
  }
}

TEST_SUITE("sampler") {
  TEST_CASE("grid endpoints and partial starts") {
    SamplerConfig sc;
    const auto g = timestep_grid(sc, 1000);
    CHECK(g.size() == 50);
    CHECK(g.front() == 1000);
    CHECK(g.back() == 1);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
    sc.start_fraction = 0.7;
    sc.steps = 35;
    CHECK(start_timestep(sc, 1000) == 700);
    CHECK(timestep_grid(sc, 1000).front() == 700);
    sc.steps = 701;
    CHECK_THROWS_AS(timestep_grid(sc, 1000), InvalidArgument);
    sc = SamplerConfig{};
    sc.start_fraction = 0.0;
    CHECK_THROWS_AS(sc.validate(1000), InvalidArgument);
    CHECK_THROWS_AS(parse_sampler_kind("heun"), InvalidArgument);
    CHECK(parse_bgn_stepper("plain") == BgnStepper::plain);
  }

  TEST_CASE("full grid with the exact teacher recovers data") {
    Rng r(13);
    const Array x0 = sample_normal({16, 3}, r);
    const NoiseSchedule s = make_linear_schedule(1000, 1e-4, 2e-2);
    SamplerConfig sc;
    sc.start_fraction = 0.7;
    sc.steps = 700;
    // Editing noises init with rng; replay the same draw for the teacher.
    Rng a(21), b(21);
    const ExactEpsTeacher teacher(sample_normal({16, 3}, b));
    const Array out = editing_baseline(teacher, x0, ConditionTokens({Array({16, 1, 1})}), GuidanceSpec::conditional(),
                                       sc, s, a);
    CHECK(max_abs_diff(out, x0) < 1e-8);
  }

  TEST_CASE("plain bgn stepper from t = N matches plain sampling") {
    const NoiseSchedule& s = zsnr();
    GaussianSpec g{Eigen::Vector2d(0.5, -1.0), Eigen::Matrix2d{{1.0, 0.3}, {0.3, 0.5}}};
    const GaussianOracle model(g, s);
    Rng r(14);
    const ConditionTokens c({Array({64, 1, 1})});
    const SamplerConfig sc;
    Rng a(3), b(3);
    const Array std_out = sample(model, c, GuidanceSpec::conditional(), sc, s, std::nullopt, a, 2);
    // The noised condition carries no signal at t = N.
    const Array bgn_out = sample_bgn(model, sample_normal({64, 2}, r), c, BiasedNoiseSpec{600, 990},
                                     GuidanceSpec::conditional(), sc, s, b, BgnStepper::plain);
    CHECK(bgn_out == std_out);
  }

  TEST_CASE("bridge stepper with the exact eps' teacher lands on the target") {
    const NoiseSchedule& s = zsnr();
    Rng r(16);
    const PairedSample p = random_pair(32, 3, r);
    const BiasedNoiseSpec spec{0, 700};
    SamplerConfig sc;
    sc.start_fraction = 0.7;
    sc.steps = 35;
    // The teacher's eps must be the draw the sampler makes for its start state.
    Rng a(4), b(4);
    PairedSample q = p;
    q.eps = sample_normal({32, 3}, b);
    const BiasedNoiseTeacher exact(q, spec, s);
    const Array out = sample_bgn(exact, p.condition, ConditionTokens({Array({32, 1, 1})}), spec,
                                 GuidanceSpec::conditional(), sc, s, a, BgnStepper::bridge);
    CHECK(max_abs_diff(out, p.target) < 1e-9);
  }

  TEST_CASE("bgn sampler starts from the noised condition") {
    struct Spy final : Predictor {
      mutable std::vector<std::pair<int, Array>> seen;
      PredictionKind kind() const override { return PredictionKind::epsilon; }
      bool biased() const override { return true; }
      Array predict(const Array& x, int t, const ConditionTokens&) const override {
        seen.emplace_back(t, x);
        return Array(x.shape());
      }
    };
    const NoiseSchedule& s = zsnr();
    Rng r(18);
    const Array vc = sample_normal({8, 3}, r);
    SamplerConfig sc;
    sc.start_fraction = 0.7;
    sc.steps = 35;
    for (auto st : {BgnStepper::plain, BgnStepper::bridge}) {
      Spy spy;
      Rng a(6), b(6);
      sample_bgn(spy, vc, ConditionTokens({Array({8, 1, 1})}), BiasedNoiseSpec{0, 700}, GuidanceSpec::conditional(), sc,
                 s, a, st);
      REQUIRE(!spy.seen.empty());
      CHECK(spy.seen.front().first == 700);
      CHECK(spy.seen.front().second == forward_standard(s, vc, sample_normal({8, 3}, b), 700));
    }
  }

  TEST_CASE("bgn sampler preconditions") {
    const NoiseSchedule& s = zsnr();
    GaussianSpec g{Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity()};
    const GaussianOracle model(g, s);
    Rng r(15);
    SamplerConfig sc;
    sc.kind = SamplerKind::ancestral;
    const ConditionTokens c({Array({4, 1, 1})});
    CHECK_THROWS_AS(sample_bgn(model, Array({4, 2}), c, BiasedNoiseSpec{}, GuidanceSpec::conditional(), sc, s, r),
                    InvalidArgument);
    sc.kind = SamplerKind::deterministic;
    CHECK_THROWS_AS(sample_bgn(model, Array({3, 2}), c, BiasedNoiseSpec{}, GuidanceSpec::conditional(), sc, s, r),
                    InvalidArgument);
  }

  TEST_CASE("gaussian oracle through the sampler follows the affine sampler law") {
    const GaussianSamplingResult res = gaussian_sampling_check(zsnr(), 50, 10000, 17);
    CHECK(res.mean_error_se < 4.0);
    CHECK(res.mean_vs_predicted_se < 4.0);
    CHECK(res.trace_vs_predicted_se < 4.0);
    CHECK(res.trace_rel_error == doctest::Approx(res.predicted_trace_rel_error).epsilon(0.5));
  }
}
