#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "uvg/checkpoint.hpp"
#include "uvg/config.hpp"
#include "uvg/error.hpp"
#include "uvg/experiments.hpp"
#include "uvg/train.hpp"

using namespace uvg;
namespace fs = std::filesystem;

namespace {

const NoiseSchedule& zsnr() {
  static const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
  return s;
}

TrainConfig small(TrainTarget target) {
  TrainConfig c;
  c.batch_size = 16;
  c.n_iterations = 6;
  c.eval_every = 3;
  c.target = target;
  if (is_biased(target)) c.bgn = BiasedNoiseSpec{0, 700};
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uvg_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("adam first step moves each weight by about lr") {
    ParameterStore p;
    p.add("w", Array({3}, {1.0, -2.0, 0.5}));
    ParameterStore g = p.zeros_like();
    g.at("w") = Array({3}, {0.3, -4.0, 1e-3});
    AdamState st = adam_init(p);
    adam_update(p, g, st, 0.01);
    CHECK(st.step == 1);
    CHECK(p.at("w")[0] == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(p.at("w")[1] == doctest::Approx(-1.99).epsilon(1e-6));
    ParameterStore other;
    other.add("u", Array({3}));
    CHECK_THROWS_AS(adam_update(p, other, st, 0.01), InvalidArgument);
  }

  TEST_CASE("equal pairs make biased training identical to standard training") {
    const TaskSpec task = default_task(TaskKind::sr1d);
    for (auto [plain, biased] : {std::pair{TrainTarget::epsilon, TrainTarget::epsilon_prime},
                                 std::pair{TrainTarget::v, TrainTarget::v_prime}}) {
      const TrainConfig a = small(plain), b = small(biased);
      Rng ia(1), ib(1);
      Denoiser ma(model_config_for(task, a, 1000), ia), mb(model_config_for(task, b, 1000), ib);
      AdamState sa = adam_init(ma.params()), sb = adam_init(mb.params());
      Rng da(2), na(3), db(2), nb(3);
      for (int i = 0; i < 5; ++i) {
        const TaskBatch x = generate(task, 16, da), y = generate(task, 16, db);
        const double la = train_step(ma, TrainBatch{x.target, x.target, x.tokens}, a, zsnr(), sa, na);
        const double lb = train_step(mb, TrainBatch{y.target, y.target, y.tokens}, b, zsnr(), sb, nb);
        CHECK(la == lb);
      }
      CHECK(ma.params() == mb.params());
    }
  }

  TEST_CASE("resume continues bit for bit") {
    const TaskSpec task = default_task(TaskKind::gauss2d);
    const TrainConfig cfg = small(TrainTarget::v);
    const TrainResult full = train_run(cfg, task, zsnr());
    std::optional<ResumePoint> mid;
    const CheckpointHook grab = [&](const Denoiser& m, const AdamState& a, const TrainState& st) {
      if (st.iteration == 3) mid = ResumePoint{m, a, st};
    };
    train_run(cfg, task, zsnr(), {}, grab);
    REQUIRE(mid);
    const TrainResult resumed = train_run(cfg, task, zsnr(), {}, {}, mid);
    CHECK(resumed.model.params() == full.model.params());
    CHECK(resumed.state.iteration == 6);
  }

  TEST_CASE("config rejects bad combinations") {
    TrainConfig c = small(TrainTarget::epsilon_prime);
    c.bgn.reset();
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small(TrainTarget::v);
    c.text_dropout = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK_THROWS_AS(train_run(small(TrainTarget::v_prime), default_task(TaskKind::gauss2d), zsnr()), InvalidArgument);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip keeps every byte of state") {
    Rng r(4);
    ModelConfig mc;
    mc.tokens_per_stream = {4, 2};
    const Denoiser m(mc, r);
    Checkpoint c{mc, m.params(), m.params().zeros_like(), {{"iteration", "7"}}};
    const fs::path dir = scratch("ckpt");
    write_checkpoint((dir / "a.uvgl").string(), c);
    const Checkpoint back = read_checkpoint((dir / "a.uvgl").string());
    CHECK(back.config == mc);
    CHECK(back.params == c.params);
    CHECK(back.extra == c.extra);
    CHECK(back.meta == c.meta);
  }

  TEST_CASE("missing and corrupt files are reported") {
    const fs::path dir = scratch("ckpt_bad");
    CHECK_THROWS_AS(read_checkpoint((dir / "none.uvgl").string()), MissingArtifact);
    std::ofstream((dir / "junk.uvgl").string()) << "UVGL garbage";
    CHECK_THROWS_AS(read_checkpoint((dir / "junk.uvgl").string()), MissingArtifact);
    Rng r(5);
    const Denoiser m(ModelConfig{}, r);
    write_checkpoint((dir / "cut.uvgl").string(), Checkpoint{m.config(), m.params(), {}, {}});
    fs::resize_file(dir / "cut.uvgl", fs::file_size(dir / "cut.uvgl") - 8);
    CHECK_THROWS_AS(read_checkpoint((dir / "cut.uvgl").string()), MissingArtifact);
  }
}

TEST_SUITE("config") {
  TEST_CASE("parsing") {
    const Config c = Config::parse("# comment\ntask.kind = sr1d  # trailing\n\ntrain.seed=4\n");
    CHECK(c.get("task.kind") == "sr1d");
    CHECK(c.get_int("train.seed") == 4);
    CHECK(c.get_double("train.learning_rate") == 0.001);
    CHECK_THROWS_AS(Config::parse("nope = 1"), ConfigError);
    CHECK_THROWS_AS(Config::parse("task.kind sr1d"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/x.cfg"), ConfigError);
    CHECK_THROWS_AS(Config::parse("train.seed = 1.5").get_int("train.seed"), ConfigError);
  }

  TEST_CASE("task dependent defaults resolve") {
    const Experiment sr = resolve_experiment(Config::parse("task.kind = sr1d"));
    CHECK(sr.bgn.t_m == 0);
    CHECK(sr.bgn.t_n == 700);
    CHECK(sr.task.dims == 16);
    const Experiment tr = resolve_experiment(Config::parse("task.kind = traj"));
    CHECK(tr.bgn.t_m == 600);
    CHECK(tr.bgn.t_n == 990);
    CHECK(tr.bgn_t_start == 1000);
    CHECK_THROWS_AS(resolve_experiment(Config::parse("task.kind = cube")), ConfigError);
    CHECK_THROWS_AS(resolve_experiment(Config::parse("task.kind = sr1d\nbgn.t_m = 800")), ConfigError);
  }

  TEST_CASE("resolved text reloads to the same experiment") {
    const Experiment a = resolve_experiment(Config::parse("task.kind = traj\ntrain.seed = 9\nguidance.w_text = 2"));
    const Experiment b = resolve_experiment(Config::parse(a.resolved_text()));
    CHECK(a.resolved_text() == b.resolved_text());
  }
}
