#include "uvg/experiments.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "uvg/csv.hpp"
#include "uvg/error.hpp"
#include "uvg/metrics.hpp"
#include "uvg/oracle.hpp"

namespace uvg {

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + " must list at least one value");
  return out;
}

template <class F>
auto config_guard(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const NumericError& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const StateError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

GuidanceSpec Experiment::guidance() const {
  GuidanceSpec g;
  g.weights.emplace_back(0, w_text);
  if (task.stream_features().size() > 1) g.weights.emplace_back(1, w_image);
  return g;
}

Experiment resolve_experiment(const Config& cfg) {
  Experiment ex;
  ex.beta_start = cfg.get_double("schedule.beta_start");
  ex.beta_end = cfg.get_double("schedule.beta_end");
  ex.schedule = config_guard("schedule", [&] {
    NoiseSchedule s = make_linear_schedule(static_cast<int>(cfg.get_int("schedule.n_steps")), ex.beta_start, ex.beta_end);
    return cfg.get_bool("schedule.zero_terminal_snr") ? rescale_zero_terminal_snr(s) : s;
  });
  const int n = ex.schedule.n_steps();

  TaskSpec& t = ex.task;
  t = config_guard("task", [&] { return default_task(parse_task_kind(cfg.get("task.kind"))); });
  t.dims = static_cast<std::size_t>(parse_int("task.dims", cfg.get_or("task.dims", std::to_string(t.dims))));
  t.n_classes = static_cast<int>(cfg.get_int("task.n_classes"));
  t.seed = static_cast<std::uint64_t>(cfg.get_int("task.seed"));
  t.tokens_per_stream = static_cast<std::size_t>(cfg.get_int("task.tokens_per_stream"));
  t.token_dim = static_cast<std::size_t>(cfg.get_int("task.token_dim"));
  t.degradation.blur_width = static_cast<int>(cfg.get_int("task.blur_width"));
  t.degradation.blur_sigma = cfg.get_double("task.blur_sigma");
  t.degradation.downsample_stride = static_cast<int>(cfg.get_int("task.downsample_stride"));
  t.amplitude = cfg.get_double("task.amplitude");
  t.high_mode = static_cast<int>(cfg.get_int("task.high_mode"));
  t.start_scale = cfg.get_double("task.start_scale");
  t.velocity_scale = cfg.get_double("task.velocity_scale");
  t.jitter = cfg.get_double("task.jitter");
  config_guard("task", [&] {
    t.validate();
    return 0;
  });
  const long eval_samples = cfg.get_int("task.eval_samples");
  if (eval_samples < 2) throw ConfigError("task.eval_samples must be >= 2");
  ex.eval_samples = static_cast<std::size_t>(eval_samples);
  ex.eval_seed = static_cast<std::uint64_t>(cfg.get_int("task.eval_seed"));

  TrainConfig& tr = ex.train;
  tr.learning_rate = cfg.get_double("train.learning_rate");
  const long batch = cfg.get_int("train.batch_size");
  if (batch < 1) throw ConfigError("train.batch_size must be positive");
  tr.batch_size = static_cast<std::size_t>(batch);
  tr.n_iterations = static_cast<int>(cfg.get_int("train.n_iterations"));
  tr.text_dropout = cfg.get_double("train.text_dropout");
  tr.image_dropout = cfg.get_double("train.image_dropout");
  tr.target = config_guard("train.prediction_kind", [&] { return parse_train_target(cfg.get("train.prediction_kind")); });
  if (is_biased(tr.target)) {
    throw ConfigError("train.prediction_kind must be epsilon, v or x0; biased kinds go in train.bgn_prediction_kind");
  }
  tr.offset_noise.strength = cfg.get_double("train.offset_noise");
  tr.eval_every = static_cast<int>(cfg.get_int("train.eval_every"));
  tr.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed"));
  config_guard("train", [&] {
    tr.validate();
    return 0;
  });

  const bool traj = t.kind == TaskKind::traj;
  ex.bgn_target = config_guard("train.bgn_prediction_kind", [&] {
    return parse_train_target(cfg.get_or("train.bgn_prediction_kind", traj ? "v_prime" : "epsilon_prime"));
  });
  if (!is_biased(ex.bgn_target)) throw ConfigError("train.bgn_prediction_kind must be epsilon_prime or v_prime");
  ex.bgn.t_m = static_cast<int>(parse_int("bgn.t_m", cfg.get_or("bgn.t_m", traj ? "600" : "0")));
  ex.bgn.t_n = static_cast<int>(parse_int("bgn.t_n", cfg.get_or("bgn.t_n", traj ? "990" : "700")));
  ex.bgn_t_start = static_cast<int>(
      parse_int("bgn.t_start", cfg.get_or("bgn.t_start", traj ? std::to_string(n) : std::to_string(ex.bgn.t_n))));
  const std::string objective = cfg.get("train.objective");
  if (objective != "standard" && objective != "bgn") throw ConfigError("train.objective must be standard or bgn");
  ex.objective_bgn = objective == "bgn";
  if (ex.objective_bgn && !t.paired()) throw ConfigError("train.objective = bgn needs a paired task");
  ex.bgn_stepper = config_guard("bgn.stepper", [&] { return parse_bgn_stepper(cfg.get("bgn.stepper")); });
  if (t.paired()) {
    config_guard("bgn", [&] {
      ex.bgn.validate(ex.schedule);
      ex.schedule.check_timestep(ex.bgn_t_start);
      return 0;
    });
  }

  SamplerConfig& sc = ex.sampler;
  sc.kind = config_guard("sampler.kind", [&] { return parse_sampler_kind(cfg.get("sampler.kind")); });
  sc.steps = static_cast<int>(cfg.get_int("sampler.steps"));
  sc.start_fraction = cfg.get_double("sampler.start_fraction");
  sc.eta = cfg.get_double("sampler.eta");
  config_guard("sampler", [&] {
    sc.validate(n);
    return 0;
  });
  ex.edit_fractions = parse_list("sampler.edit_fractions", cfg.get("sampler.edit_fractions"));
  for (double f : ex.edit_fractions)
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("sampler.edit_fractions must lie in (0, 1)");

  ex.w_text = cfg.get_double("guidance.w_text");
  ex.w_image = cfg.get_double("guidance.w_image");
  if (!std::isfinite(ex.w_text) || !std::isfinite(ex.w_image)) throw ConfigError("guidance weights must be finite");
  ex.checkpoint = cfg.get_or("train.checkpoint", "");
  return ex;
}

std::string Experiment::resolved_text() const {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  const auto d = [](double v) { return format_double(v); };
  const auto i = [](auto v) { return std::to_string(v); };
  std::string fractions;
  for (double f : edit_fractions) fractions += (fractions.empty() ? "" : ",") + format_double(f);
  const int n = schedule.n_steps();
  const std::vector<std::pair<std::string, std::string>> kv = {
      {"bgn.t_m", i(bgn.t_m)},
      {"bgn.t_n", i(bgn.t_n)},
      {"bgn.stepper", to_string(bgn_stepper)},
      {"bgn.t_start", i(bgn_t_start)},
      {"guidance.w_image", d(w_image)},
      {"guidance.w_text", d(w_text)},
      {"sampler.edit_fractions", fractions},
      {"sampler.eta", d(sampler.eta)},
      {"sampler.kind", to_string(sampler.kind)},
      {"sampler.start_fraction", d(sampler.start_fraction)},
      {"sampler.steps", i(sampler.steps)},
      {"schedule.beta_end", d(beta_end)},
      {"schedule.beta_start", d(beta_start)},
      {"schedule.n_steps", i(n)},
      {"schedule.zero_terminal_snr", b(schedule.terminal_rescaled())},
      {"task.amplitude", d(task.amplitude)},
      {"task.blur_sigma", d(task.degradation.blur_sigma)},
      {"task.blur_width", i(task.degradation.blur_width)},
      {"task.dims", i(task.dims)},
      {"task.downsample_stride", i(task.degradation.downsample_stride)},
      {"task.eval_samples", i(eval_samples)},
      {"task.eval_seed", i(eval_seed)},
      {"task.high_mode", i(task.high_mode)},
      {"task.jitter", d(task.jitter)},
      {"task.kind", to_string(task.kind)},
      {"task.n_classes", i(task.n_classes)},
      {"task.seed", i(task.seed)},
      {"task.start_scale", d(task.start_scale)},
      {"task.token_dim", i(task.token_dim)},
      {"task.tokens_per_stream", i(task.tokens_per_stream)},
      {"task.velocity_scale", d(task.velocity_scale)},
      {"train.batch_size", i(train.batch_size)},
      {"train.bgn_prediction_kind", to_string(bgn_target)},
      {"train.eval_every", i(train.eval_every)},
      {"train.image_dropout", d(train.image_dropout)},
      {"train.learning_rate", d(train.learning_rate)},
      {"train.n_iterations", i(train.n_iterations)},
      {"train.objective", objective_bgn ? "bgn" : "standard"},
      {"train.offset_noise", d(train.offset_noise.strength)},
      {"train.prediction_kind", to_string(train.target)},
      {"train.seed", i(train.seed)},
      {"train.text_dropout", d(train.text_dropout)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  if (!checkpoint.empty()) out += "train.checkpoint = " + checkpoint + "\n";
  return out;
}

TrainConfig Experiment::training(bool biased) const {
  TrainConfig c = train;
  if (biased) {
    c.target = bgn_target;
    c.bgn = bgn;
  } else {
    c.bgn.reset();
  }
  return c;
}

int scaled_steps(int steps, int t0, int n_steps) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(steps) * t0 / n_steps)));
}

std::vector<std::string> eval_modes(const TaskSpec& task) {
  if (task.stream_features().size() > 1) return {"text", "image", "both"};
  return {"text"};
}

ConditionTokens tokens_for_mode(const TaskBatch& batch, const std::string& mode) {
  const std::size_t n = batch.tokens.count();
  if (mode == "both" || (mode == "text" && n == 1)) return batch.tokens;
  if (n < 2) throw InvalidArgument("mode '" + mode + "' needs two condition streams");
  if (mode == "text") return batch.tokens.only(0);
  if (mode == "image") return batch.tokens.only(1);
  throw InvalidArgument("unknown conditioning mode '" + mode + "'");
}

double conditional_frechet(const Array& samples, const TaskBatch& eval, const std::string& mode) {
  std::vector<const Array*> feats;
  const std::size_t n = eval.features.size();
  if (mode == "both" || (mode == "text" && n == 1)) {
    for (const Array& f : eval.features) feats.push_back(&f);
  } else if (mode == "text") {
    feats.push_back(&eval.features.at(0));
  } else if (mode == "image") {
    feats.push_back(&eval.features.at(1));
  } else {
    throw InvalidArgument("unknown conditioning mode '" + mode + "'");
  }
  auto join = [&](const Array& x) {
    std::size_t width = x.dim(1);
    for (const Array* f : feats) width += f->dim(1);
    Array out({x.dim(0), width});
    for (std::size_t r = 0; r < x.dim(0); ++r) {
      std::size_t c = 0;
      for (std::size_t j = 0; j < x.dim(1); ++j) out(r, c++) = x(r, j);
      for (const Array* f : feats)
        for (std::size_t j = 0; j < f->dim(1); ++j) out(r, c++) = (*f)(r, j);
    }
    return out;
  };
  return frechet_distance(join(samples), join(eval.target));
}

Array sample_for_eval(const Denoiser& model, const TaskBatch& eval, const std::string& mode, const Experiment& ex,
                      Rng& rng) {
  const ConditionTokens tokens = tokens_for_mode(eval, mode);
  const int n = ex.schedule.n_steps();
  if (model.biased()) {
    SamplerConfig sc;
    sc.start_fraction = static_cast<double>(ex.bgn_t_start) / n;
    sc.steps = scaled_steps(ex.sampler.steps, ex.bgn_t_start, n);
    return sample_bgn(model, eval.condition, tokens, ex.bgn, GuidanceSpec::conditional(), sc, ex.schedule, rng,
                      ex.bgn_stepper);
  }
  SamplerConfig sc = ex.sampler;
  if (sc.start_fraction < 1.0) {
    if (eval.condition.empty()) throw ConfigError("sampler.start_fraction < 1 needs a paired task");
    sc.steps = scaled_steps(ex.sampler.steps, start_timestep(sc, n), n);
    return sample(model, tokens, GuidanceSpec::conditional(), sc, ex.schedule, eval.condition, rng);
  }
  return sample(model, tokens, GuidanceSpec::conditional(), sc, ex.schedule, std::nullopt, rng, ex.task.dims);
}

EvalHook make_eval_hook(const Experiment& ex) {
  Rng data_rng(ex.eval_seed);
  auto eval = std::make_shared<TaskBatch>(generate(ex.task, ex.eval_samples, data_rng));
  return [ex, eval](const Denoiser& model, int iteration) {
    std::vector<MetricRow> rows;
    const auto modes = eval_modes(ex.task);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      Rng rng(mix_seed(ex.eval_seed, 1000 + m));
      const Array s = sample_for_eval(model, *eval, modes[m], ex, rng);
      rows.push_back({iteration, modes[m], "frechet", frechet_distance(s, eval->target)});
      rows.push_back({iteration, modes[m], "conditional_frechet", conditional_frechet(s, *eval, modes[m])});
    }
    return rows;
  };
}

const MethodScores& CompareResult::at(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return r;
  throw InvalidArgument("no method '" + method + "' in comparison");
}

namespace {

MethodScores score(const std::string& method, const Array& samples, const TaskBatch& eval, TaskKind kind) {
  return {method, frechet_distance(samples, eval.target), energy_distance(samples, eval.target),
          paired_mse(samples, eval.target), sharpness_proxy(samples, kind)};
}

}  // namespace

CompareResult compare_bgn(const Experiment& ex) {
  if (!ex.task.paired()) throw ConfigError("compare-bgn needs a paired task (sr1d or traj)");
  const int n = ex.schedule.n_steps();
  const TrainConfig standard = ex.training(false);
  const TrainConfig biased = ex.training(true);

  CompareResult out;
  TrainResult a = train_run(standard, ex.task, ex.schedule);
  TrainResult b = train_run(biased, ex.task, ex.schedule);
  out.standard_log = a.log;
  out.bgn_log = b.log;

  Rng data_rng(ex.eval_seed);
  const TaskBatch eval = generate(ex.task, ex.eval_samples, data_rng);
  const GuidanceSpec plain = GuidanceSpec::conditional();
  out.rows.push_back(score("condition", eval.condition, eval, ex.task.kind));
  for (double f : ex.edit_fractions) {
    SamplerConfig sc = ex.sampler;
    sc.start_fraction = f;
    sc.steps = scaled_steps(ex.sampler.steps, start_timestep(sc, n), n);
    Rng rng(mix_seed(ex.eval_seed, 2000));
    const Array s = editing_baseline(a.model, eval.condition, eval.tokens, plain, sc, ex.schedule, rng);
    out.rows.push_back(score("edit_" + format_double(f), s, eval, ex.task.kind));
  }
  Rng rng(mix_seed(ex.eval_seed, 2000));
  const Array s = sample_for_eval(b.model, eval, "both", ex, rng);
  out.rows.push_back(score("bgn", s, eval, ex.task.kind));
  return out;
}

std::vector<SweepCell> sweep_guidance(const Denoiser& model, const Experiment& ex) {
  if (ex.task.kind != TaskKind::gauss2d) throw ConfigError("sweep-guidance needs a gauss2d model");
  if (model.config().tokens_per_stream.size() != 2) throw ConfigError("sweep-guidance needs a two-stream model");
  const std::size_t n = ex.eval_samples;
  const std::size_t n_ref = 20000;
  const auto means = class_means(ex.task.n_classes);
  const double anchor[2] = {0.0, 1.5};

  // Reference sets: what text alone, image alone, or nothing implies.
  Rng ref_rng(mix_seed(ex.eval_seed, 3000));
  Array text_ref({n_ref, 2}), image_ref({n_ref, 2});
  for (std::size_t i = 0; i < n_ref; ++i)
    for (std::size_t k = 0; k < 2; ++k) text_ref(i, k) = means[0][k] + std::sqrt(1.01) * ref_rng.normal();
  for (std::size_t i = 0; i < n_ref; ++i) {
    const auto c = static_cast<std::size_t>(ref_rng.uniform_int(0, ex.task.n_classes - 1));
    for (std::size_t k = 0; k < 2; ++k) image_ref(i, k) = anchor[k] + means[c][k] + 0.1 * ref_rng.normal();
  }
  const Array pooled_ref = gen_gauss2d(ex.task, n_ref, ref_rng).target;

  Array anchors({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    anchors(i, 0) = anchor[0];
    anchors(i, 1) = anchor[1];
  }
  const ConditionTokens tokens = gauss2d_tokens(ex.task, std::vector<int>(n, 0), anchors);

  std::vector<SweepCell> cells;
  SamplerConfig sc = ex.sampler;
  sc.start_fraction = 1.0;
  for (double wt : {0.0, 0.5, 1.0, 2.0})
    for (double wi : {0.0, 0.5, 1.0, 2.0}) {
      GuidanceSpec g;
      g.weights = {{0, wt}, {1, wi}};
      Rng rng(mix_seed(ex.eval_seed, 4000));
      const Array s = sample(model, tokens, g, sc, ex.schedule, std::nullopt, rng, 2);
      cells.push_back({wt, wi, frechet_distance(s, text_ref), frechet_distance(s, image_ref),
                       frechet_distance(s, pooled_ref)});
    }
  return cells;
}

std::string metric_log_csv(const std::vector<MetricRow>& log) {
  CsvTable t({"iteration", "mode", "metric", "value"});
  for (const auto& r : log) t.add_row({std::to_string(r.iteration), r.mode, r.metric, format_double(r.value)});
  return t.str();
}

std::string compare_csv(const CompareResult& r) {
  CsvTable t({"method", "frechet", "energy", "paired_mse", "sharpness"});
  for (const auto& m : r.rows)
    t.add_row({m.method, format_double(m.frechet), format_double(m.energy), format_double(m.paired_mse),
               format_double(m.sharpness)});
  return t.str();
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  CsvTable t({"w_text", "w_image", "frechet_text_marginal", "frechet_image_marginal", "frechet_pooled_marginal"});
  for (const auto& c : cells)
    t.add_row({format_double(c.w_text), format_double(c.w_image), format_double(c.to_text_marginal),
               format_double(c.to_image_marginal), format_double(c.to_pooled_marginal)});
  return t.str();
}

}  // namespace uvg
