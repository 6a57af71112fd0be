#include "uvg/train.hpp"

#include <cmath>
#include <sstream>

#include "uvg/error.hpp"

namespace uvg {

TrainTarget parse_train_target(std::string_view s) {
  if (s == "epsilon") return TrainTarget::epsilon;
  if (s == "v") return TrainTarget::v;
  if (s == "x0") return TrainTarget::x0;
  if (s == "epsilon_prime") return TrainTarget::epsilon_prime;
  if (s == "v_prime") return TrainTarget::v_prime;
  throw InvalidArgument("unknown prediction kind '" + std::string(s) + "'");
}

std::string to_string(TrainTarget t) {
  switch (t) {
    case TrainTarget::epsilon: return "epsilon";
    case TrainTarget::v: return "v";
    case TrainTarget::x0: return "x0";
    case TrainTarget::epsilon_prime: return "epsilon_prime";
    case TrainTarget::v_prime: return "v_prime";
  }
  return "?";
}

PredictionKind prediction_kind(TrainTarget t) {
  switch (t) {
    case TrainTarget::epsilon:
    case TrainTarget::epsilon_prime: return PredictionKind::epsilon;
    case TrainTarget::v:
    case TrainTarget::v_prime: return PredictionKind::v;
    case TrainTarget::x0: return PredictionKind::x0;
  }
  return PredictionKind::epsilon;
}

bool is_biased(TrainTarget t) { return t == TrainTarget::epsilon_prime || t == TrainTarget::v_prime; }

AdamState adam_init(const ParameterStore& params) { return AdamState{params.zeros_like(), params.zeros_like(), 0}; }

void adam_update(ParameterStore& params, const ParameterStore& grads, AdamState& state, double lr,
                 const AdamConfig& cfg) {
  if (!params.same_layout(grads) || !params.same_layout(state.m) || !params.same_layout(state.v)) {
    throw InvalidArgument("adam_update: parameter, gradient and state layouts differ");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Array& p = params.value(i);
    const Array& g = grads.value(i);
    Array& m = state.m.value(i);
    Array& v = state.v.value(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (batch_size < 1) throw InvalidArgument("batch size must be positive");
  if (n_iterations < 1) throw InvalidArgument("n_iterations must be positive");
  if (eval_every < 1) throw InvalidArgument("eval_every must be positive");
  for (double p : {text_dropout, image_dropout})
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dropout probabilities must lie in [0, 1]");
  if (!(offset_noise.strength >= 0.0)) throw InvalidArgument("offset noise strength must be >= 0");
  if (is_biased(target) != bgn.has_value()) {
    throw InvalidArgument("a bias window is required exactly when the target is epsilon_prime or v_prime");
  }
}

double train_step(Denoiser& model, const TrainBatch& batch, const TrainConfig& cfg, const NoiseSchedule& s,
                  AdamState& adam, Rng& rng) {
  cfg.validate();
  const Array& x0 = batch.target;
  if (x0.rank() != 2 || x0.dim(0) == 0) throw InvalidArgument("train_step needs a non-empty (B, D) batch");
  const bool biased = is_biased(cfg.target);
  if (biased) {
    require_same_shape(x0, batch.condition, "biased training pair");
    cfg.bgn->validate(s);
  }
  const std::size_t b = x0.dim(0), d = x0.dim(1);

  std::vector<int> t(b);
  for (int& ti : t) ti = static_cast<int>(rng.uniform_int(1, s.n_steps()));
  const Array eps = sample_offset_noise({b, d}, cfg.offset_noise, rng);
  ConditionTokens tokens = batch.tokens;
  for (std::size_t i = 0; i < tokens.count(); ++i) {
    std::vector<bool> drop(b);
    for (std::size_t r = 0; r < b; ++r) drop[r] = rng.bernoulli(cfg.dropout(i));
    tokens.drop_rows(i, drop);
  }

  Array x_t({b, d}), target({b, d});
  for (std::size_t r = 0; r < b; ++r) {
    const auto xr = x0.row(r);
    const auto er = eps.row(r);
    auto out = x_t.row(r);
    auto tg = target.row(r);
    const double a = s.signal(t[r]), n = s.noise(t[r]);
    if (biased) {
      const auto cr = batch.condition.row(r);
      forward_biased_row(*cfg.bgn, s, t[r], xr, cr, er, out);
      biased_noise_row(*cfg.bgn, s, t[r], xr, cr, er, tg);
      if (cfg.target == TrainTarget::v_prime)
        for (std::size_t j = 0; j < d; ++j) tg[j] = a * tg[j] - n * xr[j];
      continue;
    }
    forward_standard_row(s, t[r], xr, er, out);
    for (std::size_t j = 0; j < d; ++j) {
      switch (cfg.target) {
        case TrainTarget::epsilon: tg[j] = er[j]; break;
        case TrainTarget::v: tg[j] = a * er[j] - n * xr[j]; break;
        default: tg[j] = xr[j]; break;
      }
    }
  }

  Recording rec = model.record(x_t, t, tokens);
  const Array& pred = rec.output();
  const double scale = 1.0 / static_cast<double>(b * d);
  Array grad({b, d});
  double loss = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const double e = pred[j] - target[j];
    loss += e * e;
    grad[j] = 2.0 * scale * e;
  }
  loss *= scale;
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss (lr=" << cfg.learning_rate << ", target=" << to_string(cfg.target)
        << ", step=" << adam.step + 1 << ")";
    throw NumericError(msg.str());
  }
  const ParameterStore grads = rec.backward(grad);
  adam_update(model.params(), grads, adam, cfg.learning_rate, cfg.adam);
  return loss;
}

ModelConfig model_config_for(const TaskSpec& task, const TrainConfig& cfg, int n_steps) {
  ModelConfig m;
  m.x_dim = task.dims;
  m.cond_dim = task.token_dim;
  m.tokens_per_stream.assign(task.stream_features().size(), task.tokens_per_stream);
  m.n_steps = n_steps;
  m.kind = prediction_kind(cfg.target);
  m.biased = is_biased(cfg.target);
  return m;
}

TrainResult train_run(const TrainConfig& cfg, const TaskSpec& task, const NoiseSchedule& s, const EvalHook& eval,
                      const CheckpointHook& checkpoint, std::optional<ResumePoint> resume) {
  cfg.validate();
  task.validate();
  if (is_biased(cfg.target) && !task.paired()) throw InvalidArgument("biased training needs a paired task");
  Rng data_rng(mix_seed(cfg.seed, 1)), noise_rng(mix_seed(cfg.seed, 2));
  std::optional<Denoiser> model;
  AdamState adam;
  TrainState state;
  if (resume) {
    if (!(resume->model.config() == model_config_for(task, cfg, s.n_steps()))) {
      throw InvalidArgument("resume checkpoint does not match the task/train config");
    }
    model.emplace(std::move(resume->model));
    adam = std::move(resume->adam);
    state = resume->state;
    data_rng.load_state(state.data_rng);
    noise_rng.load_state(state.noise_rng);
  } else {
    Rng init(mix_seed(cfg.seed, 0));
    model.emplace(model_config_for(task, cfg, s.n_steps()), init);
    adam = adam_init(model->params());
  }

  TrainResult result{*model, {}, {}, {}, {}};
  if (state.iteration == 0 && eval) {
    for (MetricRow& r : eval(*model, 0)) result.log.push_back(std::move(r));
  }
  double loss_sum = 0.0;
  int loss_count = 0;
  for (int it = state.iteration + 1; it <= cfg.n_iterations; ++it) {
    TaskBatch data = generate(task, cfg.batch_size, data_rng);
    const TrainBatch batch{std::move(data.target), std::move(data.condition), std::move(data.tokens)};
    const double loss = train_step(*model, batch, cfg, s, adam, noise_rng);
    result.losses.push_back(loss);
    loss_sum += loss;
    ++loss_count;
    if (it % cfg.eval_every == 0 || it == cfg.n_iterations) {
      state.iteration = it;
      state.data_rng = data_rng.save_state();
      state.noise_rng = noise_rng.save_state();
      result.log.push_back({it, "train", "loss", loss_sum / loss_count});
      loss_sum = 0.0;
      loss_count = 0;
      if (eval)
        for (MetricRow& r : eval(*model, it)) result.log.push_back(std::move(r));
      if (checkpoint) checkpoint(*model, adam, state);
    }
  }
  result.model = std::move(*model);
  result.adam = std::move(adam);
  result.state = state;
  return result;
}

}  // namespace uvg
