#include "uvg/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include "uvg/error.hpp"
#include "uvg/parallel.hpp"

namespace uvg {

void ParameterStore::add(std::string name, Array value) {
  if (contains(name)) throw InvalidArgument("duplicate parameter '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(value));
}

bool ParameterStore::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
}

Array& ParameterStore::at(const std::string& name) {
  for (auto& e : entries_)
    if (e.first == name) return e.second;
  throw InvalidArgument("no parameter '" + name + "'");
}

const Array& ParameterStore::at(const std::string& name) const {
  return const_cast<ParameterStore*>(this)->at(name);
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

ParameterStore ParameterStore::zeros_like() const {
  ParameterStore out;
  for (const auto& e : entries_) out.add(e.first, Array(e.second.shape()));
  return out;
}

bool ParameterStore::same_layout(const ParameterStore& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (name(i) != other.name(i) || value(i).shape() != other.value(i).shape()) return false;
  return true;
}

void McaWeights::validate() const {
  if (w_k.empty() || w_k.size() != w_v.size()) throw InvalidArgument("MCA needs matching, non-empty K/V lists");
  if (w_q.rank() != 2 || w_q.dim(1) != d || b_q.shape() != Shape{d}) throw InvalidArgument("MCA query shape mismatch");
  for (std::size_t i = 0; i < w_k.size(); ++i) {
    if (w_k[i].rank() != 2 || w_k[i].dim(1) != d || w_v[i].shape() != w_k[i].shape()) {
      throw InvalidArgument("MCA key/value shape mismatch in stream " + std::to_string(i));
    }
  }
}

Tape::Var mca_record(Tape& tape, Tape::Var w_q, Tape::Var b_q, const std::vector<Tape::Var>& w_k,
                     const std::vector<Tape::Var>& w_v, std::size_t d, Tape::Var f_in,
                     const ConditionTokens& cond) {
  if (cond.count() != w_k.size()) {
    throw InvalidArgument("MCA has " + std::to_string(w_k.size()) + " streams, tokens have " +
                          std::to_string(cond.count()));
  }
  const std::size_t b = tape.value(f_in).dim(0);
  const Tape::Var q = tape.reshape(tape.add_bias(tape.matmul(f_in, w_q), b_q), {b, 1, d});
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  Tape::Var sum{};
  for (std::size_t i = 0; i < w_k.size(); ++i) {
    const Array& tok = cond.streams[i];
    if (tok.dim(0) != b || tok.dim(2) != tape.value(w_k[i]).dim(0)) {
      throw InvalidArgument("condition stream " + std::to_string(i) + " has shape " + shape_string(tok.shape()));
    }
    const std::size_t k = tok.dim(1);
    const Tape::Var flat = tape.leaf(tok.reshaped({b * k, tok.dim(2)}));
    const Tape::Var keys = tape.reshape(tape.matmul(flat, w_k[i]), {b, k, d});
    const Tape::Var vals = tape.reshape(tape.matmul(flat, w_v[i]), {b, k, d});
    const Tape::Var attn = tape.softmax(tape.scale(tape.bmm_nt(q, keys), inv_sqrt_d));
    const Tape::Var term = tape.bmm(attn, vals);
    sum = i == 0 ? term : tape.add(sum, term);
  }
  return tape.reshape(sum, {b, d});
}

Array mca_forward(const McaWeights& w, const Array& f_in, const ConditionTokens& cond) {
  w.validate();
  if (f_in.rank() != 2 || f_in.dim(1) != w.w_q.dim(0)) throw InvalidArgument("MCA query features have wrong shape");
  Tape tape;
  std::vector<Tape::Var> k, v;
  for (std::size_t i = 0; i < w.streams(); ++i) {
    k.push_back(tape.leaf(w.w_k[i]));
    v.push_back(tape.leaf(w.w_v[i]));
  }
  const Tape::Var out =
      mca_record(tape, tape.leaf(w.w_q), tape.leaf(w.b_q), k, v, w.d, tape.leaf(f_in), cond);
  return tape.value(out);
}

McaWeights mca_extend(const McaWeights& w, std::size_t n_new) {
  w.validate();
  if (n_new < 1) throw InvalidArgument("mca_extend needs n_new >= 1");
  McaWeights out = w;
  for (std::size_t i = 0; i < n_new; ++i) {
    out.w_k.push_back(w.w_k[0]);
    out.w_v.push_back(w.w_v[0]);
  }
  return out;
}

Array time_embedding(int t, std::size_t dim, int n_steps) {
  if (dim == 0 || dim % 2) throw InvalidArgument("time embedding dimension must be even and positive");
  if (t < 0 || t > n_steps) throw InvalidArgument("time embedding timestep out of range");
  const std::size_t half = dim / 2;
  Array out({dim});
  const double pos = 1000.0 * static_cast<double>(t) / static_cast<double>(n_steps);
  for (std::size_t i = 0; i < half; ++i) {
    const double a = pos * std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(half));
    out[i] = std::sin(a);
    out[half + i] = std::cos(a);
  }
  return out;
}

void ModelConfig::validate() const {
  if (!x_dim || !hidden || !attn_dim || !cond_dim) throw InvalidArgument("model dimensions must be positive");
  if (time_dim == 0 || time_dim % 2) throw InvalidArgument("time embedding dimension must be even");
  if (tokens_per_stream.empty()) throw InvalidArgument("model needs at least one condition stream");
  for (std::size_t k : tokens_per_stream)
    if (!k) throw InvalidArgument("each condition stream needs at least one token");
  if (n_steps < 2) throw InvalidArgument("model n_steps must be >= 2");
  if (biased && kind == PredictionKind::x0) throw InvalidArgument("biased models predict epsilon' or v'");
}

namespace {

Array uniform_init(Shape shape, std::size_t fan_in, Rng& rng) {
  Array a(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : a.values()) v = bound * (2.0 * rng.uniform() - 1.0);
  return a;
}

}  // namespace

Denoiser::Denoiser(ModelConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t h = cfg_.hidden, d = cfg_.attn_dim, in = cfg_.x_dim + cfg_.time_dim;
  params_.add("trunk.w1", uniform_init({in, h}, in, rng));
  params_.add("trunk.b1", uniform_init({h}, in, rng));
  params_.add("trunk.w2", uniform_init({h, h}, h, rng));
  params_.add("trunk.b2", uniform_init({h}, h, rng));
  params_.add("mca.w_q", uniform_init({h, d}, h, rng));
  params_.add("mca.b_q", uniform_init({d}, h, rng));
  for (std::size_t i = 0; i < cfg_.tokens_per_stream.size(); ++i) {
    params_.add("mca.w_k." + std::to_string(i), uniform_init({cfg_.cond_dim, d}, cfg_.cond_dim, rng));
    params_.add("mca.w_v." + std::to_string(i), uniform_init({cfg_.cond_dim, d}, cfg_.cond_dim, rng));
  }
  params_.add("head.w3", uniform_init({h + d, h}, h + d, rng));
  params_.add("head.b3", uniform_init({h}, h + d, rng));
  params_.add("head.w_out", uniform_init({h, cfg_.x_dim}, h, rng));
  params_.add("head.b_out", uniform_init({cfg_.x_dim}, h, rng));
}

Denoiser::Denoiser(ModelConfig cfg, ParameterStore params) : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
  Rng scratch(0);
  const Denoiser reference(cfg_, scratch);
  for (std::size_t i = 0; i < reference.params_.size(); ++i) {
    const std::string& n = reference.params_.name(i);
    if (!params_.contains(n) || params_.at(n).shape() != reference.params_.value(i).shape()) {
      throw InvalidArgument("parameter '" + n + "' missing or misshaped for this model config");
    }
  }
  if (params_.size() != reference.params_.size()) throw InvalidArgument("unexpected extra parameters");
}

Tape::Var Denoiser::build(Tape& tape, const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond,
                          std::vector<std::pair<std::string, Tape::Var>>* leaves) const {
  if (x_t.rank() != 2 || x_t.dim(1) != cfg_.x_dim) {
    throw InvalidArgument("denoiser input must be (B, " + std::to_string(cfg_.x_dim) + "), got " +
                          shape_string(x_t.shape()));
  }
  const std::size_t b = x_t.dim(0);
  if (t.size() != b) throw InvalidArgument("one timestep per row required");
  if (cond.count() != cfg_.tokens_per_stream.size() || cond.batch() != b) {
    throw InvalidArgument("condition tokens do not match the model's streams or batch");
  }
  for (std::size_t i = 0; i < cond.count(); ++i) {
    if (cond.streams[i].dim(1) != cfg_.tokens_per_stream[i] || cond.streams[i].dim(2) != cfg_.cond_dim) {
      throw InvalidArgument("condition stream " + std::to_string(i) + " has shape " +
                            shape_string(cond.streams[i].shape()));
    }
  }
  const bool grad = leaves != nullptr;
  auto p = [&](const std::string& name) {
    const Tape::Var v = tape.leaf(params_.at(name), grad);
    if (leaves) leaves->emplace_back(name, v);
    return v;
  };

  Array temb({b, cfg_.time_dim});
  for (std::size_t r = 0; r < b; ++r) {
    const Array e = time_embedding(t[r], cfg_.time_dim, cfg_.n_steps);
    std::copy(e.values().begin(), e.values().end(), temb.row(r).begin());
  }
  const Tape::Var in = tape.concat(tape.leaf(x_t), tape.leaf(std::move(temb)));
  const Tape::Var h1 = tape.tanh(tape.add_bias(tape.matmul(in, p("trunk.w1")), p("trunk.b1")));
  const Tape::Var h2 = tape.tanh(tape.add_bias(tape.matmul(h1, p("trunk.w2")), p("trunk.b2")));

  const Tape::Var wq = p("mca.w_q"), bq = p("mca.b_q");
  std::vector<Tape::Var> wk, wv;
  for (std::size_t i = 0; i < cond.count(); ++i) {
    wk.push_back(p("mca.w_k." + std::to_string(i)));
    wv.push_back(p("mca.w_v." + std::to_string(i)));
  }
  const Tape::Var attn = mca_record(tape, wq, bq, wk, wv, cfg_.attn_dim, h2, cond);

  const Tape::Var h3 =
      tape.tanh(tape.add_bias(tape.matmul(tape.concat(h2, attn), p("head.w3")), p("head.b3")));
  return tape.add_bias(tape.matmul(h3, p("head.w_out")), p("head.b_out"));
}

Array Denoiser::forward(const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond) const {
  Tape tape;
  Array out = tape.value(build(tape, x_t, t, cond, nullptr));
  out.check_finite("denoiser output");
  return out;
}

Array Denoiser::predict(const Array& x_t, int t, const ConditionTokens& cond) const {
  if (x_t.rank() != 2) throw InvalidArgument("denoiser input must be 2-D");
  const std::size_t b = x_t.dim(0);
  Array out({b, cfg_.x_dim});
  parallel_for(b, [&](std::size_t begin, std::size_t end) {
    const Array part = forward(x_t.slice_rows(begin, end), std::vector<int>(end - begin, t),
                               cond.slice_rows(begin, end));
    std::copy(part.values().begin(), part.values().end(), out.data() + begin * cfg_.x_dim);
  });
  return out;
}

Recording Denoiser::record(const Array& x_t, const std::vector<int>& t, const ConditionTokens& cond) const {
  Recording rec;
  rec.tape_ = std::make_unique<Tape>();
  rec.out_ = build(*rec.tape_, x_t, t, cond, &rec.params_);
  // Leaves are created in argument-evaluation order; report in store order.
  std::vector<std::pair<std::string, Tape::Var>> ordered;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (const auto& leaf : rec.params_)
      if (leaf.first == params_.name(i)) ordered.push_back(leaf);
  }
  rec.params_ = std::move(ordered);
  rec.tape_->value(rec.out_).check_finite("denoiser output");
  return rec;
}

const Array& Recording::output() const {
  if (!tape_) throw StateError("no forward pass has been recorded");
  return tape_->value(out_);
}

ParameterStore Recording::backward(const Array& loss_grad) {
  if (!tape_) throw StateError("backward called without a recorded forward pass");
  tape_->backward(out_, loss_grad);
  ParameterStore g;
  for (const auto& [name, v] : params_) g.add(name, tape_->grad(v));
  return g;
}

McaWeights Denoiser::mca_weights() const {
  McaWeights w;
  w.w_q = params_.at("mca.w_q");
  w.b_q = params_.at("mca.b_q");
  w.d = cfg_.attn_dim;
  for (std::size_t i = 0; i < cfg_.tokens_per_stream.size(); ++i) {
    w.w_k.push_back(params_.at("mca.w_k." + std::to_string(i)));
    w.w_v.push_back(params_.at("mca.w_v." + std::to_string(i)));
  }
  return w;
}

void Denoiser::extend_streams(std::size_t n_new, std::size_t tokens_each) {
  if (n_new < 1 || tokens_each < 1) throw InvalidArgument("extend_streams needs n_new, tokens_each >= 1");
  const McaWeights w = mca_extend(mca_weights(), n_new);
  for (std::size_t i = cfg_.tokens_per_stream.size(); i < w.streams(); ++i) {
    params_.add("mca.w_k." + std::to_string(i), w.w_k[i]);
    params_.add("mca.w_v." + std::to_string(i), w.w_v[i]);
    cfg_.tokens_per_stream.push_back(tokens_each);
  }
}

}  // namespace uvg
