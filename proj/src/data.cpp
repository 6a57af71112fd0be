#include "uvg/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "uvg/autodiff.hpp"
#include "uvg/csv.hpp"
#include "uvg/error.hpp"

namespace uvg {

namespace {

constexpr std::size_t kFrames = 8;
constexpr int kDirectionBins = 8;

}  // namespace

void DegradationSpec::validate(std::size_t dims) const {
  if (blur_width < 1 || blur_width % 2 == 0) throw InvalidArgument("blur width must be odd and positive");
  if (!(blur_sigma > 0.0)) throw InvalidArgument("blur sigma must be positive");
  if (downsample_stride < 1 || dims % static_cast<std::size_t>(downsample_stride)) {
    throw InvalidArgument("downsample stride must divide the signal length");
  }
}

void TaskSpec::validate() const {
  if (dims < 1) throw InvalidArgument("task dims must be >= 1");
  if (tokens_per_stream < 1 || token_dim < 1) throw InvalidArgument("token shape must be positive");
  switch (kind) {
    case TaskKind::gauss2d:
      if (dims != 2) throw InvalidArgument("gauss2d has dims = 2");
      if (n_classes < 2) throw InvalidArgument("gauss2d needs n_classes >= 2");
      break;
    case TaskKind::sr1d:
      degradation.validate(dims);
      if (dims < 4 || high_mode < 3 || static_cast<std::size_t>(high_mode) > dims / 2) {
        throw InvalidArgument("sr1d needs dims >= 4 and 3 <= high_mode <= dims/2");
      }
      if (!(amplitude >= 0.0)) throw InvalidArgument("sr1d amplitude must be >= 0");
      break;
    case TaskKind::traj:
      if (dims != 2 * kFrames) throw InvalidArgument("traj has dims = 16 (8 frames x 2)");
      if (!(start_scale >= 0.0 && velocity_scale >= 0.0 && jitter >= 0.0)) {
        throw InvalidArgument("traj scales must be >= 0");
      }
      break;
  }
}

std::vector<std::size_t> TaskSpec::stream_features() const {
  switch (kind) {
    case TaskKind::gauss2d: return {static_cast<std::size_t>(n_classes), 2};
    case TaskKind::sr1d: return {3};
    case TaskKind::traj: return {kDirectionBins, 2};
  }
  return {};
}

TaskSpec default_task(TaskKind kind) {
  TaskSpec t;
  t.kind = kind;
  t.dims = kind == TaskKind::gauss2d ? 2 : 16;
  return t;
}

TokenEncoder::TokenEncoder(std::uint64_t seed, const std::vector<std::size_t>& feature_dims, std::size_t tokens,
                           std::size_t token_dim)
    : tokens_(tokens), token_dim_(token_dim) {
  for (std::size_t i = 0; i < feature_dims.size(); ++i) {
    Rng rng(mix_seed(seed, 100 + i));
    // One extra row holds a presence vector added to every real encoding, so
    // no feature value (an anchor at the origin, say) encodes to the null
    // tokens that mark a dropped stream.
    Array p({feature_dims[i] + 1, tokens * token_dim});
    const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dims[i] + 1));
    for (double& v : p.values()) v = scale * rng.normal();
    proj_.push_back(std::move(p));
  }
}

ConditionTokens TokenEncoder::encode(const std::vector<Array>& features) const {
  if (features.size() != proj_.size()) throw InvalidArgument("feature count differs from encoder streams");
  std::vector<Array> streams;
  for (std::size_t i = 0; i < proj_.size(); ++i) {
    const Array& f = features[i];
    const std::size_t width = proj_[i].dim(0) - 1, m = tokens_ * token_dim_;
    if (f.rank() != 2 || f.dim(1) != width) throw InvalidArgument("token features have the wrong width");
    Array out({f.dim(0), m});
    for (std::size_t r = 0; r < f.dim(0); ++r)
      std::copy(proj_[i].data() + width * m, proj_[i].data() + (width + 1) * m, out.data() + r * m);
    gemm_acc(f.data(), proj_[i].data(), out.data(), f.dim(0), width, m);
    streams.push_back(out.reshaped({f.dim(0), tokens_, token_dim_}));
  }
  return ConditionTokens(std::move(streams));
}

std::vector<std::array<double, 2>> class_means(int n_classes) {
  std::vector<std::array<double, 2>> out;
  for (int c = 0; c < n_classes; ++c) {
    const double a = 2.0 * std::numbers::pi * c / n_classes;
    // Snap so the four-class layout lands on exact axis points.
    auto snap = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
    out.push_back({snap(std::cos(a)), snap(std::sin(a))});
  }
  return out;
}

ConditionTokens gauss2d_tokens(const TaskSpec& spec, const std::vector<int>& labels, const Array& anchors) {
  const std::size_t n = labels.size();
  if (anchors.shape() != Shape{n, 2}) throw InvalidArgument("anchors must be (n, 2)");
  Array onehot({n, static_cast<std::size_t>(spec.n_classes)});
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= spec.n_classes) throw InvalidArgument("class label out of range");
    onehot(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  const TokenEncoder enc(spec.seed, spec.stream_features(), spec.tokens_per_stream, spec.token_dim);
  return enc.encode({onehot, anchors});
}

TaskBatch gen_gauss2d(const TaskSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (spec.kind != TaskKind::gauss2d) throw InvalidArgument("gen_gauss2d needs a gauss2d spec");
  const auto means = class_means(spec.n_classes);
  TaskBatch b;
  b.target = Array({n, 2});
  b.anchors = Array({n, 2});
  b.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(rng.uniform_int(0, spec.n_classes - 1));
    b.labels[i] = c;
    for (std::size_t k = 0; k < 2; ++k) b.anchors(i, k) = rng.normal();
    for (std::size_t k = 0; k < 2; ++k) b.target(i, k) = means[c][k] + b.anchors(i, k) + 0.1 * rng.normal();
  }
  b.tokens = gauss2d_tokens(spec, b.labels, b.anchors);
  Array onehot({n, static_cast<std::size_t>(spec.n_classes)});
  for (std::size_t i = 0; i < n; ++i) onehot(i, static_cast<std::size_t>(b.labels[i])) = 1.0;
  b.features = {onehot, b.anchors};
  return b;
}

Array degrade(const Array& signals, const DegradationSpec& d) {
  if (signals.rank() != 2) throw InvalidArgument("degrade expects (n, dims)");
  const std::size_t n = signals.dim(0), dims = signals.dim(1);
  d.validate(dims);
  const int h = d.blur_width / 2;
  std::vector<double> kernel;
  double ksum = 0.0;
  for (int o = -h; o <= h; ++o) {
    kernel.push_back(std::exp(-0.5 * (o / d.blur_sigma) * (o / d.blur_sigma)));
    ksum += kernel.back();
  }
  for (double& k : kernel) k /= ksum;
  const auto stride = static_cast<std::size_t>(d.downsample_stride);
  const std::size_t m = dims / stride;
  const auto wrap = [](long i, std::size_t len) { return static_cast<std::size_t>(((i % static_cast<long>(len)) + static_cast<long>(len)) % static_cast<long>(len)); };
  Array out({n, dims});
  std::vector<double> blurred(dims), coarse(m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < dims; ++i) {
      double s = 0.0;
      for (int o = -h; o <= h; ++o) s += kernel[static_cast<std::size_t>(o + h)] * signals(r, wrap(static_cast<long>(i) + o, dims));
      blurred[i] = s;
    }
    for (std::size_t j = 0; j < m; ++j) coarse[j] = blurred[j * stride];
    for (std::size_t i = 0; i < dims; ++i) {
      const std::size_t i0 = i / stride;
      const double f = static_cast<double>(i % stride) / static_cast<double>(stride);
      out(r, i) = f == 0.0 ? coarse[i0] : (1.0 - f) * coarse[i0] + f * coarse[(i0 + 1) % m];
    }
  }
  return out;
}

TaskBatch gen_sr1d(const TaskSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (spec.kind != TaskKind::sr1d) throw InvalidArgument("gen_sr1d needs an sr1d spec");
  const std::size_t d = spec.dims;
  TaskBatch b;
  b.target = Array({n, d});
  Array caption({n, 3});
  const double w = 2.0 * std::numbers::pi / static_cast<double>(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double a0 = spec.amplitude * rng.normal();
    const double c1 = spec.amplitude * rng.normal(), s1 = spec.amplitude * rng.normal();
    const double c2 = spec.amplitude * rng.normal(), s2 = spec.amplitude * rng.normal();
    const double ch = spec.amplitude * rng.normal(), sh = spec.amplitude * rng.normal();
    for (std::size_t j = 0; j < d; ++j) {
      const double x = w * static_cast<double>(j);
      b.target(r, j) = a0 + c1 * std::cos(x) + s1 * std::sin(x) + c2 * std::cos(2 * x) + s2 * std::sin(2 * x) +
                       ch * std::cos(spec.high_mode * x) + sh * std::sin(spec.high_mode * x);
    }
    // A coarse "caption": level and first-harmonic phase of the signal.
    caption(r, 0) = a0;
    caption(r, 1) = c1;
    caption(r, 2) = s1;
  }
  b.condition = degrade(b.target, spec.degradation);
  const TokenEncoder enc(spec.seed, spec.stream_features(), spec.tokens_per_stream, spec.token_dim);
  b.features = {caption};
  b.tokens = enc.encode(b.features);
  return b;
}

TaskBatch gen_traj(const TaskSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (spec.kind != TaskKind::traj) throw InvalidArgument("gen_traj needs a traj spec");
  TaskBatch b;
  b.target = Array({n, 2 * kFrames});
  b.condition = Array({n, 2 * kFrames});
  Array direction({n, kDirectionBins}), first({n, 2});
  for (std::size_t r = 0; r < n; ++r) {
    const double sx = spec.start_scale * rng.normal(), sy = spec.start_scale * rng.normal();
    const double vx = spec.velocity_scale * rng.normal(), vy = spec.velocity_scale * rng.normal();
    for (std::size_t f = 0; f < kFrames; ++f) {
      double jx = 0.0, jy = 0.0;
      if (f > 0) {
        jx = spec.jitter * rng.normal();
        jy = spec.jitter * rng.normal();
      }
      b.target(r, 2 * f) = sx + static_cast<double>(f) * vx + jx;
      b.target(r, 2 * f + 1) = sy + static_cast<double>(f) * vy + jy;
      b.condition(r, 2 * f) = sx;
      b.condition(r, 2 * f + 1) = sy;
    }
    first(r, 0) = sx;
    first(r, 1) = sy;
    // Motion "caption": which of eight compass sectors the velocity points to.
    if (vx != 0.0 || vy != 0.0) {
      const double ang = std::atan2(vy, vx) + std::numbers::pi;
      const int bin = std::min(kDirectionBins - 1, static_cast<int>(ang / (2.0 * std::numbers::pi) * kDirectionBins));
      direction(r, static_cast<std::size_t>(bin)) = 1.0;
    }
  }
  const TokenEncoder enc(spec.seed, spec.stream_features(), spec.tokens_per_stream, spec.token_dim);
  b.features = {direction, first};
  b.tokens = enc.encode(b.features);
  return b;
}

TaskBatch generate(const TaskSpec& spec, std::size_t n, Rng& rng) {
  switch (spec.kind) {
    case TaskKind::gauss2d: return gen_gauss2d(spec, n, rng);
    case TaskKind::sr1d: return gen_sr1d(spec, n, rng);
    case TaskKind::traj: return gen_traj(spec, n, rng);
  }
  throw InvalidArgument("unknown task kind");
}

std::string dataset_csv(const TaskBatch& batch) {
  std::ostringstream os;
  const std::size_t n = batch.target.dim(0), d = batch.target.dim(1);
  os << "row";
  for (std::size_t j = 0; j < d; ++j) os << ",target_" << j;
  if (!batch.condition.empty())
    for (std::size_t j = 0; j < d; ++j) os << ",condition_" << j;
  for (std::size_t s = 0; s < batch.features.size(); ++s)
    for (std::size_t j = 0; j < batch.features[s].dim(1); ++j) os << ",feature" << s << "_" << j;
  os << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << i;
    for (std::size_t j = 0; j < d; ++j) os << "," << format_double(batch.target(i, j));
    if (!batch.condition.empty())
      for (std::size_t j = 0; j < d; ++j) os << "," << format_double(batch.condition(i, j));
    for (const Array& f : batch.features)
      for (std::size_t j = 0; j < f.dim(1); ++j) os << "," << format_double(f(i, j));
    os << "\n";
  }
  return os.str();
}

}  // namespace uvg
