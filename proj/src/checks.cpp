#include "uvg/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "uvg/bgn.hpp"
#include "uvg/csv.hpp"
#include "uvg/data.hpp"
#include "uvg/error.hpp"
#include "uvg/guidance.hpp"
#include "uvg/metrics.hpp"
#include "uvg/oracle.hpp"
#include "uvg/sampler.hpp"

namespace uvg {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double probe(long k, int salt) { return std::sin(0.37 * static_cast<double>(k) + 1.91 * salt + 0.5); }

namespace {

template <class... T>
std::string cat(const T&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os.width(16);
  os.fill('0');
  os << std::hex << h;
  return os.str();
}

class SuiteRun {
 public:
  SuiteRun(std::string suite, std::vector<CheckOutcome>& out) : suite_(std::move(suite)), out_(out) {}

  void expect(const std::string& name, bool ok, double value = 0.0, double limit = 0.0, std::string detail = {}) {
    out_.push_back({suite_, name, ok, value, limit, std::move(detail)});
  }
  /// Passes when 0 <= value <= limit (NaN fails).
  void at_most(const std::string& name, double value, double limit, std::string detail = {}) {
    expect(name, value <= limit, value, limit, std::move(detail));
  }
  template <class E, class F>
  void throws(const std::string& name, F&& f) {
    try {
      f();
    } catch (const E&) {
      expect(name, true);
      return;
    } catch (const std::exception& e) {
      expect(name, false, 0, 0, cat("wrong exception: ", e.what()));
      return;
    }
    expect(name, false, 0, 0, "no exception");
  }

 private:
  std::string suite_;
  std::vector<CheckOutcome>& out_;
};

/// Expected values frozen by the independent generator. Rows are matched by
/// id; the input hash guards against a row being edited or moved.
class FixtureFile {
 public:
  FixtureFile(const std::string& dir, const std::string& name, SuiteRun& run) : file_(name + ".csv"), run_(run) {
    try {
      const auto table = read_csv(dir + "/" + file_);
      if (table.empty() || table[0] != std::vector<std::string>{"id", "input_hash", "expected", "tolerance"}) {
        throw MissingArtifact("bad header");
      }
      for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& r = table[i];
        if (r.size() != 4) throw MissingArtifact(cat("row ", i, " has ", r.size(), " fields"));
        std::size_t used = 0;
        Row row{r[1], std::stod(r[2], &used), 0.0, false};
        if (used != r[2].size()) throw MissingArtifact(cat("row ", i, " expected value is not a number"));
        row.tolerance = std::stod(r[3], &used);
        if (used != r[3].size() || !(row.tolerance >= 0.0)) throw MissingArtifact(cat("row ", i, " bad tolerance"));
        if (!rows_.emplace(r[0], row).second) throw MissingArtifact(cat("duplicate id ", r[0]));
      }
    } catch (const std::exception& e) {
      broken_ = true;
      run_.expect("fixture " + file_, false, 0, 0, cat("fixture ", file_, " unreadable: ", e.what()));
    }
  }

  void check(const std::string& id, const std::string& desc, double computed) {
    if (broken_) return;
    const auto it = rows_.find(id);
    const std::string name = cat(file_, ":", id);
    if (it == rows_.end()) {
      run_.expect(name, false, 0, 0, cat("fixture ", file_, " lacks row ", id));
      return;
    }
    it->second.seen = true;
    if (it->second.hash != hex64(fnv1a64(desc))) {
      run_.expect(name, false, 0, 0, cat("fixture ", file_, " row ", id, " input hash mismatch"));
      return;
    }
    const double err = std::abs(computed - it->second.expected);
    run_.expect(name, err <= it->second.tolerance, err, it->second.tolerance,
                err <= it->second.tolerance ? ""
                                            : cat("fixture ", file_, " row ", id, ": computed ", format_double(computed),
                                                  " expected ", format_double(it->second.expected)));
  }

  ~FixtureFile() {
    if (broken_) return;
    for (const auto& [id, row] : rows_) {
      if (!row.seen) run_.expect(cat(file_, ":", id), false, 0, 0, cat("fixture ", file_, " has unknown row ", id));
    }
  }

 private:
  struct Row {
    std::string hash;
    double expected;
    double tolerance;
    bool seen;
  };
  std::string file_;
  SuiteRun& run_;
  std::map<std::string, Row> rows_;
  bool broken_ = false;
};

NoiseSchedule default_linear() { return make_linear_schedule(1000, 1e-4, 2e-2); }

Array probe_array(Shape shape, int salt, double offset = 0.0, double scale = 1.0) {
  Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = probe(static_cast<long>(i), salt) * scale + offset;
  return a;
}

Array squared_probe_array(Shape shape, int salt, double scale = 1.0) {
  Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = probe(static_cast<long>(i * i), salt) * scale;
  return a;
}

Array random_array(Shape shape, Rng& rng) { return sample_normal(shape, rng); }

double max_abs(const Array& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------- schedule

void suite_schedule(const std::string& dir, SuiteRun& run) {
  const NoiseSchedule s = default_linear();
  const NoiseSchedule z = rescale_zero_terminal_snr(s);
  {
    FixtureFile fx(dir, "schedule", run);
    for (int t : {1, 500, 1000})
      fx.check(cat("alpha_bar_t", t), cat("linear:n=1000:b0=1e-4:b1=2e-2:t=", t), s.alpha_bar(t));
    for (int t : {1, 500, 999, 1000})
      fx.check(cat("zt_sqrt_alpha_bar_t", t), cat("zt:linear:n=1000:b0=1e-4:b1=2e-2:t=", t), z.signal(t));
  }
  run.expect("zero terminal signal is exact", z.signal(1000) == 0.0 && z.alpha_bar(1000) == 0.0, z.signal(1000));
  run.expect("terminal beta is one", z.beta(1000) == 1.0, z.beta(1000));
  run.expect("terminal snr is zero", snr(z, 1000) == 0.0, snr(z, 1000));
  run.at_most("first signal pinned", std::abs(z.signal(1) - s.signal(1)), 1e-15);
  bool decreasing = true;
  for (int t = 1; t < 1000; ++t) decreasing = decreasing && z.alpha_bar(t + 1) < z.alpha_bar(t);
  run.expect("rescaled alpha_bar strictly decreasing", decreasing);
  run.expect("alpha_bar(0) is clean", s.alpha_bar(0) == 1.0 && z.alpha_bar(0) == 1.0);
  run.throws<StateError>("second rescale rejected", [&] { (void)rescale_zero_terminal_snr(z); });
  run.throws<InvalidArgument>("timestep out of range rejected", [&] { s.check_timestep(1001); });

  Rng a(7), b(7);
  const Array plain = sample_normal({5, 3}, a);
  const Array off = sample_offset_noise({5, 3}, OffsetNoiseConfig{0.0}, b);
  run.expect("offset strength 0 matches plain noise", plain == off && a.next_u64() == b.next_u64());
  Rng c(9);
  const Array o = sample_offset_noise({4000, 8}, OffsetNoiseConfig{0.5}, c);
  // Within-row covariance of offset noise is s^2 between distinct columns.
  double cross = 0.0;
  for (std::size_t r = 0; r < o.dim(0); ++r) cross += o(r, 0) * o(r, 1);
  cross /= static_cast<double>(o.dim(0));
  run.at_most("offset noise column covariance", std::abs(cross - 0.25), 4.0 * std::sqrt(1.25 * 1.25 / 4000.0));
}

// --------------------------------------------------------------------- bgn

void suite_bgn(const std::string& dir, SuiteRun& run) {
  const NoiseSchedule s = default_linear();
  {
    FixtureFile fx(dir, "bgn", run);
    const Array vt = probe_array({1, 4}, 1), vc = probe_array({1, 4}, 2), eps = probe_array({1, 4}, 3);
    const PairedSample p{vt, vc, eps};
    for (auto [tm, tn, t] : {std::array{600, 990, 990}, std::array{600, 990, 795}, std::array{0, 700, 350},
                             std::array{600, 990, 599}}) {
      const BiasedNoiseSpec spec{tm, tn, RampKind::linear};
      const Array e = biased_noise(spec, s, p, t);
      const Array f = forward_biased(spec, s, p, t);
      for (int j = 0; j < 4; ++j) {
        const std::string desc = cat("bgn:linear:n=1000:tm=", tm, ":tn=", tn, ":t=", t, ":j=", j, ":probe=1,2,3");
        const std::string tag = cat("tm", tm, "_tn", tn, "_t", t, "_", j);
        fx.check("eps_prime_" + tag, desc + ":eps_prime", e[static_cast<std::size_t>(j)]);
        fx.check("forward_" + tag, desc + ":forward", f[static_cast<std::size_t>(j)]);
      }
    }
  }
  run.expect("knots exact over 1000 instances", bgn_knot_error(1000, 11) == 0.0, bgn_knot_error(1000, 11), 0.0);

  Rng rng(3);
  const Array v = random_array({6, 5}, rng), eps = random_array({6, 5}, rng);
  const PairedSample same{v, v, eps};
  bool identical = true;
  for (int t : {1, 250, 600, 800, 1000}) {
    identical = identical && biased_noise(BiasedNoiseSpec{600, 990}, s, same, t) == eps &&
                forward_biased(BiasedNoiseSpec{600, 990}, s, same, t) == forward_standard(s, v, eps, t);
  }
  run.expect("equal condition and target give standard noise bitwise", identical);
  run.throws<NumericError>("bias coefficient undefined at t=0", [&] { (void)bias_coefficient(s, 0); });
  run.throws<InvalidArgument>("inverted window rejected", [&] { BiasedNoiseSpec{700, 600}.validate(s); });

  // An exact eps' teacher through the bridge sampler lands on the target.
  const BiasedNoiseSpec spec{600, 990};
  const Array vt = random_array({8, 4}, rng), vc = random_array({8, 4}, rng);
  Rng draw(21), replay(21);
  const Array shared = sample_normal(vt.shape(), replay);
  const BiasedNoiseTeacher teacher(PairedSample{vt, vc, shared}, spec, s);
  const ConditionTokens none(std::vector<Array>{Array({8, 1, 1})});
  const Array out = sample_bgn(teacher, vc, none, spec, GuidanceSpec::conditional(), SamplerConfig{}, s, draw);
  run.at_most("exact teacher recovers target through bridge sampler", max_abs_diff(out, vt), 1e-9);
}

// ---------------------------------------------------------------------- nn

McaWeights probe_mca() {
  McaWeights w;
  w.d = 4;
  w.w_q = probe_array({5, 4}, 12);
  w.b_q = probe_array({4}, 13);
  w.w_k = {probe_array({3, 4}, 14), probe_array({3, 4}, 16)};
  w.w_v = {probe_array({3, 4}, 15), probe_array({3, 4}, 17)};
  return w;
}

// Plain Eigen re-computation of the denoiser forward pass.
Array reference_forward(const Denoiser& m, const Array& x, const std::vector<int>& t, const ConditionTokens& cond) {
  const ModelConfig& c = m.config();
  const auto mat = [&](const std::string& n) { return to_matrix(m.params().at(n)); };
  const auto vec = [&](const std::string& n) {
    const Array& a = m.params().at(n);
    return Eigen::RowVectorXd(Eigen::Map<const Eigen::RowVectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
  };
  Array out({x.dim(0), c.x_dim});
  for (std::size_t r = 0; r < x.dim(0); ++r) {
    Eigen::RowVectorXd in(static_cast<Eigen::Index>(c.x_dim + c.time_dim));
    for (std::size_t j = 0; j < c.x_dim; ++j) in(static_cast<Eigen::Index>(j)) = x(r, j);
    const std::size_t half = c.time_dim / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double a = 1000.0 * t[r] / c.n_steps * std::pow(10000.0, -static_cast<double>(i) / half);
      in(static_cast<Eigen::Index>(c.x_dim + i)) = std::sin(a);
      in(static_cast<Eigen::Index>(c.x_dim + half + i)) = std::cos(a);
    }
    const Eigen::RowVectorXd h1 = (in * mat("trunk.w1") + vec("trunk.b1")).array().tanh().matrix();
    const Eigen::RowVectorXd h2 = (h1 * mat("trunk.w2") + vec("trunk.b2")).array().tanh().matrix();
    const Eigen::RowVectorXd q = h2 * mat("mca.w_q") + vec("mca.b_q");
    Eigen::RowVectorXd attn = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(c.attn_dim));
    for (std::size_t i = 0; i < cond.count(); ++i) {
      const std::size_t k = c.tokens_per_stream[i];
      Eigen::MatrixXd tok(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c.cond_dim));
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < c.cond_dim; ++b)
          tok(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cond.streams[i][(r * k + a) * c.cond_dim + b];
      const Eigen::MatrixXd keys = tok * mat(cat("mca.w_k.", i));
      const Eigen::MatrixXd vals = tok * mat(cat("mca.w_v.", i));
      Eigen::VectorXd sc = keys * q.transpose() / std::sqrt(static_cast<double>(c.attn_dim));
      sc = (sc.array() - sc.maxCoeff()).exp();
      sc /= sc.sum();
      attn += sc.transpose() * vals;
    }
    Eigen::RowVectorXd cat_h(h2.size() + attn.size());
    cat_h << h2, attn;
    const Eigen::RowVectorXd h3 = (cat_h * mat("head.w3") + vec("head.b3")).array().tanh().matrix();
    const Eigen::RowVectorXd o = h3 * mat("head.w_out") + vec("head.b_out");
    for (std::size_t j = 0; j < c.x_dim; ++j) out(r, j) = o(static_cast<Eigen::Index>(j));
  }
  return out;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.x_dim = 3;
  c.hidden = 6;
  c.time_dim = 4;
  c.attn_dim = 4;
  c.cond_dim = 3;
  c.tokens_per_stream = {3, 2};
  c.kind = PredictionKind::v;
  return c;
}

ConditionTokens random_tokens(const ModelConfig& c, std::size_t b, Rng& rng) {
  std::vector<Array> streams;
  for (std::size_t k : c.tokens_per_stream) streams.push_back(random_array({b, k, c.cond_dim}, rng));
  return ConditionTokens(std::move(streams));
}

void suite_nn(const std::string& dir, SuiteRun& run) {
  {
    FixtureFile fx(dir, "nn", run);
    const Array e = time_embedding(500, 4, 1000);
    for (int i = 0; i < 4; ++i) fx.check(cat("time_embedding_", i), cat("temb:t=500:dim=4:n=1000:i=", i), e[i]);
    const McaWeights w = probe_mca();
    const ConditionTokens cond(std::vector<Array>{probe_array({2, 3, 3}, 18), probe_array({2, 2, 3}, 19)});
    const Array out = mca_forward(w, probe_array({2, 5}, 11), cond);
    for (int b = 0; b < 2; ++b)
      for (int j = 0; j < 4; ++j)
        fx.check(cat("mca_", b, "_", j), cat("mca:B=2:dm=5:d=4:dc=3:KT=3:KI=2:probe=11..19:b=", b, ":j=", j),
                 out(static_cast<std::size_t>(b), static_cast<std::size_t>(j)));
  }
  const Array e0 = time_embedding(0, 8, 1000);
  bool clean = true;
  for (int i = 0; i < 4; ++i) clean = clean && e0[i] == 0.0 && e0[i + 4] == 1.0;
  run.expect("time embedding at t=0", clean);
  run.throws<InvalidArgument>("odd embedding width rejected", [] { (void)time_embedding(3, 5, 1000); });

  Rng rng(5);
  McaWeights one;
  one.d = 4;
  one.w_q = random_array({5, 4}, rng);
  one.b_q = random_array({4}, rng);
  one.w_k = {random_array({3, 4}, rng)};
  one.w_v = {random_array({3, 4}, rng)};
  const Array f = random_array({6, 5}, rng);
  const Array tok = random_array({6, 4, 3}, rng);
  const Array single = mca_forward(one, f, ConditionTokens(std::vector<Array>{tok}));
  McaWeights mirrored = one;
  mirrored.w_k.push_back(one.w_k[0]);
  mirrored.w_v.push_back(one.w_v[0]);
  const Array doubled = mca_forward(mirrored, f, ConditionTokens(std::vector<Array>{tok, tok}));
  run.expect("mirrored streams double the output exactly", doubled == 2.0 * single, max_abs_diff(doubled, 2.0 * single));

  ConditionTokens with_drop(std::vector<Array>{tok, random_array({6, 2, 3}, rng)});
  with_drop.drop(1);
  run.expect("dropped stream contributes zero", mca_forward(mirrored, f, with_drop) == single);

  const Array one_tok = random_array({6, 1, 3}, rng);
  const Array k1 = mca_forward(one, f, ConditionTokens(std::vector<Array>{one_tok}));
  const Array vrow = from_matrix(to_matrix(one_tok.reshaped({6, 3})) * to_matrix(one.w_v[0]));
  run.at_most("single token returns its value row", max_abs_diff(k1, vrow), 1e-12);

  Array perm = tok;
  for (std::size_t b = 0; b < 6; ++b)
    for (std::size_t p = 0; p < 3; ++p) {
      std::swap(perm[(b * 4 + 0) * 3 + p], perm[(b * 4 + 3) * 3 + p]);
      std::swap(perm[(b * 4 + 1) * 3 + p], perm[(b * 4 + 2) * 3 + p]);
    }
  run.at_most("token permutation leaves output unchanged",
              max_abs_diff(mca_forward(one, f, ConditionTokens(std::vector<Array>{perm})), single), 1e-12);

  const McaWeights ext = mca_extend(one, 1);
  const Array extended = mca_forward(ext, f, ConditionTokens(std::vector<Array>{tok, tok}));
  run.expect("extended stream copies stream 0", ext.streams() == 2 && ext.w_k[1] == one.w_k[0] &&
                                                    ext.w_v[1] == one.w_v[0] && ext.w_k[0] == one.w_k[0]);
  run.at_most("extension adds the stream-0 term", max_abs_diff(extended, single + single), 1e-12);
  run.expect("extend by 2 adds two streams", mca_extend(one, 2).streams() == 3);

  // Softmax rows.
  Array logits = random_array({50, 7}, rng);
  for (double& v : logits.values()) v *= 30.0;
  softmax_rows(logits.data(), 50, 7);
  double worst = 0.0;
  for (std::size_t r = 0; r < 50; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 7; ++c) sum += logits(r, c);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  run.at_most("softmax rows sum to one", worst, 1e-12);

  const ModelConfig cfg = tiny_config();
  Rng init(17);
  const Denoiser model(cfg, init);
  const Array x = random_array({5, cfg.x_dim}, rng);
  const std::vector<int> ts{1, 200, 500, 999, 1000};
  const ConditionTokens cond = random_tokens(cfg, 5, rng);
  const Array fwd = model.forward(x, ts, cond);
  run.at_most("forward matches independent re-computation", max_abs_diff(fwd, reference_forward(model, x, ts, cond)),
              1e-12);
  run.expect("repeated forward is bit-identical", model.forward(x, ts, cond) == fwd);
  Denoiser zeroed = model;
  zeroed.params().at("head.w_out").fill(0.0);
  zeroed.params().at("head.b_out").fill(0.0);
  run.expect("zeroed head gives zero output", max_abs(zeroed.forward(x, ts, cond)) == 0.0);

  const double gerr = gradient_check(cfg, 23);
  run.at_most("gradient matches finite differences", gerr, 1e-6);
  Recording rec = model.record(x, ts, cond);
  const ParameterStore zg = rec.backward(Array(fwd.shape()));
  bool all_zero = true;
  for (std::size_t i = 0; i < zg.size(); ++i) all_zero = all_zero && max_abs(zg.value(i)) == 0.0;
  run.expect("zero loss gradient gives zero parameter gradients", all_zero);
  run.throws<StateError>("backward without forward rejected", [] {
    Recording empty;
    (void)empty.backward(Array({1}));
  });

  // Sum rule: y = a*a + a, dy/da = 2a + 1.
  Tape tape;
  const Array av = random_array({4}, rng);
  const Tape::Var a = tape.leaf(av, true);
  const Tape::Var y = tape.add(tape.mul(a, a), a);
  tape.backward(y, Array({4}, 1.0));
  Array expect_g(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) expect_g[i] = 2.0 * av[i] + 1.0;
  run.at_most("reused input accumulates gradient", max_abs_diff(tape.grad(a), expect_g), 1e-14);
}

// ---------------------------------------------------------------- guidance

void suite_guidance(const std::string& dir, SuiteRun& run) {
  const NoiseSchedule s = default_linear();
  {
    FixtureFile fx(dir, "guidance", run);
    const Array x0 = probe_array({1, 3}, 61), eps = probe_array({1, 3}, 62);
    const Array v = from_x0_eps(x0, eps, PredictionKind::v, 420, s);
    const Array xt = forward_standard(s, x0, eps, 420);
    for (int j = 0; j < 3; ++j) {
      fx.check(cat("v_target_", j), cat("v:linear:n=1000:t=420:probe=61,62:j=", j), v[static_cast<std::size_t>(j)]);
      fx.check(cat("x_t_", j), cat("xt:linear:n=1000:t=420:probe=61,62:j=", j), xt[static_cast<std::size_t>(j)]);
    }
  }
  Rng rng(8);
  double worst = 0.0;
  for (const NoiseSchedule* sched : {&s}) {
    for (int t : {1, 37, 420, 900, 1000}) {
      const Array x0 = random_array({16, 3}, rng), eps = random_array({16, 3}, rng);
      const Array xt = forward_standard(*sched, x0, eps, t);
      for (PredictionKind k : {PredictionKind::epsilon, PredictionKind::v, PredictionKind::x0}) {
        const Array p = from_x0_eps(x0, eps, k, t, *sched);
        worst = std::max(worst, max_abs_diff(to_x0(p, k, xt, t, *sched), x0));
        worst = std::max(worst, max_abs_diff(to_epsilon(p, k, xt, t, *sched), eps));
        worst = std::max(worst, max_abs_diff(to_v(p, k, xt, t, *sched), from_x0_eps(x0, eps, PredictionKind::v, t, *sched)));
      }
    }
  }
  run.at_most("prediction-space round trips", worst, 1e-12);

  const NoiseSchedule z = rescale_zero_terminal_snr(s);
  const Array xt = random_array({4, 3}, rng);
  run.throws<NumericError>("epsilon cannot give x0 without signal",
                           [&] { (void)to_x0(xt, PredictionKind::epsilon, xt, 1000, z); });
  const Array vz = random_array({4, 3}, rng);
  run.expect("v at zero signal gives x0 = -v exactly", to_x0(vz, PredictionKind::v, xt, 1000, z) == -1.0 * vz);

  const Array u = random_array({4, 3}, rng), c1 = random_array({4, 3}, rng), c2 = random_array({4, 3}, rng);
  run.expect("zero weights give the unconditional output", combine_cfg(u, {{c1, 0.0}, {c2, 0.0}}) == u);
  run.at_most("unit weight on one stream gives its output", max_abs_diff(combine_cfg(u, {{c1, 1.0}}), c1), 1e-15);
  // Guidance combined in v space equals the combination done in eps space.
  const int t = 600;
  const Array cv = combine_cfg(u, {{c1, 1.5}, {c2, 0.75}});
  const auto eps_of = [&](const Array& p) { return to_epsilon(p, PredictionKind::v, xt, t, s); };
  const Array ce = combine_cfg(eps_of(u), {{eps_of(c1), 1.5}, {eps_of(c2), 0.75}});
  run.at_most("guidance space independence", max_abs_diff(eps_of(cv), ce), 1e-12);
  run.throws<InvalidArgument>("guidance on a missing stream rejected",
                              [] { GuidanceSpec{{{3, 1.0}}, false}.validate(2); });
}

// ----------------------------------------------------------------- sampler

GaussianSpec probe_gaussian() {
  GaussianSpec g;
  g.mean = Eigen::Vector2d(0.5, -1.0);
  g.cov.resize(2, 2);
  g.cov << 1.0, 0.3, 0.3, 0.5;
  return g;
}

void suite_sampler(const std::string& dir, SuiteRun& run) {
  const NoiseSchedule s = default_linear();
  const NoiseSchedule z = rescale_zero_terminal_snr(s);
  const ConditionTokens none;
  Rng rng(4);
  {
    FixtureFile fx(dir, "sampler", run);
    const GaussianOracle oracle(probe_gaussian(), s);
    SamplerConfig sc;
    sc.steps = 5;
    const Array out = reverse_from(oracle, probe_array({1, 2}, 21), timestep_grid(sc, 1000), none,
                                   GuidanceSpec::conditional(), sc, s, rng);
    for (int j = 0; j < 2; ++j)
      fx.check(cat("ddim_gaussian_", j), cat("ddim:linear:n=1000:steps=5:mu=0.5,-1:cov=1,0.3,0.5:probe=21:j=", j),
               out[static_cast<std::size_t>(j)]);
  }
  const std::vector<int> grid = timestep_grid(SamplerConfig{}, 1000);
  bool strict = grid.size() == 50 && grid.front() == 1000 && grid.back() == 1;
  for (std::size_t i = 1; i < grid.size(); ++i) strict = strict && grid[i] < grid[i - 1];
  run.expect("50-step grid spans N..1", strict, static_cast<double>(grid.size()));
  SamplerConfig part;
  part.start_fraction = 0.7;
  part.steps = 35;
  run.expect("partial start at floor(0.7 N)", timestep_grid(part, 1000).front() == 700);

  // Exact noise teacher: the deterministic sampler reproduces x0.
  for (const NoiseSchedule* sched : {&s, &z}) {
    const Array x0 = random_array({8, 3}, rng), eps = random_array({8, 3}, rng);
    const ExactEpsTeacher teacher(eps);
    const Array xn = forward_standard(*sched, x0, eps, 1000);
    const Array out = reverse_from(teacher, xn, grid, none, GuidanceSpec::conditional(), SamplerConfig{}, *sched, rng);
    // Without terminal signal the epsilon model cannot see x0 at t = N, so
    // only the plain schedule gives an exact round trip.
    if (sched == &s) run.at_most("exact noise teacher recovers x0", max_abs_diff(out, x0), 1e-9);
  }

  // The 50-step first-order sampler itself shrinks the covariance by a few
  // percent, so samples are compared with the sampler's exact output law;
  // the gap between that law and the target is reported by the acceptance
  // run.
  for (const auto& [sched, tag] : {std::pair{&s, ""}, std::pair{&z, ", zero terminal SNR"}}) {
    const GaussianSamplingResult r = gaussian_sampling_check(*sched, 50, 10000, 31);
    run.at_most(cat("gaussian oracle sampling mean", tag, " (SE)"), r.mean_error_se, 4.0);
    run.at_most(cat("gaussian oracle sampling mean vs sampler law", tag, " (SE)"), r.mean_vs_predicted_se, 4.0);
    run.at_most(cat("gaussian oracle sampling trace vs sampler law", tag, " (SE)"), r.trace_vs_predicted_se, 4.0);
  }
  const GaussianSamplingResult fine = gaussian_sampling_check(s, 1000, 10000, 32);
  run.at_most("gaussian oracle full-grid sampling trace", fine.trace_rel_error, 0.05);

  const GaussianOracle oracle(probe_gaussian(), s);
  const ConditionTokens rows(std::vector<Array>{Array({64, 1, 1})});
  Rng a(99), b(99);
  SamplerConfig anc;
  anc.kind = SamplerKind::ancestral;
  const Array sa = sample(oracle, rows, GuidanceSpec::conditional(), anc, s, std::nullopt, a, 2);
  const Array sb = sample(oracle, rows, GuidanceSpec::conditional(), anc, s, std::nullopt, b, 2);
  run.expect("ancestral sampling is reproducible", sa == sb);
  SamplerConfig eta0 = anc;
  eta0.eta = 0.0;
  Rng c(5), d(5);
  const Array e0 = sample(oracle, rows, GuidanceSpec::conditional(), eta0, s, std::nullopt, c, 2);
  const Array dd = sample(oracle, rows, GuidanceSpec::conditional(), SamplerConfig{}, s, std::nullopt, d, 2);
  run.at_most("ancestral with eta 0 is the deterministic sampler", max_abs_diff(e0, dd), 1e-12);
  run.throws<InvalidArgument>("editing at start fraction 1 rejected", [&] {
    Rng r(1);
    (void)editing_baseline(oracle, Array({64, 2}), rows, GuidanceSpec::conditional(), SamplerConfig{}, s, r);
  });
}

// ------------------------------------------------------------------ oracle

void suite_oracle(const std::string& dir, SuiteRun& run) {
  const NoiseSchedule s = default_linear();
  FixtureFile fx(dir, "oracle", run);
  GaussianSpec diag;
  diag.mean = Eigen::Vector3d(0.3, -0.7, 1.1);
  diag.cov = Eigen::Vector3d(0.5, 2.0, 1.3).asDiagonal();
  const Array xt({1, 3}, {0.9, -0.4, 0.2});
  const Array x0 = optimal_x0_prediction(diag, xt, 300, s);
  const Array eps = optimal_eps_prediction(diag, xt, 300, s);
  for (int i = 0; i < 3; ++i) {
    const std::string desc = cat("quad:linear:n=1000:t=300:mu=0.3,-0.7,1.1:var=0.5,2,1.3:xt=0.9,-0.4,0.2:i=", i);
    fx.check(cat("posterior_x0_", i), desc + ":x0", x0[static_cast<std::size_t>(i)]);
    fx.check(cat("posterior_eps_", i), desc + ":eps", eps[static_cast<std::size_t>(i)]);
  }

  GaussianSpec joint;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = probe(i * 4 + j, 31);
  joint.cov = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(4, 4);
  joint.mean.resize(4);
  for (int j = 0; j < 4; ++j) joint.mean(j) = probe(j, 32);
  const Eigen::Vector2d cstar = joint.mean.head(2) + Eigen::Vector2d(0.4, -0.3);
  const GaussianSpec given = gaussian_conditional_transfer(joint, 2).given(cstar);
  for (int k = 0; k < 2; ++k) {
    const std::string desc = cat("mc_transfer:probe=31,32:cstar=+0.4,-0.3:k=", k);
    fx.check(cat("transfer_mean_", k), desc + ":mean", given.mean(k));
    fx.check(cat("transfer_var_", k), desc + ":var", given.cov(k, k));
  }
  GaussianSpec singular = joint;
  singular.cov.row(1) = singular.cov.row(0);
  singular.cov.col(1) = singular.cov.col(0);
  run.throws<Error>("singular condition block rejected", [&] { (void)gaussian_conditional_transfer(singular, 2); });

  // Teacher eps' matches the definition it is meant to recover.
  Rng rng(2);
  const BiasedNoiseSpec spec{600, 990};
  const PairedSample p{random_array({3, 4}, rng), random_array({3, 4}, rng), random_array({3, 4}, rng)};
  double worst = 0.0;
  for (int t : {1, 600, 800, 990, 1000})
    worst = std::max(worst, max_abs_diff(teacher_eps_prime(p, spec, s, t), biased_noise(spec, s, p, t)));
  run.at_most("teacher eps' equals biased noise", worst, 1e-12);

  // The optimal noise prediction is the conditional mean: residuals against
  // the true noise are uncorrelated with x_t.
  const GaussianSpec g = probe_gaussian();
  Rng draw(6);
  const std::size_t n = 20000;
  const Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
  Array clean({n, 2});
  for (std::size_t r = 0; r < n; ++r) {
    const Eigen::Vector2d zr(draw.normal(), draw.normal());
    const Eigen::Vector2d v = g.mean + llt.matrixL() * zr;
    clean(r, 0) = v(0);
    clean(r, 1) = v(1);
  }
  const Array noise = sample_normal({n, 2}, draw);
  const Array noisy = forward_standard(s, clean, noise, 500);
  const Array resid = noise - optimal_eps_prediction(g, noisy, 500, s);
  double corr = 0.0;
  for (std::size_t r = 0; r < n; ++r) corr += resid(r, 0) * noisy(r, 0);
  corr /= static_cast<double>(n);
  run.at_most("optimal residual orthogonal to input", std::abs(corr), 4.0 / std::sqrt(static_cast<double>(n)));
}

// ----------------------------------------------------------------- metrics

void suite_metrics(const std::string& dir, SuiteRun& run) {
  {
    FixtureFile fx(dir, "metrics", run);
    Rng rng(41);
    Array a({10000, 1}), b({10000, 1});
    for (std::size_t i = 0; i < 10000; ++i) a[i] = 0.5 + 1.2 * rng.normal();
    for (std::size_t i = 0; i < 10000; ++i) b[i] = -0.3 + 0.7 * rng.normal();
    fx.check("frechet_1d_closed_form", "frechet1d:m1=0.5:s1=1.2:m2=-0.3:s2=0.7:n=10000", frechet_distance(a, b));
    fx.check("paired_mse_probe", "paired_mse:7x3:probe=41,42",
             paired_mse(probe_array({7, 3}, 41), probe_array({7, 3}, 42)));
    fx.check("energy_probe", "energy:6x2,5x2:probe=43,44+0.5",
             energy_distance(probe_array({6, 2}, 43), probe_array({5, 2}, 44, 0.5)));
    fx.check("frechet_probe", "frechet:9x4,11x4:probe=45,46*1.3:squared",
             frechet_distance(squared_probe_array({9, 4}, 45), squared_probe_array({11, 4}, 46, 1.3)));
  }
  Rng rng(13);
  const Array x = random_array({500, 4}, rng);
  Array y = random_array({400, 4}, rng);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.8 * y[i] + 0.3;
  run.at_most("frechet self-distance", std::abs(frechet_distance(x, x)), 1e-8);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return rng.normal(); }));
  const Eigen::MatrixXd q = qr.householderQ();
  const Array xr = from_matrix(to_matrix(x) * q), yr = from_matrix(to_matrix(y) * q);
  run.at_most("frechet rotation invariance", std::abs(frechet_distance(xr, yr) - frechet_distance(x, y)), 1e-8);

  run.at_most("energy distance symmetric", std::abs(energy_distance(x, y) - energy_distance(y, x)), 1e-12);
  // Against itself the only non-cancelling part is the zero diagonal of the
  // cross term: ED(x, x) = -2 U / n with U the mean off-diagonal distance.
  double within = 0.0;
  const std::size_t nx = 200;
  const Array xs = x.slice_rows(0, nx);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < 4; ++k) d2 += (xs(i, k) - xs(j, k)) * (xs(i, k) - xs(j, k));
      within += std::sqrt(d2);
    }
  within /= static_cast<double>(nx * (nx - 1));
  run.at_most("energy self-distance without diagonal terms",
              std::abs(energy_distance(xs, xs) + 2.0 * within / static_cast<double>(nx)), 1e-12);
  const Array x2 = random_array({300, 4}, rng), x3 = random_array({300, 4}, rng);
  Rng perm(3);
  const PermutationResult same = energy_permutation_test(x2, x3, 400, perm);
  run.expect("same-distribution statistic inside permutation band", same.statistic <= same.threshold,
             same.statistic, same.threshold);
  const PermutationResult diff = energy_permutation_test(x2, y.slice_rows(0, 300), 400, perm);
  run.expect("shifted distribution outside permutation band", diff.statistic > diff.threshold, diff.statistic,
             diff.threshold);

  run.expect("constant signal has zero sharpness", sharpness_proxy(Array({3, 16}, 2.5), TaskKind::sr1d) == 0.0);
  Array alt({1, 16});
  for (std::size_t i = 0; i < 16; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  run.at_most("alternating signal sharpness is 4", std::abs(sharpness_proxy(alt, TaskKind::sr1d) - 4.0), 1e-15);
  run.throws<InvalidArgument>("gauss2d has no sharpness proxy",
                              [] { (void)sharpness_proxy(Array({2, 2}), TaskKind::gauss2d); });
  run.at_most("paired mse of identical batches", paired_mse(x, x), 0.0);
}

// -------------------------------------------------------------------- data

void suite_data(const std::string& dir, SuiteRun& run) {
  const DegradationSpec deg;
  {
    FixtureFile fx(dir, "data", run);
    const Array out = degrade(probe_array({1, 16}, 51), deg);
    for (int j = 0; j < 16; ++j)
      fx.check(cat("degrade_", j), cat("degrade:w=5:sigma=1:stride=2:probe=51:j=", j), out[static_cast<std::size_t>(j)]);
  }
  const auto means = class_means(4);
  run.expect("class means on the unit circle axes", means[0] == std::array{1.0, 0.0} && means[1] == std::array{0.0, 1.0} &&
                                                        means[2] == std::array{-1.0, 0.0} &&
                                                        means[3] == std::array{0.0, -1.0});
  Rng rng(12);
  const Array a = random_array({20, 16}, rng), b = random_array({20, 16}, rng);
  run.at_most("degradation is linear",
              max_abs_diff(degrade(axpby(0.7, a, -1.3, b), deg), axpby(0.7, degrade(a, deg), -1.3, degrade(b, deg))),
              1e-12);
  run.at_most("constant signals pass through degradation", max_abs_diff(degrade(Array({2, 16}, 0.75), deg), Array({2, 16}, 0.75)),
              1e-15);
  run.throws<InvalidArgument>("stride must divide length", [] { (void)degrade(Array({1, 15}), DegradationSpec{}); });

  TaskSpec g = default_task(TaskKind::gauss2d);
  Rng gr(1);
  const std::size_t n = 100000;
  const TaskBatch gb = gen_gauss2d(g, n, gr);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& mu = means[static_cast<std::size_t>(gb.labels[r])];
    m0 += gb.target(r, 0) - gb.anchors(r, 0) - mu[0];
    m1 += gb.target(r, 1) - gb.anchors(r, 1) - mu[1];
  }
  const double se = 0.1 / std::sqrt(static_cast<double>(n));
  run.at_most("gauss2d conditional mean", std::max(std::abs(m0), std::abs(m1)) / n, 4.0 * se);
  Rng g1(44), g2(44);
  run.expect("gauss2d generation is seed-deterministic", gen_gauss2d(g, 50, g1).target == gen_gauss2d(g, 50, g2).target);

  const TaskSpec sr = default_task(TaskKind::sr1d);
  Rng sr_rng(2);
  const TaskBatch sb = gen_sr1d(sr, 1000, sr_rng);
  bool softer = true;
  for (std::size_t r = 0; r < 1000; ++r) {
    const Array tr = sb.target.slice_rows(r, r + 1), cr = sb.condition.slice_rows(r, r + 1);
    softer = softer && first_difference_energy(cr) < first_difference_energy(tr);
  }
  run.expect("sr1d condition is always smoother than its target", softer);

  const TaskSpec tj = default_task(TaskKind::traj);
  Rng tj_rng(3);
  const std::size_t m = 20000;
  const TaskBatch tb = gen_traj(tj, m, tj_rng);
  bool first = true;
  double s2 = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    first = first && tb.target(r, 0) == tb.condition(r, 0) && tb.target(r, 1) == tb.condition(r, 1);
    const double dx = tb.target(r, 14) - tb.target(r, 0);
    s2 += dx * dx;
  }
  s2 /= static_cast<double>(m);
  const double var = 49.0 * tj.velocity_scale * tj.velocity_scale + tj.jitter * tj.jitter;
  run.expect("traj condition frame 0 equals target frame 0", first);
  run.at_most("traj displacement variance", std::abs(s2 - var), 5.0 * var * std::sqrt(2.0 / m));
  TaskSpec still = tj;
  still.velocity_scale = 0.0;
  still.jitter = 0.0;
  Rng st(4);
  const TaskBatch sbatch = gen_traj(still, 10, st);
  run.expect("static trajectories equal their condition", sbatch.target == sbatch.condition);
}

using SuiteFn = void (*)(const std::string&, SuiteRun&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"schedule", suite_schedule}, {"bgn", suite_bgn},         {"nn", suite_nn},           {"guidance", suite_guidance},
      {"sampler", suite_sampler},   {"oracle", suite_oracle},   {"metrics", suite_metrics}, {"data", suite_data}};
  return r;
}

}  // namespace

double bgn_knot_error(std::size_t instances, std::uint64_t seed) {
  const NoiseSchedule base = make_linear_schedule(1000, 1e-4, 2e-2);
  const NoiseSchedule zero = rescale_zero_terminal_snr(base);
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const NoiseSchedule& s = i % 2 ? zero : base;
    const int tm = static_cast<int>(rng.uniform_int(0, 998));
    const int tn = static_cast<int>(rng.uniform_int(tm + 1, 1000));
    const BiasedNoiseSpec spec{tm, tn};
    const std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 16));
    const PairedSample p{random_array({1, d}, rng), random_array({1, d}, rng), random_array({1, d}, rng)};
    worst = std::max({worst, std::abs(bias_ramp(spec, s, tm)), std::abs(bias_ramp(spec, s, tn) - 1.0)});
    if (tm >= 1) worst = std::max(worst, max_abs_diff(forward_biased(spec, s, p, tm), forward_standard(s, p.target, p.eps, tm)));
    worst = std::max(worst, max_abs_diff(forward_biased(spec, s, p, tn), forward_standard(s, p.condition, p.eps, tn)));
  }
  return worst;
}

GaussianSamplingResult gaussian_sampling_check(const NoiseSchedule& s, int steps, std::size_t n, std::uint64_t seed) {
  GaussianSpec g;
  g.mean = Eigen::Vector3d(1.0, -0.5, 0.25);
  g.cov.resize(3, 3);
  g.cov << 0.8, 0.2, -0.1, 0.2, 0.5, 0.05, -0.1, 0.05, 0.3;
  const GaussianOracle oracle(g, s);
  SamplerConfig sc;
  sc.steps = steps;
  Rng rng(seed);
  const ConditionTokens rows(std::vector<Array>{Array({n, 1, 1})});
  const Eigen::MatrixXd x = to_matrix(sample(oracle, rows, GuidanceSpec::conditional(), sc, s, std::nullopt, rng, 3));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n - 1);
  GaussianSamplingResult r;
  for (int j = 0; j < 3; ++j)
    r.mean_error_se = std::max(r.mean_error_se, std::abs(mean(j) - g.mean(j)) / std::sqrt(g.cov(j, j) / n));
  r.trace_rel_error = std::abs(cov.trace() - g.cov.trace()) / g.cov.trace();

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd c = eye;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
  const std::vector<int> grid = timestep_grid(sc, s.n_steps());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ab = s.alpha_bar(grid[i]);
    const double abp = s.alpha_bar(i + 1 < grid.size() ? grid[i + 1] : 0);
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    if (ab == 0.0) {
      a = std::sqrt(1.0 - abp) * eye;
      b = Eigen::VectorXd::Zero(3);
    } else {
      const Eigen::MatrixXd gain = std::sqrt(ab) * g.cov * (ab * g.cov + (1.0 - ab) * eye).inverse();
      const Eigen::MatrixXd rest = eye - std::sqrt(ab) * gain;
      a = std::sqrt(abp) * gain + std::sqrt(1.0 - abp) / std::sqrt(1.0 - ab) * rest;
      b = (std::sqrt(abp) - std::sqrt(1.0 - abp) * std::sqrt(ab) / std::sqrt(1.0 - ab)) * (rest * g.mean);
    }
    m = a * m + b;
    c = a * c * a.transpose();
  }
  for (int j = 0; j < 3; ++j)
    r.mean_vs_predicted_se = std::max(r.mean_vs_predicted_se, std::abs(mean(j) - m(j)) / std::sqrt(c(j, j) / n));
  r.trace_vs_predicted_se = std::abs(cov.trace() - c.trace()) / std::sqrt(2.0 * (c * c).trace() / (n - 1));
  r.predicted_trace_rel_error = std::abs(c.trace() - g.cov.trace()) / g.cov.trace();
  return r;
}

double gradient_check(const ModelConfig& cfg, std::uint64_t seed, double h) {
  Rng rng(seed);
  const Denoiser model(cfg, rng);
  const std::size_t b = 3;
  const Array x = random_array({b, cfg.x_dim}, rng);
  std::vector<int> ts;
  for (std::size_t i = 0; i < b; ++i) ts.push_back(static_cast<int>(rng.uniform_int(1, cfg.n_steps)));
  const ConditionTokens cond = random_tokens(cfg, b, rng);
  const Array seed_grad = random_array({b, cfg.x_dim}, rng);
  Recording rec = model.record(x, ts, cond);
  const ParameterStore grads = rec.backward(seed_grad);
  const auto loss = [&](const Denoiser& m) {
    const Array out = m.forward(x, ts, cond);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) l += out[i] * seed_grad[i];
    return l;
  };
  double worst = 0.0;
  Denoiser probe_model = model;
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    Array& w = probe_model.params().value(p);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double keep = w[k];
      w[k] = keep + h;
      const double up = loss(probe_model);
      w[k] = keep - h;
      const double down = loss(probe_model);
      w[k] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double an = grads.value(p)[k];
      num += (fd - an) * (fd - an);
      den += an * an;
    }
    worst = std::max(worst, den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
  }
  return worst;
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

std::vector<CheckOutcome> run_checks(const std::string& fixture_dir, std::string_view filter) {
  std::vector<CheckOutcome> out;
  for (const auto& [name, fn] : registry()) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    SuiteRun run(name, out);
    try {
      fn(fixture_dir, run);
    } catch (const std::exception& e) {
      run.expect("suite completed", false, 0, 0, cat("aborted: ", e.what()));
    }
  }
  return out;
}

std::string checks_csv(const std::vector<CheckOutcome>& results) {
  CsvTable t({"suite", "check", "passed", "value", "limit", "detail"});
  for (const auto& r : results)
    t.add_row({r.suite, r.name, r.passed ? "1" : "0", format_double(r.value), format_double(r.limit), r.detail});
  return t.str();
}

}  // namespace uvg
