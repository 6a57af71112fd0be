// Acceptance run: one PASS/FAIL line per criterion. Criteria named with
// --xfail are known to fail; the exit status is nonzero when any other
// criterion fails or when an expected failure starts passing.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "uvg/checks.hpp"
#include "uvg/config.hpp"
#include "uvg/csv.hpp"
#include "uvg/experiments.hpp"

using namespace uvg;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

const NoiseSchedule& zsnr() {
  static const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Experiment load(const std::string& name) {
  return resolve_experiment(Config::load(std::string(UVG_CONFIG_DIR) + "/" + name));
}

Verdict knots() {
  double ramp_err = 0.0;
  for (const BiasedNoiseSpec spec : {BiasedNoiseSpec{0, 700}, BiasedNoiseSpec{600, 990}, BiasedNoiseSpec{1, 1000}}) {
    ramp_err = std::max(ramp_err, std::abs(bias_ramp(spec, zsnr(), spec.t_m)));
    ramp_err = std::max(ramp_err, std::abs(bias_ramp(spec, zsnr(), spec.t_n) - 1.0));
  }
  const double err = bgn_knot_error(1000, 2024);
  return {ramp_err == 0.0 && err == 0.0, "ramp knot error " + fmt(ramp_err) + ", continuity error " + fmt(err) +
                                             " over 1000 instances"};
}

Verdict degenerate() {
  // Equal condition and target; the standard and biased runs share every seed.
  const TaskSpec task = default_task(TaskKind::sr1d);
  bool train_same = true, sample_same = true;
  for (auto [plain, biased] : {std::pair{TrainTarget::v, TrainTarget::v_prime},
                               std::pair{TrainTarget::epsilon, TrainTarget::epsilon_prime}}) {
    TrainConfig a, b;
    a.batch_size = b.batch_size = 32;
    a.target = plain;
    b.target = biased;
    b.bgn = BiasedNoiseSpec{0, 700};
    Rng ia(1), ib(1);
    Denoiser ma(model_config_for(task, a, 1000), ia), mb(model_config_for(task, b, 1000), ib);
    AdamState sa = adam_init(ma.params()), sb = adam_init(mb.params());
    Rng da(2), na(3), db(2), nb(3);
    for (int i = 0; i < 200; ++i) {
      const TaskBatch x = generate(task, 32, da), y = generate(task, 32, db);
      const double la = train_step(ma, TrainBatch{x.target, x.target, x.tokens}, a, zsnr(), sa, na);
      const double lb = train_step(mb, TrainBatch{y.target, y.target, y.tokens}, b, zsnr(), sb, nb);
      train_same = train_same && la == lb;
    }
    train_same = train_same && ma.params() == mb.params();

    Rng er(4);
    const TaskBatch eval = generate(task, 200, er);
    const SamplerConfig sc;
    Rng sa_rng(5), sb_rng(5);
    const Array s1 = sample(ma, eval.tokens, GuidanceSpec::conditional(), sc, zsnr(), std::nullopt, sa_rng, task.dims);
    const Array s2 = sample_bgn(mb, eval.target, eval.tokens, BiasedNoiseSpec{0, 700}, GuidanceSpec::conditional(), sc,
                                zsnr(), sb_rng, BgnStepper::plain);
    sample_same = sample_same && s1 == s2;
  }
  return {train_same && sample_same, std::string("training ") + (train_same ? "bit-identical" : "differs") +
                                         ", sampling (plain stepper from t=N) " +
                                         (sample_same ? "bit-identical" : "differs")};
}

struct CompareRuns {
  std::vector<CompareResult> sr1d, traj;
  double seconds_sr1d = 0.0, seconds_traj = 0.0;
};

CompareRuns& compare_runs() {
  static CompareRuns runs = [] {
    CompareRuns r;
    for (const char* task : {"sr1d", "traj"}) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int seed = 1; seed <= 5; ++seed) {
        Config c = Config::load(std::string(UVG_CONFIG_DIR) + "/" + task + ".cfg");
        c.set("train.seed", std::to_string(seed));
        (std::string(task) == "sr1d" ? r.sr1d : r.traj).push_back(compare_bgn(resolve_experiment(c)));
      }
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      (std::string(task) == "sr1d" ? r.seconds_sr1d : r.seconds_traj) = sec;
    }
    return r;
  }();
  return runs;
}

double med(const std::vector<CompareResult>& rs, const std::string& method, double MethodScores::*field) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.at(method).*field);
  return median(v);
}

Verdict table_analog() {
  const CompareRuns& r = compare_runs();
  std::string detail;
  bool ok = true;
  for (auto [name, rs, margin, sec] : {std::tuple{"sr1d", &r.sr1d, 0.10, r.seconds_sr1d},
                                       std::tuple{"traj", &r.traj, 0.05, r.seconds_traj}}) {
    const double bgn = med(*rs, "bgn", &MethodScores::frechet);
    const double e7 = med(*rs, "edit_0.7", &MethodScores::frechet);
    const double e9 = med(*rs, "edit_0.9", &MethodScores::frechet);
    const double gap = 1.0 - bgn / std::min(e7, e9);
    ok = ok && gap >= margin && sec < 600.0;
    detail += std::string(detail.empty() ? "" : "; ") + name + " median frechet bgn " + fmt(bgn) + " vs edit 0.7 " +
              fmt(e7) + ", 0.9 " + fmt(e9) + " (margin " + fmt(100 * gap) + "%, need " + fmt(100 * margin) + "%, " +
              fmt(sec) + " s)";
  }
  return {ok, detail};
}

Verdict tradeoff() {
  const auto& rs = compare_runs().sr1d;
  const double s7 = med(rs, "edit_0.7", &MethodScores::sharpness), s9 = med(rs, "edit_0.9", &MethodScores::sharpness);
  const double m7 = med(rs, "edit_0.7", &MethodScores::paired_mse), m9 = med(rs, "edit_0.9", &MethodScores::paired_mse);
  return {s7 < s9 && m9 > m7, "sr1d median sharpness 0.7 " + fmt(s7) + " vs 0.9 " + fmt(s9) + "; paired_mse 0.7 " +
                                  fmt(m7) + " vs 0.9 " + fmt(m9)};
}

std::optional<Denoiser> gauss_model;

Verdict training_curves() {
  const Experiment ex = load("gauss2d.cfg");
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult r = train_run(ex.training(false), ex.task, ex.schedule, make_eval_hook(ex));
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int last = ex.train.n_iterations;
  bool ok = last <= 5000 && sec < 300.0;
  std::string detail;
  for (const char* metric : {"frechet", "conditional_frechet"})
    for (const char* mode : {"text", "image", "both"}) {
      double first = NAN, final = NAN;
      for (const auto& row : r.log) {
        if (row.metric != metric || row.mode != mode) continue;
        if (row.iteration == 0) first = row.value;
        if (row.iteration == last) final = row.value;
      }
      ok = ok && final < 0.5 * first;
      detail += std::string(metric) + " " + mode + " " + fmt(first) + "->" + fmt(final) + ", ";
    }
  gauss_model = std::move(r.model);
  return {ok, detail + std::to_string(last) + " iterations in " + fmt(sec) + " s"};
}

Verdict guidance_sweep() {
  if (!gauss_model) return {false, "no gauss2d checkpoint (criterion 5 did not run)"};
  const Experiment ex = load("gauss2d.cfg");
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = sweep_guidance(*gauss_model, ex);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto at = [&](double wt, double wi) -> const SweepCell& {
    return *std::find_if(cells.begin(), cells.end(), [&](const SweepCell& c) { return c.w_text == wt && c.w_image == wi; });
  };
  int image_rows = 0, text_cols = 0;
  for (double w : {0.0, 0.5, 1.0, 2.0}) {
    image_rows += at(w, 2.0).to_image_marginal < at(w, 0.0).to_image_marginal;
    text_cols += at(2.0, w).to_text_marginal < at(0.0, w).to_text_marginal;
  }
  return {image_rows == 4 && text_cols == 4 && sec < 180.0,
          "image distance drops with w_I in " + std::to_string(image_rows) + "/4 rows, text distance drops with w_T in " +
              std::to_string(text_cols) + "/4 columns, " + fmt(sec) + " s"};
}

Verdict oracle_sampling() {
  const auto t0 = std::chrono::steady_clock::now();
  const GaussianSamplingResult r = gaussian_sampling_check(zsnr(), 50, 10000, 7);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.mean_error_se <= 4.0 && r.trace_rel_error <= 0.05 && sec < 60.0,
          "mean error " + fmt(r.mean_error_se) + " SE, trace error " + fmt(100 * r.trace_rel_error) +
              "% (limit 5%); exact 50-step sampler law predicts " + fmt(100 * r.predicted_trace_rel_error) +
              "%, samples sit " + fmt(r.trace_vs_predicted_se) + " SE from it"};
}

Verdict numerics() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_checks(UVG_FIXTURE_DIR);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::vector<std::string> required{"gradient matches finite differences", "prediction-space round trips",
                                          "softmax rows sum to one", "zero terminal signal is exact",
                                          "mirrored streams double the output exactly", "frechet self-distance",
                                          "same-distribution statistic inside permutation band"};
  std::size_t failed = 0;
  std::string missing;
  for (const auto& c : results) failed += !c.passed;
  for (const auto& name : required)
    if (std::none_of(results.begin(), results.end(), [&](const CheckOutcome& c) { return c.name == name && c.passed; }))
      missing += " '" + name + "'";
  return {failed == 0 && missing.empty() && sec < 120.0,
          std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " checks pass in " +
              fmt(sec) + " s" + (missing.empty() ? "" : "; not passing:" + missing)};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(UVG_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "uvg_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "g.cfg") << "task.kind = gauss2d\ntrain.n_iterations = 60\ntrain.eval_every = 30\n"
                                   "task.eval_samples = 200\nsampler.steps = 10\ntrain.seed = 3\n";
  std::ofstream(root / "s.cfg") << "task.kind = sr1d\ntrain.n_iterations = 60\ntrain.eval_every = 30\n"
                                   "task.eval_samples = 200\nsampler.steps = 10\ntrain.seed = 3\n";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"train", "g.cfg"}, {"sample", "g.cfg"}, {"eval", "g.cfg"}, {"sweep-guidance", "g.cfg"},
      {"compare-bgn", "s.cfg"}, {"oracle-check", ""}};
  std::string differing;
  int files = 0;
  for (const char* run : {"a", "b"}) {
    for (const auto& [cmd, cfg] : commands) {
      const fs::path out = root / run / cmd;
      std::string args = cmd + " --out " + out.string();
      // Later commands read the checkpoint trained in this run.
      if (!cfg.empty()) args += " --config " + (root / cfg).string();
      if (cmd != "train" && cmd != "compare-bgn" && cmd != "oracle-check") {
        Config c = Config::load((root / cfg).string());
        c.set("train.checkpoint", (root / run / "train" / "model.uvgl").string());
        std::ofstream(root / run / (cmd + ".cfg")) << resolve_experiment(c).resolved_text();
        args = cmd + " --out " + out.string() + " --config " + (root / run / (cmd + ".cfg")).string();
      }
      if (const int code = run_cli(args); code != 0) return {false, cmd + " exited " + std::to_string(code)};
    }
  }
  for (const auto& [cmd, cfg] : commands)
    for (const auto& e : fs::directory_iterator(root / "a" / cmd)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const fs::path other = root / "b" / cmd / e.path().filename();
      if (slurp(e.path()) != slurp(other)) differing += " " + cmd + "/" + e.path().filename().string();
    }
  return {differing.empty() && files > 0,
          std::to_string(files) + " CSV files compared across two runs of " + std::to_string(commands.size()) +
              " commands" + (differing.empty() ? ", all byte-identical" : "; differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> xfail;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--xfail") xfail.insert(std::atoi(argv[++i]));

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"BGN boundary exactness", knots},
      {"BGN degenerate equivalence", degenerate},
      {"BGN beats editing on Frechet", table_analog},
      {"editing sharpness/fidelity trade-off", tradeoff},
      {"gauss2d training curves", training_curves},
      {"guidance sweep monotonicity", guidance_sweep},
      {"Gaussian oracle through the sampler", oracle_sampling},
      {"numerics suite", numerics},
      {"CLI determinism", determinism},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool expected_fail = xfail.count(id) != 0;
    std::string tag = v.pass ? "PASS" : "FAIL";
    if (expected_fail) tag = v.pass ? "XPASS" : "FAIL (expected)";
    if (v.pass == expected_fail) ++unexpected;
    std::cout << "criterion " << id << " " << tag << ": " << criteria[i].first << ": " << v.detail << " [" << fmt(sec)
              << " s]" << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
