// uvg: train, sample and evaluate the toy UniVG models; reproduce the
// BGN and guidance ablations; run the oracle suites.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "uvg/checkpoint.hpp"
#include "uvg/checks.hpp"
#include "uvg/config.hpp"
#include "uvg/csv.hpp"
#include "uvg/error.hpp"
#include "uvg/experiments.hpp"
#include "uvg/metrics.hpp"

namespace fs = std::filesystem;
using namespace uvg;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<long> seed;
  std::optional<double> w_text, w_image, start_fraction;
  std::optional<int> steps;
  std::optional<std::string> sampler;
  std::string filter;
  std::string fixtures = UVG_FIXTURE_DIR;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingArtifact("cannot write " + path.string());
  f << text;
  if (!f) throw MissingArtifact("failed writing " + path.string());
}

Experiment load_experiment(const Options& o) {
  Config cfg = o.config.empty() ? Config{} : Config::load(o.config);
  if (o.seed) cfg.set("train.seed", std::to_string(*o.seed));
  if (o.w_text) cfg.set("guidance.w_text", format_double(*o.w_text));
  if (o.w_image) cfg.set("guidance.w_image", format_double(*o.w_image));
  if (o.steps) cfg.set("sampler.steps", std::to_string(*o.steps));
  if (o.start_fraction) cfg.set("sampler.start_fraction", format_double(*o.start_fraction));
  if (o.sampler) cfg.set("sampler.kind", *o.sampler);
  return resolve_experiment(cfg);
}

fs::path prepare_out(const Options& o, const Experiment& ex) {
  const fs::path out(o.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw MissingArtifact("cannot create output directory " + out.string());
  write_text(out / "resolved.cfg", ex.resolved_text());
  return out;
}

std::string checkpoint_path(const Options& o, const Experiment& ex) {
  return ex.checkpoint.empty() ? (fs::path(o.out) / "model.uvgl").string() : ex.checkpoint;
}

Checkpoint make_checkpoint(const Denoiser& model, const AdamState& adam, const TrainState& st) {
  Checkpoint c{model.config(), model.params(), {}, {}};
  for (std::size_t i = 0; i < adam.m.size(); ++i) c.extra.add("adam.m." + adam.m.name(i), adam.m.value(i));
  for (std::size_t i = 0; i < adam.v.size(); ++i) c.extra.add("adam.v." + adam.v.name(i), adam.v.value(i));
  c.meta["adam.step"] = std::to_string(adam.step);
  c.meta["iteration"] = std::to_string(st.iteration);
  c.meta["data_rng"] = st.data_rng;
  c.meta["noise_rng"] = st.noise_rng;
  return c;
}

int cmd_train(const Options& o) {
  const Experiment ex = load_experiment(o);
  const fs::path out = prepare_out(o, ex);
  const TrainConfig tc = ex.training(ex.objective_bgn);
  const CheckpointHook save = [&](const Denoiser& m, const AdamState& a, const TrainState& st) {
    write_checkpoint((out / ("ckpt_" + std::to_string(st.iteration) + ".uvgl")).string(), make_checkpoint(m, a, st));
  };
  const TrainResult r = train_run(tc, ex.task, ex.schedule, make_eval_hook(ex), save);
  write_text(out / "metrics.csv", metric_log_csv(r.log));
  write_checkpoint((out / "model.uvgl").string(), make_checkpoint(r.model, r.adam, r.state));
  std::cout << "trained " << tc.n_iterations << " iterations; final loss " << format_double(r.losses.back()) << "\n";
  return 0;
}

int cmd_sample(const Options& o) {
  const Experiment ex = load_experiment(o);
  const Denoiser model = load_model(checkpoint_path(o, ex));
  const fs::path out = prepare_out(o, ex);
  Rng data_rng(ex.eval_seed);
  const TaskBatch eval = generate(ex.task, ex.eval_samples, data_rng);
  std::vector<std::string> header{"mode", "row"};
  for (std::size_t j = 0; j < ex.task.dims; ++j) header.push_back("x" + std::to_string(j));
  CsvTable t(header);
  const auto modes = eval_modes(ex.task);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    Rng rng(mix_seed(ex.eval_seed, 1000 + m));
    Array s;
    if (model.biased() || ex.sampler.start_fraction < 1.0) {
      s = sample_for_eval(model, eval, modes[m], ex, rng);
    } else {
      SamplerConfig sc = ex.sampler;
      s = sample(model, tokens_for_mode(eval, modes[m]), ex.guidance(), sc, ex.schedule, std::nullopt, rng,
                 ex.task.dims);
    }
    for (std::size_t r = 0; r < s.dim(0); ++r) {
      std::vector<std::string> row{modes[m], std::to_string(r)};
      for (std::size_t j = 0; j < s.dim(1); ++j) row.push_back(format_double(s(r, j)));
      t.add_row(std::move(row));
    }
  }
  t.write((out / "samples.csv").string());
  return 0;
}

int cmd_eval(const Options& o) {
  const Experiment ex = load_experiment(o);
  const Denoiser model = load_model(checkpoint_path(o, ex));
  const fs::path out = prepare_out(o, ex);
  Rng data_rng(ex.eval_seed);
  const TaskBatch eval = generate(ex.task, ex.eval_samples, data_rng);
  CsvTable t({"mode", "metric", "value"});
  const auto modes = eval_modes(ex.task);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    Rng rng(mix_seed(ex.eval_seed, 1000 + m));
    const Array s = sample_for_eval(model, eval, modes[m], ex, rng);
    t.add_row({modes[m], "frechet", format_double(frechet_distance(s, eval.target))});
    t.add_row({modes[m], "conditional_frechet", format_double(conditional_frechet(s, eval, modes[m]))});
    t.add_row({modes[m], "energy", format_double(energy_distance(s, eval.target))});
    if (ex.task.paired()) {
      t.add_row({modes[m], "paired_mse", format_double(paired_mse(s, eval.target))});
      t.add_row({modes[m], "sharpness", format_double(sharpness_proxy(s, ex.task.kind))});
    }
  }
  t.write((out / "eval.csv").string());
  return 0;
}

int cmd_compare_bgn(const Options& o) {
  const Experiment ex = load_experiment(o);
  const fs::path out = prepare_out(o, ex);
  const CompareResult r = compare_bgn(ex);
  write_text(out / "compare_bgn.csv", compare_csv(r));
  write_text(out / "metrics_standard.csv", metric_log_csv(r.standard_log));
  write_text(out / "metrics_bgn.csv", metric_log_csv(r.bgn_log));
  for (const auto& m : r.rows)
    std::cout << m.method << ": frechet " << format_double(m.frechet) << ", paired_mse "
              << format_double(m.paired_mse) << ", sharpness " << format_double(m.sharpness) << "\n";
  return 0;
}

int cmd_sweep_guidance(const Options& o) {
  const Experiment ex = load_experiment(o);
  const Denoiser model = load_model(checkpoint_path(o, ex));
  const fs::path out = prepare_out(o, ex);
  write_text(out / "sweep_guidance.csv", sweep_csv(sweep_guidance(model, ex)));
  return 0;
}

int cmd_oracle_check(const Options& o) {
  const auto results = run_checks(o.fixtures, o.filter);
  if (results.empty()) {
    std::cerr << "no suite matches filter '" << o.filter << "'\n";
    return 5;
  }
  std::error_code ec;
  fs::create_directories(o.out, ec);
  write_text(fs::path(o.out) / "oracle_check.csv", checks_csv(results));
  std::map<std::string, std::pair<int, int>> tally;
  std::vector<std::string> order;
  bool ok = true;
  for (const auto& r : results) {
    if (!tally.count(r.suite)) order.push_back(r.suite);
    auto& [pass, fail] = tally[r.suite];
    (r.passed ? pass : fail)++;
    if (!r.passed) {
      ok = false;
      std::cerr << "FAIL " << r.suite << " / " << r.name;
      if (!r.detail.empty()) std::cerr << ": " << r.detail;
      else std::cerr << ": value " << format_double(r.value) << " limit " << format_double(r.limit);
      std::cerr << "\n";
    }
  }
  for (const auto& s : order)
    std::cout << "suite " << s << ": " << tally[s].first << " passed, " << tally[s].second << " failed\n";
  return ok ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uvg: multi-condition diffusion toys (biased noise, cross attention, guidance)"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config, "flat key = value experiment file");
    c->add_option("--out", o.out, "output directory")->capture_default_str();
    c->add_option("--seed", o.seed, "overrides train.seed");
    c->add_option("--w-text", o.w_text, "overrides guidance.w_text");
    c->add_option("--w-image", o.w_image, "overrides guidance.w_image");
    c->add_option("--steps", o.steps, "overrides sampler.steps");
    c->add_option("--start-fraction", o.start_fraction, "overrides sampler.start_fraction");
    c->add_option("--sampler", o.sampler, "overrides sampler.kind (deterministic | ancestral)");
  };
  std::map<CLI::App*, int (*)(const Options&)> handlers;
  const auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* c = app.add_subcommand(name, help);
    common(c);
    handlers[c] = fn;
    return c;
  };
  add("train", "train a model; writes metrics.csv, ckpt_<iter>.uvgl, model.uvgl, resolved.cfg", cmd_train);
  add("sample", "sample the evaluation conditions; writes samples.csv (mode, row, x0..)", cmd_sample);
  add("eval", "score a checkpoint; writes eval.csv (mode, metric, value)", cmd_eval);
  add("compare-bgn", "editing baseline vs BGN on a paired task; writes compare_bgn.csv", cmd_compare_bgn);
  add("sweep-guidance", "text/image guidance grid on a gauss2d checkpoint; writes sweep_guidance.csv",
      cmd_sweep_guidance);
  CLI::App* oc = add("oracle-check", "oracle fixtures and invariant suites; writes oracle_check.csv", cmd_oracle_check);
  oc->add_option("--filter", o.filter, "run suites whose name contains this text");
  oc->add_option("--fixtures", o.fixtures, "fixture directory")->capture_default_str();
  app.footer(
      "Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 missing artifact, 5 check failure.\n"
      "UVG_THREADS caps the worker count. Config keys (key = default):\n" +
      [] {
        std::string s;
        for (const auto& k : Config::schema())
          s += "  " + k.name + " = " + (k.fallback.empty() ? "<task dependent>" : k.fallback) + "  # " + k.help + "\n";
        return s;
      }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    for (const auto& [cmd, fn] : handlers)
      if (cmd->parsed()) return fn(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
