#include "uvg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "uvg/error.hpp"

namespace uvg {

const std::vector<Config::Key>& Config::schema() {
  static const std::vector<Key> keys = {
      {"schedule.n_steps", "1000", "number of diffusion timesteps N"},
      {"schedule.beta_start", "0.0001", "first beta of the linear schedule"},
      {"schedule.beta_end", "0.02", "last beta of the linear schedule"},
      {"schedule.zero_terminal_snr", "true", "rescale so sqrt(alpha_bar_N) = 0"},
      {"task.kind", "gauss2d", "gauss2d | sr1d | traj"},
      {"task.dims", "", "signal length (gauss2d 2, sr1d 16, traj 16)"},
      {"task.n_classes", "4", "gauss2d class count"},
      {"task.seed", "0", "seed of the token projections"},
      {"task.tokens_per_stream", "4", "tokens per condition stream"},
      {"task.token_dim", "8", "token width"},
      {"task.blur_width", "5", "sr1d blur kernel size (odd)"},
      {"task.blur_sigma", "1", "sr1d blur sigma"},
      {"task.downsample_stride", "2", "sr1d subsampling stride"},
      {"task.amplitude", "1", "sr1d mode amplitude scale"},
      {"task.high_mode", "6", "sr1d high-frequency mode index"},
      {"task.start_scale", "1", "traj start position scale"},
      {"task.velocity_scale", "0.5", "traj velocity scale"},
      {"task.jitter", "0.05", "traj per-frame jitter"},
      {"task.eval_samples", "1000", "evaluation batch size"},
      {"task.eval_seed", "12345", "seed of evaluation data and sampling noise"},
      {"train.learning_rate", "0.001", "Adam learning rate"},
      {"train.batch_size", "64", "batch size"},
      {"train.n_iterations", "2000", "training iterations"},
      {"train.text_dropout", "0.5", "drop probability of the text stream"},
      {"train.image_dropout", "0.1", "drop probability of the image stream(s)"},
      {"train.prediction_kind", "v", "epsilon | v | x0 for standard models"},
      {"train.bgn_prediction_kind", "", "epsilon_prime | v_prime for biased models"},
      {"train.offset_noise", "0.1", "offset noise strength"},
      {"train.eval_every", "500", "evaluation and checkpoint period"},
      {"train.seed", "0", "training seed"},
      {"train.objective", "standard", "standard | bgn (paired tasks) for the train command"},
      {"train.checkpoint", "", "checkpoint to load (default <out>/model.uvgl)"},
      {"sampler.kind", "deterministic", "deterministic | ancestral"},
      {"sampler.steps", "50", "steps over the full range; partial starts scale it down"},
      {"sampler.start_fraction", "1", "1 = pure noise; < 1 edits the condition"},
      {"sampler.eta", "1", "ancestral noise scale"},
      {"sampler.edit_fractions", "0.7,0.9", "editing start fractions compared against BGN"},
      {"bgn.t_m", "", "bias window start (sr1d 0, traj 600)"},
      {"bgn.t_n", "", "bias window end (sr1d 700, traj 990)"},
      {"bgn.t_start", "", "BGN sampling start timestep (sr1d 700, traj N)"},
      {"bgn.stepper", "bridge", "bridge | plain reverse step for BGN sampling"},
      {"guidance.w_text", "1", "text guidance weight"},
      {"guidance.w_image", "1", "image guidance weight"},
  };
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const Config::Key* find_key(const std::string& name) {
  for (const auto& k : Config::schema())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(n) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    try {
      c.set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::get(const std::string& key) const {
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown config key '" + key + "'");
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  if (k->fallback.empty()) throw ConfigError("config key '" + key + "' has no default here");
  return k->fallback;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  if (!find_key(key)) throw ConfigError("unknown config key '" + key + "'");
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return fallback;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
  return out;
}

long parse_int(const std::string& key, const std::string& v) {
  long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

double Config::get_double(const std::string& key) const { return parse_double(key, get(key)); }
long Config::get_int(const std::string& key) const { return parse_int(key, get(key)); }
bool Config::get_bool(const std::string& key) const { return parse_bool(key, get(key)); }

}  // namespace uvg
