#include "uvg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "uvg/error.hpp"

namespace uvg {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

json config_json(const ModelConfig& c) {
  return json{{"x_dim", c.x_dim},         {"hidden", c.hidden},   {"time_dim", c.time_dim},
              {"attn_dim", c.attn_dim},   {"cond_dim", c.cond_dim}, {"tokens_per_stream", c.tokens_per_stream},
              {"n_steps", c.n_steps},     {"kind", to_string(c.kind)}, {"biased", c.biased}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.x_dim = j.at("x_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.time_dim = j.at("time_dim").get<std::size_t>();
  c.attn_dim = j.at("attn_dim").get<std::size_t>();
  c.cond_dim = j.at("cond_dim").get<std::size_t>();
  c.tokens_per_stream = j.at("tokens_per_stream").get<std::vector<std::size_t>>();
  c.n_steps = j.at("n_steps").get<int>();
  c.kind = parse_prediction_kind(j.at("kind").get<std::string>());
  c.biased = j.at("biased").get<bool>();
  return c;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  char b[4];
  if (!is.read(b, 4)) throw MissingArtifact("truncated checkpoint header");
  std::uint32_t v;
  std::memcpy(&v, b, 4);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json arrays = json::array();
  auto list = [&](const ParameterStore& s, const char* group) {
    for (std::size_t i = 0; i < s.size(); ++i)
      arrays.push_back(json{{"name", s.name(i)}, {"shape", s.value(i).shape()}, {"group", group}});
  };
  list(ckpt.params, "param");
  list(ckpt.extra, "extra");
  const json manifest{{"model", config_json(ckpt.config)}, {"arrays", arrays}, {"meta", ckpt.meta}};
  const std::string text = manifest.dump();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingArtifact("cannot write checkpoint " + path);
  f.write("UVGL", 4);
  put_u32(f, kCheckpointVersion);
  put_u32(f, static_cast<std::uint32_t>(text.size()));
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const ParameterStore* s : {&ckpt.params, &ckpt.extra})
    for (std::size_t i = 0; i < s->size(); ++i)
      f.write(reinterpret_cast<const char*>(s->value(i).data()),
              static_cast<std::streamsize>(s->value(i).size() * sizeof(double)));
  if (!f) throw MissingArtifact("failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingArtifact("checkpoint not found: " + path);
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, "UVGL", 4) != 0) throw MissingArtifact("not a checkpoint: " + path);
  const std::uint32_t version = get_u32(f);
  if (version != kCheckpointVersion) throw MissingArtifact("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t len = get_u32(f);
  std::string text(len, '\0');
  if (!f.read(text.data(), len)) throw MissingArtifact("truncated checkpoint manifest");

  Checkpoint ck;
  try {
    const json manifest = json::parse(text);
    ck.config = config_from_json(manifest.at("model"));
    ck.meta = manifest.at("meta").get<std::map<std::string, std::string>>();
    for (const json& a : manifest.at("arrays")) {
      const Shape shape = a.at("shape").get<Shape>();
      Array value(shape);
      if (!f.read(reinterpret_cast<char*>(value.data()), static_cast<std::streamsize>(value.size() * sizeof(double)))) {
        throw MissingArtifact("truncated checkpoint data");
      }
      (a.at("group").get<std::string>() == "param" ? ck.params : ck.extra).add(a.at("name").get<std::string>(),
                                                                             std::move(value));
    }
  } catch (const json::exception& e) {
    throw MissingArtifact("malformed checkpoint manifest in " + path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw MissingArtifact("malformed checkpoint " + path + ": " + e.what());
  }
  if (f.peek() != std::char_traits<char>::eof()) throw MissingArtifact("trailing bytes in checkpoint " + path);
  return ck;
}

Denoiser load_model(const std::string& path) {
  Checkpoint ck = read_checkpoint(path);
  try {
    return Denoiser(ck.config, std::move(ck.params));
  } catch (const InvalidArgument& e) {
    throw MissingArtifact("checkpoint " + path + " does not describe a valid model: " + e.what());
  }
}

}  // namespace uvg
