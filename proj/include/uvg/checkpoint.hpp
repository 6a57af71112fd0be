#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "uvg/denoiser.hpp"

namespace uvg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Model weights plus optional extra arrays (optimizer moments) and string
/// metadata (iteration, random states) for exact resumption.
struct Checkpoint {
  ModelConfig config;
  ParameterStore params;
  ParameterStore extra;
  std::map<std::string, std::string> meta;
};

/// "UVGL", u32 LE version, u32 LE manifest length, UTF-8 JSON manifest
/// naming every array and shape in order, then LE f64 values.
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws MissingArtifact when absent or malformed.
Checkpoint read_checkpoint(const std::string& path);

Denoiser load_model(const std::string& path);

}  // namespace uvg
