#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pn2n::nn {

// Architecture metadata plus named float32 tensors, stored as one file:
// magic "PN2NCKPT", u32le JSON length, JSON bytes, concatenated blobs.
struct CheckpointData {
  nlohmann::json meta;
  std::vector<std::pair<std::string, std::vector<float>>> tensors;
};

void save_checkpoint_file(const std::filesystem::path& path, const CheckpointData& data);
CheckpointData load_checkpoint_file(const std::filesystem::path& path);

}  // namespace pn2n::nn
