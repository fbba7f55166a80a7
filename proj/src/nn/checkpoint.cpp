#include "pn2n/nn/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace pn2n::nn {

namespace {
constexpr char kMagic[8] = {'P', 'N', '2', 'N', 'C', 'K', 'P', 'T'};

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_checkpoint_file(const std::filesystem::path& path, const CheckpointData& data) {
  nlohmann::json meta = data.meta;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& [name, blob] : data.tensors) {
    dir.push_back({{"name", name}, {"size", blob.size()}});
  }
  meta["tensors"] = dir;
  const std::string js = meta.dump();

  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot write checkpoint: " + path.string());
  if (std::fwrite(kMagic, 1, 8, f.get()) != 8) throw std::runtime_error("checkpoint write failed");
  const std::uint32_t len = static_cast<std::uint32_t>(js.size());
  unsigned char lenb[4] = {static_cast<unsigned char>(len & 0xff),
                           static_cast<unsigned char>((len >> 8) & 0xff),
                           static_cast<unsigned char>((len >> 16) & 0xff),
                           static_cast<unsigned char>((len >> 24) & 0xff)};
  std::fwrite(lenb, 1, 4, f.get());
  std::fwrite(js.data(), 1, js.size(), f.get());
  for (const auto& [name, blob] : data.tensors) {
    if (std::fwrite(blob.data(), sizeof(float), blob.size(), f.get()) != blob.size()) {
      throw std::runtime_error("checkpoint write failed: " + path.string());
    }
  }
}

CheckpointData load_checkpoint_file(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("not a PN2N checkpoint: " + path.string());
  }
  unsigned char lenb[4];
  if (std::fread(lenb, 1, 4, f.get()) != 4) throw std::runtime_error("truncated checkpoint");
  const std::uint32_t len = static_cast<std::uint32_t>(lenb[0]) | (lenb[1] << 8) |
                            (lenb[2] << 16) | (static_cast<std::uint32_t>(lenb[3]) << 24);
  std::string js(len, '\0');
  if (std::fread(js.data(), 1, len, f.get()) != len) throw std::runtime_error("truncated checkpoint");

  CheckpointData out;
  out.meta = nlohmann::json::parse(js);
  for (const auto& entry : out.meta.at("tensors")) {
    const std::string name = entry.at("name").get<std::string>();
    const std::size_t size = entry.at("size").get<std::size_t>();
    std::vector<float> blob(size);
    if (std::fread(blob.data(), sizeof(float), size, f.get()) != size) {
      throw std::runtime_error("truncated checkpoint tensor: " + name);
    }
    out.tensors.emplace_back(name, std::move(blob));
  }
  out.meta.erase("tensors");
  return out;
}

}  // namespace pn2n::nn
