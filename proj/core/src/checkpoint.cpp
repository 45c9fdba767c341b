#include "pading/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace pading {

namespace {

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("checkpoint '" + path + "': truncated");
  return value;
}

}  // namespace

void save_checkpoint(const std::vector<std::pair<std::string, Param*>>& params,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot write '" + path + "'");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  write_pod<std::uint64_t>(out, params.size());
  for (const auto& [name, param] : params) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint64_t>(out, param->value.rows());
    write_pod<std::uint64_t>(out, param->value.cols());
    out.write(reinterpret_cast<const char*>(param->value.data().data()),
              static_cast<std::streamsize>(param->value.size() * sizeof(double)));
  }
  if (!out) throw IoError("save_checkpoint: write failed for '" + path + "'");
}

std::map<std::string, Matrix> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open '" + path + "'");
  char magic[sizeof(kCheckpointMagic) - 1];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError("load_checkpoint: '" + path + "' is not a PADING-CKPT-1 container");
  }
  const auto count = read_pod<std::uint64_t>(in, path);
  std::map<std::string, Matrix> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw ParseError("checkpoint '" + path + "': truncated name");
    const auto rows = read_pod<std::uint64_t>(in, path);
    const auto cols = read_pod<std::uint64_t>(in, path);
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw ParseError("checkpoint '" + path + "': truncated values for '" + name +
                              "'");
    if (!m.all_finite()) {
      throw ParseError("checkpoint '" + path + "': non-finite values in '" + name + "'");
    }
    if (!out.emplace(std::move(name), std::move(m)).second) {
      throw ParseError("checkpoint '" + path + "': duplicate entry");
    }
  }
  return out;
}

void load_checkpoint_into(const std::vector<std::pair<std::string, Param*>>& params,
                          const std::string& path) {
  const auto table = load_checkpoint(path);
  for (const auto& [name, param] : params) {
    const auto it = table.find(name);
    if (it == table.end()) {
      throw LookupError("load_checkpoint: '" + path + "' is missing entry '" + name + "'");
    }
    if (!param->value.same_shape(it->second)) {
      throw DimensionError("load_checkpoint: entry '" + name + "' is " +
                           it->second.shape_str() + ", model expects " +
                           param->value.shape_str());
    }
    param->value = it->second;
    param->zero_grad();
  }
}

}  // namespace pading
