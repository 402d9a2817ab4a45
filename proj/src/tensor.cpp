#include "chainsim/tensor.hpp"

#include <cstring>
#include <fstream>

namespace chainsim {

namespace {
constexpr uint32_t kTensorVersion = 1;
}

void save_tensor(const std::string& path, const Tensor3& t, const char magic[8]) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(magic, 8);
  const uint32_t header[4] = {kTensorVersion, static_cast<uint32_t>(t.d0()),
                              static_cast<uint32_t>(t.d1()), static_cast<uint32_t>(t.d2())};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  f.write(reinterpret_cast<const char*>(t.data().data()),
          static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Tensor3 load_tensor(const std::string& path, const char magic[8]) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char got[8];
  f.read(got, 8);
  if (!f || std::memcmp(got, magic, 8) != 0) {
    throw std::runtime_error("bad magic in " + path);
  }
  uint32_t header[4];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!f) throw std::runtime_error("truncated header in " + path);
  if (header[0] != kTensorVersion) {
    throw std::runtime_error("unsupported version " + std::to_string(header[0]) + " in " + path);
  }
  Tensor3 t(static_cast<int>(header[1]), static_cast<int>(header[2]), static_cast<int>(header[3]));
  f.read(reinterpret_cast<char*>(t.data().data()),
         static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  if (!f) throw std::runtime_error("truncated payload in " + path);
  return t;
}

}  // namespace chainsim
