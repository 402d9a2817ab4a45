#include "chainsim/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "chainsim/errors.hpp"

namespace chainsim {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), "cannot open file for digest: " + file.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (got < static_cast<std::streamsize>(sizeof buf)) break;
  }
  return h;
}

void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files) {
  nlohmann::json entries = nlohmann::json::object();
  for (const std::string& name : files) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(dir / name)));
    entries[name] = hex;
  }
  nlohmann::json j;
  j["format_version"] = 1;
  j["files"] = entries;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  require(out.good(), "cannot write manifest.json");
  out << j.dump(2) << "\n";
  require(out.good(), "write to manifest.json failed");
}

}  // namespace chainsim
