#include "wax/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "wax/errors.hpp"

namespace wax {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string fnv1a64_hex(const std::string& path) {
  char out[20];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64_file(path)));
  return std::string(out);
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    const nlohmann::json& parameters, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  j["outputs"] = nlohmann::json::array();
  for (const std::string& out : outputs) {
    j["outputs"].push_back({{"path", out}, {"fnv1a64", fnv1a64_hex(out)}});
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace wax
