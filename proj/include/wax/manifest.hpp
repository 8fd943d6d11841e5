#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace wax {

inline constexpr const char* kToolName = "waxkit";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the raw bytes of a file.
std::uint64_t fnv1a64_file(const std::string& path);
std::string fnv1a64_hex(const std::string& path);

// Reproducibility record: full parameter set plus digests of every produced
// file.  Replaying the same manifest must reproduce the digests bit for bit.
void write_manifest(const std::string& path, const std::string& subcommand,
                    const nlohmann::json& parameters, const std::vector<std::string>& outputs);

}  // namespace wax
