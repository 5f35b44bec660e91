#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace adherence::cli {

inline constexpr std::string_view kManifestName = "manifest.csv";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Rewrites <dir>/manifest.csv as `path,sha256,bytes` for every regular
/// file under `dir` (relative paths, sorted), excluding the manifest.
std::filesystem::path write_manifest(const std::filesystem::path& dir);

}  // namespace adherence::cli
