#include "adherence/cli/manifest.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <fstream>
#include <openssl/evp.h>
#include <sstream>
#include <vector>

#include "adherence/csv.hpp"
#include "adherence/error.hpp"

namespace adherence::cli {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      fail(ErrorCode::Io, "cannot initialise SHA-256");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::UnreadableFile, fmt::format("cannot open {}", path.string()));
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::filesystem::path write_manifest(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::filesystem::path rel = entry.path().lexically_relative(dir);
    if (rel == kManifestName) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  std::ostringstream text;
  CsvWriter w(text);
  w.write("path", "sha256", "bytes");
  for (const auto& rel : files) {
    const auto full = dir / rel;
    w.write(rel.generic_string(), sha256_file(full),
            static_cast<unsigned long long>(std::filesystem::file_size(full)));
  }
  const auto path = dir / kManifestName;
  std::ofstream out(path, std::ios::binary);
  out << text.str();
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  return path;
}

}  // namespace adherence::cli
