#pragma once

// Run-directory output. Every file goes through one RunWriter, which records its
// SHA-256 so the manifest can list the full output set. Floats use 17 significant
// digits, which round-trips IEEE doubles.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlbe/errors.hpp"

namespace nlbe {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Accumulates CSV rows; cells are joined with commas, doubles at 17 digits.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) { row_strings(header); }

  CsvBuilder& row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_double(v);
      first = false;
    }
    out_ << '\n';
    return *this;
  }

  CsvBuilder& row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

/// Single writer per run directory.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
    hashes_[name] = {sha256_hex(content), content.size()};
  }

  void write_json(const std::string& name, const nlohmann::ordered_json& j) {
    write(name, j.dump(2) + "\n");
  }

  /// Writes `name` listing every file written so far (sorted by name).
  void write_manifest(const std::string& name, nlohmann::ordered_json meta) {
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& [file, info] : hashes_)
      files.push_back({{"path", file}, {"sha256", info.first}, {"bytes", info.second}});
    meta["files"] = files;
    write(name, meta.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::pair<std::string, std::size_t>> hashes_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace nlbe
