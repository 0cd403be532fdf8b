#pragma once

#include "ctcbert/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace ctcbert::detail {

// Explicit little-endian encoding so files are portable across hosts.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    require(out_.good(), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  }

  void magic(std::string_view tag) { out_.write(tag.data(), static_cast<std::streamsize>(tag.size())); }

  void u32(std::uint32_t v) { put(v); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v)); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }

  void finish() {
    out_.flush();
    require(out_.good(), ErrorKind::Io, "write to '" + path_.string() + "' failed");
  }

 private:
  template <class U>
  void put(U v) {
    std::array<char, sizeof(U)> bytes;
    for (size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out_.write(bytes.data(), bytes.size());
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    require(in_.good(), ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  }

  void expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    require(in_.good() && got == tag, ErrorKind::VersionMismatch,
            "'" + path_.string() + "' does not start with magic '" + std::string(tag) + "'");
  }

  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(get<std::uint32_t>()); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  void expect_end() {
    in_.peek();
    require(in_.eof(), ErrorKind::Io, "'" + path_.string() + "' has trailing bytes");
  }

 private:
  template <class U>
  U get() {
    std::array<unsigned char, sizeof(U)> bytes;
    in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    require(in_.good(), ErrorKind::Io, "'" + path_.string() + "' is truncated");
    U v = 0;
    for (size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
    return v;
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace ctcbert::detail
