#ifndef ACCENTNET_IO_UTIL_HPP
#define ACCENTNET_IO_UTIL_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "accentnet/error.hpp"

namespace accentnet::io {

// All file formats in this project are little-endian regardless of host.

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n, const std::string& what) const {
    if (remaining() < n)
      data_error(source_ + ": truncated file while reading " + what + " (need " +
                 std::to_string(n) + " bytes, have " + std::to_string(remaining()) + ")");
  }

  std::uint8_t u8(const std::string& what) {
    require(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint16_t u16(const std::string& what) {
    require(2, what);
    std::uint16_t v = static_cast<std::uint8_t>(bytes_[pos_]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_ + 1])) << 8);
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const std::string& what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32(const std::string& what) { return std::bit_cast<float>(u32(what)); }

  std::string raw(std::size_t n, const std::string& what) {
    require(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n, const std::string& what) {
    require(n, what);
    pos_ += n;
  }

 private:
  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& bytes);

// FNV-1a, used for config hashes and cache keys.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), seed);
}

std::string hex64(std::uint64_t v);

}  // namespace accentnet::io

#endif
