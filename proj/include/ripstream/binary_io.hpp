#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace ripstream::io {

using Bytes = std::vector<std::uint8_t>;

// Little-endian scalar encoding, independent of host byte order.
template <class T>
  requires std::is_integral_v<T>
inline void put_le(std::uint8_t* out, T value) noexcept {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

template <class T>
  requires std::is_integral_v<T>
inline T get_le(const std::uint8_t* in) noexcept {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(in[i]) << (8 * i));
  return static_cast<T>(u);
}

inline void put_f64(std::uint8_t* out, double x) noexcept { put_le(out, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(const std::uint8_t* in) noexcept { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  const Bytes& bytes() const noexcept { return buf_; }
  Bytes take() noexcept { return std::move(buf_); }

 private:
  template <class T>
  void put(T v) {
    const auto at = buf_.size();
    buf_.resize(at + sizeof(T));
    put_le(buf_.data() + at, v);
  }
  Bytes buf_;
};

// Bounds-checked cursor over an in-memory byte image. Running off the end
// raises TruncatedFileError naming `what`.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string what) : data_(data), what_(std::move(what)) {}

  std::uint8_t u8() { return *need(1); }
  std::uint16_t u16() { return get_le<std::uint16_t>(need(2)); }
  std::uint32_t u32() { return get_le<std::uint32_t>(need(4)); }
  std::uint64_t u64() { return get_le<std::uint64_t>(need(8)); }
  double f64() { return get_f64(need(8)); }
  std::string raw(std::size_t n) {
    const auto* p = need(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  const std::uint8_t* need(std::size_t n) {
    if (remaining() < n) throw TruncatedFileError(what_ + ": unexpected end of data");
    const auto* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::span<const std::uint8_t> data_;
  std::string what_;
  std::size_t pos_ = 0;
};

// 64-bit FNV-1a.
class Fnv1a64 {
 public:
  void update(std::span<const std::uint8_t> bytes) noexcept {
    for (auto b : bytes) {
      h_ ^= b;
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  Bytes data(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size)))
    throw IoError("cannot read " + path.string());
  return data;
}

// Write to a sibling temp file, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace ripstream::io
