#pragma once

// Checkpoint and interval-spill files.
//
// Checkpoint (little-endian), version 1:
//   "SPHC" | u16 version | u16 reserved
//   u64 edge-file fingerprint
//   u64 cursor offset | f64 epsilon reached | u64 edges consumed
//   u32 vertex count | u32 max dim | u8 representatives flag
//   u64 simplices emitted | u64 largest batch | u64 peak registry size
//   registry:    u64 clique count, then per clique: u32 size, u32 vertices...
//   persistence: u64 closed count, u64 record count,
//                per record: u32 size, u32 vertices..., f64 filtration,
//                            u8 marked, u32 partner (0xffffffff = none)
//                u64 cascade count, per cascade: u32 key, u32 size, u32 indices...
//   u64 FNV-1a of every preceding byte
//
// Interval file: "SPHI" | u16 version | u64 record count, then 17-byte
// records: u8 dimension | f64 birth | f64 death (+inf while open).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "binary_io.hpp"
#include "clique_engine.hpp"
#include "core_types.hpp"
#include "edge_pipeline.hpp"
#include "errors.hpp"
#include "persistence_engine.hpp"

namespace ripstream {

inline constexpr std::string_view kCheckpointMagic = "SPHC";
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr std::string_view kIntervalMagic = "SPHI";
inline constexpr std::uint16_t kIntervalVersion = 1;
inline constexpr std::uint64_t kIntervalHeaderSize = 14;
inline constexpr std::uint64_t kIntervalRecordSize = 17;

struct RunStats {
  std::uint64_t simplices_emitted = 0;  // vertices included
  std::uint64_t largest_batch = 0;
  std::uint64_t peak_registry = 0;

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

// Everything needed to continue a computation from an edge-file position.
struct ComputationState {
  std::uint64_t fingerprint = 0;
  std::uint64_t cursor_offset = kEdgeHeaderSize;
  Filtration epsilon_reached = 0.0;
  std::uint64_t edges_consumed = 0;
  CliqueRegistry registry;
  PersistenceState persistence;
  RunStats stats;

  ComputationState(std::size_t vertex_count, int max_dim, bool keep_representatives = false)
      : registry(vertex_count, max_dim), persistence(max_dim, keep_representatives) {}
  ComputationState(CliqueRegistry reg, PersistenceState pst)
      : registry(std::move(reg)), persistence(std::move(pst)) {}
};

inline io::Bytes encode_checkpoint(const ComputationState& st) {
  io::ByteWriter w;
  w.raw(kCheckpointMagic);
  w.u16(kCheckpointVersion);
  w.u16(0);
  w.u64(st.fingerprint);
  w.u64(st.cursor_offset);
  w.f64(st.epsilon_reached);
  w.u64(st.edges_consumed);
  w.u32(static_cast<std::uint32_t>(st.registry.vertex_count()));
  w.u32(static_cast<std::uint32_t>(st.registry.max_dim()));
  w.u8(st.persistence.keeps_representatives() ? 1 : 0);
  w.u64(st.stats.simplices_emitted);
  w.u64(st.stats.largest_batch);
  w.u64(st.stats.peak_registry);

  const auto cliques = st.registry.cliques();
  w.u64(cliques.size());
  for (const auto& c : cliques) {
    w.u32(static_cast<std::uint32_t>(c.size()));
    for (VertexId v : c) w.u32(v);
  }

  w.u64(st.persistence.closed_count());
  w.u64(st.persistence.size());
  for (const auto& r : st.persistence.records()) {
    w.u32(static_cast<std::uint32_t>(r.vertices.size()));
    for (VertexId v : r.vertices) w.u32(v);
    w.f64(r.filtration);
    w.u8(r.marked ? 1 : 0);
    w.u32(r.partner);
  }
  w.u64(st.persistence.cascades().size());
  for (const auto& [key, chain] : st.persistence.cascades()) {
    w.u32(key);
    w.u32(static_cast<std::uint32_t>(chain.size()));
    for (StreamIndex i : chain) w.u32(i);
  }

  io::Fnv1a64 h;
  h.update(w.bytes());
  w.u64(h.digest());
  return w.take();
}

namespace detail {

inline std::uint32_t read_length(io::ByteReader& r, std::size_t element_size, const std::string& what) {
  const auto len = r.u32();
  if (static_cast<std::uint64_t>(len) * element_size > r.remaining())
    throw TruncatedFileError(what + ": section extends past end of file");
  return len;
}

inline std::uint64_t read_count(io::ByteReader& r, std::size_t min_element_size, const std::string& what) {
  const auto count = r.u64();
  if (count > r.remaining() / min_element_size) throw TruncatedFileError(what + ": section extends past end of file");
  return count;
}

}  // namespace detail

// Parses a checkpoint image. If `expected_fingerprint` is given, a mismatch
// is reported before the rest of the image is decoded.
inline ComputationState decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& what,
                                          std::optional<std::uint64_t> expected_fingerprint = std::nullopt) {
  io::ByteReader r(bytes, what);
  if (bytes.size() < 4 || r.raw(4) != kCheckpointMagic) {
    if (bytes.size() < 4) throw TruncatedFileError(what + ": empty or truncated checkpoint");
    throw FormatError(what + ": not a checkpoint file (bad magic)");
  }
  const auto version = r.u16();
  if (version != kCheckpointVersion)
    throw VersionMismatchError(what + ": checkpoint version " + std::to_string(version) + ", expected " +
                               std::to_string(kCheckpointVersion));
  r.u16();
  const auto fingerprint = r.u64();
  if (expected_fingerprint && *expected_fingerprint != fingerprint)
    throw FingerprintMismatchError(what + ": checkpoint was taken against a different edge file");

  const auto cursor_offset = r.u64();
  const auto epsilon_reached = r.f64();
  const auto edges_consumed = r.u64();
  const auto vertex_count = r.u32();
  const auto max_dim = static_cast<int>(r.u32());
  const bool representatives = r.u8() != 0;
  RunStats stats;
  stats.simplices_emitted = r.u64();
  stats.largest_batch = r.u64();
  stats.peak_registry = r.u64();

  std::vector<Clique> cliques(detail::read_count(r, 4, what));
  for (auto& c : cliques) {
    c.resize(detail::read_length(r, 4, what));
    for (auto& v : c) v = r.u32();
  }

  const auto closed_count = r.u64();
  std::vector<PersistenceState::Record> records(detail::read_count(r, 17, what));
  for (auto& rec : records) {
    rec.vertices.resize(detail::read_length(r, 4, what));
    for (auto& v : rec.vertices) v = r.u32();
    rec.filtration = r.f64();
    rec.marked = r.u8() != 0;
    rec.partner = r.u32();
  }
  std::map<StreamIndex, Chain> cascades;
  const auto cascade_count = detail::read_count(r, 8, what);
  for (std::uint64_t i = 0; i < cascade_count; ++i) {
    const auto key = r.u32();
    Chain chain(detail::read_length(r, 4, what));
    for (auto& c : chain) c = r.u32();
    cascades.emplace(key, std::move(chain));
  }

  const auto body_size = r.position();
  const auto checksum = r.u64();
  io::Fnv1a64 h;
  h.update(bytes.first(body_size));
  if (h.digest() != checksum) throw FormatError(what + ": checksum mismatch");
  if (r.remaining() != 0) throw FormatError(what + ": trailing bytes after checkpoint");

  if (vertex_count == 0 || max_dim < 1) throw FormatError(what + ": invalid dimensions");
  ComputationState st(CliqueRegistry::from_cliques(vertex_count, max_dim, cliques),
                      PersistenceState::restore(max_dim, representatives, std::move(records), std::move(cascades),
                                                closed_count));
  st.fingerprint = fingerprint;
  st.cursor_offset = cursor_offset;
  st.epsilon_reached = epsilon_reached;
  st.edges_consumed = edges_consumed;
  st.stats = stats;
  return st;
}

struct CheckpointInfo {
  std::filesystem::path path;
  std::uint64_t bytes = 0;
  std::uint64_t cursor_offset = 0;
};

// Atomic: the image goes to a temp file which is then renamed over `path`.
inline CheckpointInfo checkpoint_write(const ComputationState& st, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(st);
  io::write_file_atomic(path, bytes);
  return CheckpointInfo{path, bytes.size(), st.cursor_offset};
}

// Restores a checkpoint after verifying it belongs to `edge_file`.
inline ComputationState checkpoint_read(const std::filesystem::path& path, const std::filesystem::path& edge_file) {
  const auto expected = edge_file_fingerprint(edge_file);
  const auto bytes = io::read_file(path);
  return decode_checkpoint(bytes, path.string(), expected);
}

// Restores without an edge file to check against; for inspection only.
inline ComputationState checkpoint_read_unverified(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_checkpoint(bytes, path.string());
}

inline void encode_interval(std::uint8_t* out, const Interval& iv) noexcept {
  out[0] = static_cast<std::uint8_t>(iv.dimension);
  io::put_f64(out + 1, iv.birth);
  io::put_f64(out + 9, iv.death);
}

// Append-only interval spill. The header count is rewritten on every flush,
// so the file is self-consistent after each checkpoint.
class IntervalWriter {
 public:
  static IntervalWriter create(const std::filesystem::path& path) {
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot create " + path.string());
    }
    IntervalWriter w(path, 0);
    w.write_header();
    return w;
  }

  // Reopens an existing spill file, discarding everything after the first
  // `keep` records.
  static IntervalWriter reopen(const std::filesystem::path& path, std::uint64_t keep) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot open " + path.string() + ": " + ec.message());
    {
      std::ifstream in(path, std::ios::binary);
      std::uint8_t header[kIntervalHeaderSize] = {};
      in.read(reinterpret_cast<char*>(header), sizeof header);
      io::ByteReader r(std::span<const std::uint8_t>(header, static_cast<std::size_t>(in.gcount())), path.string());
      if (r.raw(4) != kIntervalMagic) throw FormatError(path.string() + ": not an interval file (bad magic)");
      if (r.u16() != kIntervalVersion) throw VersionMismatchError(path.string() + ": unsupported interval file version");
    }
    const auto needed = kIntervalHeaderSize + keep * kIntervalRecordSize;
    if (size < needed)
      throw TruncatedFileError(path.string() + ": holds fewer than the " + std::to_string(keep) +
                               " intervals recorded in the checkpoint");
    std::filesystem::resize_file(path, needed, ec);
    if (ec) throw IoError("cannot truncate " + path.string() + ": " + ec.message());
    IntervalWriter w(path, keep);
    w.write_header();
    return w;
  }

  IntervalWriter(IntervalWriter&&) noexcept = default;
  IntervalWriter& operator=(IntervalWriter&&) noexcept = default;

  void write(const Interval& iv) {
    if (iv.dimension < 0 || iv.dimension > 255) throw ContractError("interval dimension out of range");
    std::uint8_t rec[kIntervalRecordSize];
    encode_interval(rec, iv);
    buffer_.insert(buffer_.end(), rec, rec + kIntervalRecordSize);
    ++count_;
    if (buffer_.size() >= (1U << 16)) flush();
  }

  void flush() {
    out_.seekp(0, std::ios::end);
    out_.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
    write_header();
  }

  void finalize() {
    flush();
    out_.close();
    if (out_.fail()) throw IoError("cannot write " + path_.string());
  }

  std::uint64_t count() const noexcept { return count_; }

 private:
  IntervalWriter(const std::filesystem::path& path, std::uint64_t count)
      : path_(path), out_(path, std::ios::binary | std::ios::in | std::ios::out), count_(count) {
    if (!out_) throw IoError("cannot open " + path.string());
  }

  void write_header() {
    io::ByteWriter w;
    w.raw(kIntervalMagic);
    w.u16(kIntervalVersion);
    w.u64(count_);
    out_.seekp(0);
    out_.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    out_.flush();
    if (!out_) throw IoError("cannot write " + path_.string());
  }

  std::filesystem::path path_;
  std::fstream out_;
  std::vector<std::uint8_t> buffer_;
  std::uint64_t count_ = 0;
};

inline void spill_interval(IntervalWriter& writer, const Interval& iv) { writer.write(iv); }

inline std::vector<Interval> read_intervals(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  if (bytes.size() < kIntervalHeaderSize) throw TruncatedFileError(path.string() + ": shorter than an interval header");
  if (r.raw(4) != kIntervalMagic) throw FormatError(path.string() + ": not an interval file (bad magic)");
  const auto version = r.u16();
  if (version != kIntervalVersion)
    throw VersionMismatchError(path.string() + ": interval file version " + std::to_string(version));
  const auto count = r.u64();
  if (r.remaining() % kIntervalRecordSize != 0)
    throw TruncatedFileError(path.string() + ": partial interval record");
  if (r.remaining() / kIntervalRecordSize != count)
    throw FormatError(path.string() + ": header claims " + std::to_string(count) + " intervals, file holds " +
                      std::to_string(r.remaining() / kIntervalRecordSize));
  std::vector<Interval> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Interval iv;
    iv.dimension = r.u8();
    iv.birth = r.f64();
    iv.death = r.f64();
    out.push_back(iv);
  }
  return out;
}

}  // namespace ripstream
