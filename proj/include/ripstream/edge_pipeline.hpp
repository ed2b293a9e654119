#pragma once

// Disk-resident filtered neighbourhood graph.
//
// Edge file layout (all little-endian):
//   header  16 bytes: "SPHE" | u16 version | u16 reserved | u64 record_count
//   record  16 bytes: f64 length | u32 source | u32 target
// Sorted files order records by (length, source, target).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binary_io.hpp"
#include "core_types.hpp"
#include "errors.hpp"

namespace ripstream {

inline constexpr std::string_view kEdgeMagic = "SPHE";
inline constexpr std::uint16_t kEdgeFormatVersion = 1;
inline constexpr std::uint64_t kEdgeHeaderSize = 16;
inline constexpr std::uint64_t kEdgeRecordSize = 16;

// Smallest accepted sort budget: one run of 64 records.
inline constexpr std::size_t kMinMemoryBudget = 64 * kEdgeRecordSize;

// Row-major n x d coordinates.
struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> row(std::size_t i) const noexcept { return {coords.data() + i * dim, dim}; }
};

// Strict lower triangle, row by row: d(1,0), d(2,0), d(2,1), d(3,0), ...
struct LowerDistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    if (i < j) std::swap(i, j);
    return values[i * (i - 1) / 2 + j];
  }
};

enum class Metric { euclidean, manhattan, matrix };

inline Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "manhattan") return Metric::manhattan;
  if (name == "matrix") return Metric::matrix;
  throw InputError("unknown metric '" + std::string(name) + "'");
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

inline double manhattan_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::fabs(a[k] - b[k]);
  return sum;
}

namespace detail {

inline std::vector<double> parse_numbers(std::string_view line, std::size_t line_no, const std::string& source) {
  std::vector<double> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    const char* first = line.data() + i;
    const char* last = line.data() + j;
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
      throw InputError(source + ": row " + std::to_string(line_no) + ": cannot parse '" +
                       std::string(line.substr(i, j - i)) + "'");
    if (std::isnan(value))
      throw InputError(source + ": row " + std::to_string(line_no) + ": NaN value");
    if (!std::isfinite(value))
      throw InputError(source + ": row " + std::to_string(line_no) + ": non-finite value");
    out.push_back(value);
    i = j;
  }
  return out;
}

inline void encode_edge(std::uint8_t* out, const Edge& e) noexcept {
  io::put_f64(out, e.length);
  io::put_le(out + 8, e.source);
  io::put_le(out + 12, e.target);
}

inline Edge decode_edge(const std::uint8_t* in) noexcept {
  return Edge{io::get_f64(in), io::get_le<std::uint32_t>(in + 8), io::get_le<std::uint32_t>(in + 12)};
}

struct EdgeHeader {
  std::uint64_t record_count = 0;
};

inline EdgeHeader decode_edge_header(std::span<const std::uint8_t> bytes, const std::string& what) {
  io::ByteReader r(bytes, what);
  if (r.raw(4) != kEdgeMagic) throw FormatError(what + ": not an edge file (bad magic)");
  const auto version = r.u16();
  if (version != kEdgeFormatVersion)
    throw VersionMismatchError(what + ": edge file version " + std::to_string(version) + ", expected " +
                               std::to_string(kEdgeFormatVersion));
  r.u16();
  return EdgeHeader{r.u64()};
}

// Sequential, buffered reader of raw edge records starting at a byte offset.
class RecordReader {
 public:
  RecordReader(const std::filesystem::path& path, std::uint64_t offset, std::size_t buffer_records)
      : path_(path), in_(path, std::ios::binary), buffer_(std::max<std::size_t>(1, buffer_records) * kEdgeRecordSize) {
    if (!in_) throw IoError("cannot open " + path.string());
    size_ = std::filesystem::file_size(path);
    seek(offset);
  }

  void seek(std::uint64_t offset) {
    offset_ = offset;
    begin_ = end_ = 0;
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    if (!in_) throw IoError("cannot seek in " + path_.string());
  }

  std::uint64_t offset() const noexcept { return offset_; }
  std::uint64_t size() const noexcept { return size_; }

  // Returns false at end of file; throws on a partial trailing record.
  bool next(Edge& e) {
    if (offset_ >= size_) return false;
    if (size_ - offset_ < kEdgeRecordSize)
      throw StreamCorruptionError(path_.string() + ": truncated record at offset " + std::to_string(offset_));
    if (end_ - begin_ < kEdgeRecordSize) fill();
    e = decode_edge(buffer_.data() + begin_);
    begin_ += kEdgeRecordSize;
    offset_ += kEdgeRecordSize;
    return true;
  }

 private:
  void fill() {
    const auto want = std::min<std::uint64_t>(buffer_.size(), size_ - offset_);
    in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(want));
    if (static_cast<std::uint64_t>(in_.gcount()) != want) throw IoError("short read from " + path_.string());
    begin_ = 0;
    end_ = static_cast<std::size_t>(want);
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<std::uint8_t> buffer_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t size_ = 0;
};

}  // namespace detail

struct EdgeFile {
  std::filesystem::path path;
  std::uint64_t record_count = 0;
  Filtration max_epsilon = kInfinity;
};

// Buffered writer; the header count is backfilled by finish().
class EdgeWriter {
 public:
  explicit EdgeWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot create " + path.string());
    write_header(0);
    buffer_.reserve(kBufferBytes);
  }

  void write(const Edge& e) {
    const auto at = buffer_.size();
    buffer_.resize(at + kEdgeRecordSize);
    detail::encode_edge(buffer_.data() + at, e);
    ++count_;
    if (buffer_.size() >= kBufferBytes) flush();
  }

  std::uint64_t finish() {
    flush();
    out_.seekp(0);
    write_header(count_);
    out_.close();
    if (out_.fail()) throw IoError("cannot write " + path_.string());
    return count_;
  }

 private:
  static constexpr std::size_t kBufferBytes = 1 << 16;

  void write_header(std::uint64_t count) {
    io::ByteWriter w;
    w.raw(kEdgeMagic);
    w.u16(kEdgeFormatVersion);
    w.u16(0);
    w.u64(count);
    out_.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out_) throw IoError("cannot write " + path_.string());
  }

  void flush() {
    out_.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) throw IoError("cannot write " + path_.string());
    buffer_.clear();
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<std::uint8_t> buffer_;
  std::uint64_t count_ = 0;
};

// Validates magic, version and record-size alignment; returns the header count.
inline std::uint64_t read_edge_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint8_t raw[kEdgeHeaderSize];
  in.read(reinterpret_cast<char*>(raw), sizeof raw);
  if (in.gcount() != static_cast<std::streamsize>(sizeof raw))
    throw TruncatedFileError(path.string() + ": shorter than an edge file header");
  const auto header = detail::decode_edge_header(raw, path.string());
  const auto body = std::filesystem::file_size(path) - kEdgeHeaderSize;
  if (body % kEdgeRecordSize != 0)
    throw StreamCorruptionError(path.string() + ": file length is not a whole number of records");
  if (body / kEdgeRecordSize != header.record_count)
    throw StreamCorruptionError(path.string() + ": header claims " + std::to_string(header.record_count) +
                                " records, file holds " + std::to_string(body / kEdgeRecordSize));
  return header.record_count;
}

inline PointCloud read_point_cloud(const std::filesystem::path& path, bool has_header = false) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = !has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t\r")] == '#') continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    auto row = detail::parse_numbers(line, line_no, path.string());
    if (cloud.dim == 0) cloud.dim = row.size();
    if (row.size() != cloud.dim)
      throw InputError(path.string() + ": row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                       " coordinates, expected " + std::to_string(cloud.dim));
    cloud.coords.insert(cloud.coords.end(), row.begin(), row.end());
  }
  if (in.bad()) throw IoError("cannot read " + path.string());
  if (cloud.size() == 0) throw InputError(path.string() + ": no points");
  if (cloud.size() > std::numeric_limits<VertexId>::max()) throw InputError(path.string() + ": too many points");
  return cloud;
}

// Lower-triangular text: numbers in row order, any line breaks. The entry
// count m must be n(n-1)/2 for some n >= 2.
inline LowerDistanceMatrix read_distance_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  LowerDistanceMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto row = detail::parse_numbers(line, line_no, path.string());
    for (double v : row)
      if (v < 0) throw InputError(path.string() + ": row " + std::to_string(line_no) + ": negative distance");
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  if (m.values.empty()) throw InputError(path.string() + ": no distances");
  std::size_t n = 2;
  while (n * (n - 1) / 2 < m.values.size()) ++n;
  if (n * (n - 1) / 2 != m.values.size())
    throw InputError(path.string() + ": " + std::to_string(m.values.size()) +
                     " entries is not a lower-triangular matrix size");
  m.n = n;
  return m;
}

namespace detail {
inline void check_epsilon(Filtration max_epsilon) {
  if (!(max_epsilon >= 0)) throw InputError("max epsilon must be a non-negative number");
}

template <class Distance>
EdgeFile write_pair_distances(std::size_t n, Distance&& distance, Filtration max_epsilon,
                              const std::filesystem::path& out) {
  check_epsilon(max_epsilon);
  EdgeWriter writer(out);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(i, j);
      if (d <= max_epsilon) writer.write(Edge{d, static_cast<VertexId>(i), static_cast<VertexId>(j)});
    }
  return EdgeFile{out, writer.finish(), max_epsilon};
}
}  // namespace detail

// Writes every pair (i < j) with distance <= max_epsilon, in generation order.
inline EdgeFile compute_edges(const PointCloud& points, Metric metric, Filtration max_epsilon,
                              const std::filesystem::path& out) {
  if (metric == Metric::matrix) throw InputError("matrix metric requires a distance matrix input");
  if (points.size() == 0) throw InputError("empty point cloud");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (double x : points.row(i))
      if (std::isnan(x)) throw InputError("NaN coordinate in row " + std::to_string(i));
  if (metric == Metric::euclidean)
    return detail::write_pair_distances(
        points.size(), [&](std::size_t i, std::size_t j) { return euclidean_distance(points.row(i), points.row(j)); },
        max_epsilon, out);
  return detail::write_pair_distances(
      points.size(), [&](std::size_t i, std::size_t j) { return manhattan_distance(points.row(i), points.row(j)); },
      max_epsilon, out);
}

inline EdgeFile compute_edges(const LowerDistanceMatrix& matrix, Filtration max_epsilon,
                              const std::filesystem::path& out) {
  return detail::write_pair_distances(
      matrix.n, [&](std::size_t i, std::size_t j) { return matrix(i, j); }, max_epsilon, out);
}

namespace detail {

// Removes the listed files when it goes out of scope.
class TempFiles {
 public:
  TempFiles() = default;
  TempFiles(const TempFiles&) = delete;
  TempFiles& operator=(const TempFiles&) = delete;
  ~TempFiles() {
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
  const std::filesystem::path& add(std::filesystem::path p) { return paths_.emplace_back(std::move(p)); }
  void release(const std::filesystem::path& p) {
    std::error_code ec;
    std::filesystem::remove(p, ec);
    std::erase(paths_, p);
  }

 private:
  std::vector<std::filesystem::path> paths_;
};

inline void merge_runs(std::span<const std::filesystem::path> runs, const std::filesystem::path& out,
                       std::size_t buffer_records) {
  std::vector<RecordReader> readers;
  readers.reserve(runs.size());
  for (const auto& r : runs) readers.emplace_back(r, kEdgeHeaderSize, buffer_records);

  using Head = std::pair<Edge, std::size_t>;
  auto later = [](const Head& a, const Head& b) {
    if (edge_less(b.first, a.first)) return true;
    if (edge_less(a.first, b.first)) return false;
    return a.second > b.second;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  Edge e;
  for (std::size_t i = 0; i < readers.size(); ++i)
    if (readers[i].next(e)) heap.emplace(e, i);

  EdgeWriter writer(out);
  while (!heap.empty()) {
    auto [edge, src] = heap.top();
    heap.pop();
    writer.write(edge);
    if (readers[src].next(e)) heap.emplace(e, src);
  }
  writer.finish();
}

}  // namespace detail

// Run-merge external sort. Runs of at most memory_budget bytes are sorted in
// memory; merging is k-way with fan-in capped at 64, in as many passes as
// needed. Temporary run files live next to `out`.
inline EdgeFile external_sort_edges(const EdgeFile& in, const std::filesystem::path& out, std::size_t memory_budget) {
  if (memory_budget < kMinMemoryBudget)
    throw InputError("memory budget " + std::to_string(memory_budget) + " is below the minimum of " +
                     std::to_string(kMinMemoryBudget) + " bytes");
  const auto count = read_edge_header(in.path);
  const std::size_t run_capacity = memory_budget / kEdgeRecordSize;

  detail::RecordReader reader(in.path, kEdgeHeaderSize, std::min<std::size_t>(run_capacity, 1 << 12));
  std::vector<Edge> run;
  run.reserve(std::min<std::uint64_t>(run_capacity, count));

  auto fill_run = [&] {
    run.clear();
    Edge e;
    while (run.size() < run_capacity && reader.next(e)) run.push_back(e);
    std::sort(run.begin(), run.end(), edge_less);
  };
  auto write_run = [&](const std::filesystem::path& path) {
    EdgeWriter w(path);
    for (const auto& e : run) w.write(e);
    w.finish();
  };

  if (count <= run_capacity) {
    fill_run();
    write_run(out);
    return EdgeFile{out, count, in.max_epsilon};
  }

  detail::TempFiles temps;
  std::vector<std::filesystem::path> runs;
  for (std::size_t k = 0; reader.offset() < reader.size(); ++k) {
    fill_run();
    auto path = out;
    path += ".run" + std::to_string(k);
    runs.push_back(temps.add(path));
    write_run(runs.back());
  }
  run.clear();
  run.shrink_to_fit();

  const std::size_t fan_in = std::clamp<std::size_t>(run_capacity / 16, 2, 64);
  const std::size_t buffer_records = std::max<std::size_t>(1, run_capacity / (fan_in + 1));
  std::size_t generation = 0;
  while (runs.size() > fan_in) {
    std::vector<std::filesystem::path> next;
    for (std::size_t i = 0; i < runs.size(); i += fan_in) {
      const auto group = std::span(runs).subspan(i, std::min(fan_in, runs.size() - i));
      auto path = out;
      path += ".merge" + std::to_string(generation) + "_" + std::to_string(next.size());
      next.push_back(temps.add(path));
      detail::merge_runs(group, next.back(), buffer_records);
      for (const auto& r : group) temps.release(r);
    }
    runs = std::move(next);
    ++generation;
  }
  detail::merge_runs(runs, out, buffer_records);
  return EdgeFile{out, count, in.max_epsilon};
}

// Forward-only reader over a sorted edge file. The byte offset of the next
// record is the checkpointable position.
class EdgeCursor {
 public:
  explicit EdgeCursor(const std::filesystem::path& path, std::size_t buffer_records = 4096)
      : record_count_(open_header(path)), reader_(path, kEdgeHeaderSize, buffer_records) {}

  std::optional<Edge> next() {
    Edge e;
    if (!reader_.next(e)) return std::nullopt;
    return e;
  }

  std::uint64_t offset() const noexcept { return reader_.offset(); }

  void seek(std::uint64_t offset) {
    if (offset < kEdgeHeaderSize || (offset - kEdgeHeaderSize) % kEdgeRecordSize != 0 || offset > reader_.size())
      throw FormatError("edge cursor offset " + std::to_string(offset) + " is not a record boundary");
    reader_.seek(offset);
  }

  std::uint64_t record_count() const noexcept { return record_count_; }

 private:
  // Header checks happen up front; a partial trailing record is reported when
  // the cursor reaches it.
  static std::uint64_t open_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::uint8_t raw[kEdgeHeaderSize];
    in.read(reinterpret_cast<char*>(raw), sizeof raw);
    if (in.gcount() != static_cast<std::streamsize>(sizeof raw))
      throw TruncatedFileError(path.string() + ": shorter than an edge file header");
    const auto header = detail::decode_edge_header(raw, path.string());
    const auto body = std::filesystem::file_size(path) - kEdgeHeaderSize;
    if (body % kEdgeRecordSize == 0 && body / kEdgeRecordSize != header.record_count)
      throw StreamCorruptionError(path.string() + ": record count does not match file length");
    return header.record_count;
  }

  std::uint64_t record_count_;
  detail::RecordReader reader_;
};

// Identity of an edge file for checkpoint matching: FNV-1a over every byte.
inline std::uint64_t edge_file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  io::Fnv1a64 h;
  std::vector<std::uint8_t> chunk(1 << 20);
  while (in) {
    in.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
    h.update(std::span(chunk.data(), static_cast<std::size_t>(in.gcount())));
  }
  if (in.bad()) throw IoError("cannot read " + path.string());
  return h.digest();
}

}  // namespace ripstream
