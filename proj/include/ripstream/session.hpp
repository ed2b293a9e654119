#pragma once

// Interleaved driver: edges are read one at a time from the sorted edge file,
// each edge's new simplices go straight into the persistence state, and each
// closed interval goes straight to the spill file. At most one edge's batch of
// simplices is alive outside the persistence state at any moment.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clique_engine.hpp"
#include "core_types.hpp"
#include "edge_pipeline.hpp"
#include "errors.hpp"
#include "persistence_engine.hpp"
#include "state_store.hpp"

namespace ripstream {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{256} << 20;

// Self-deleting scratch directory.
class ScratchDir {
 public:
  explicit ScratchDir(std::string_view prefix = "ripstream") {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = base / (std::string(prefix) + "-" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw IoError("cannot create scratch directory under " + base.string());
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Point cloud or explicit distance matrix, as selected by the metric.
struct InputData {
  Metric metric = Metric::euclidean;
  PointCloud points;
  LowerDistanceMatrix matrix;

  std::size_t vertex_count() const noexcept { return metric == Metric::matrix ? matrix.n : points.size(); }
};

inline InputData load_input(const std::filesystem::path& path, Metric metric, bool has_header) {
  InputData in;
  in.metric = metric;
  if (metric == Metric::matrix)
    in.matrix = read_distance_matrix(path);
  else
    in.points = read_point_cloud(path, has_header);
  return in;
}

inline EdgeFile build_edge_file(const InputData& input, Filtration max_epsilon, const std::filesystem::path& out,
                                std::size_t memory_budget) {
  auto unsorted_path = out;
  unsorted_path += ".unsorted";
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{unsorted_path};
  const auto unsorted = input.metric == Metric::matrix ? compute_edges(input.matrix, max_epsilon, unsorted_path)
                                                       : compute_edges(input.points, input.metric, max_epsilon, unsorted_path);
  return external_sort_edges(unsorted, out, memory_budget);
}

// Feeds the n vertices into the persistence state, one entry alive at a time.
inline void seed_vertices(ComputationState& st) {
  for (std::size_t v = 0; v < st.registry.vertex_count(); ++v) {
    SimplexEntry vertex({static_cast<VertexId>(v)}, 0.0);
    st.persistence.add_simplex(vertex);
  }
  st.stats.simplices_emitted += st.registry.vertex_count();
  st.stats.peak_registry = std::max<std::uint64_t>(st.stats.peak_registry, st.registry.size());
}

// Text sidecar with one line per closed interval:
//   dim birth death | v-v-v v-v-v ...
class CycleWriter {
 public:
  static CycleWriter create(const std::filesystem::path& path) {
    CycleWriter w;
    w.out_.open(path, std::ios::trunc);
    if (!w.out_) throw IoError("cannot create " + path.string());
    return w;
  }

  // Keeps the first `keep` lines of an existing sidecar and appends after them.
  static CycleWriter reopen(const std::filesystem::path& path, std::uint64_t keep) {
    std::vector<std::string> lines;
    {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      std::string line;
      while (lines.size() < keep && std::getline(in, line)) lines.push_back(std::move(line));
    }
    if (lines.size() < keep) throw TruncatedFileError(path.string() + ": fewer cycles than closed intervals");
    CycleWriter w = create(path);
    for (const auto& l : lines) w.out_ << l << '\n';
    return w;
  }

  void write(const Interval& iv, const std::vector<std::vector<VertexId>>& cycle) {
    out_ << iv.dimension << ' ' << format_exact(iv.birth) << ' ' << format_exact(iv.death) << " |";
    for (const auto& simplex : cycle) {
      out_ << ' ';
      for (std::size_t i = 0; i < simplex.size(); ++i) out_ << (i ? "-" : "") << simplex[i];
    }
    out_ << '\n';
  }

  void flush() {
    out_.flush();
    if (!out_) throw IoError("cannot write representative cycles");
  }

 private:
  std::ofstream out_;
};

struct AdvanceLimits {
  Filtration stop_epsilon = kInfinity;
  std::optional<std::uint64_t> edge_limit;  // edges to process in this call
  std::uint64_t checkpoint_every = 0;       // 0 = never
  std::optional<std::filesystem::path> checkpoint;
  const std::atomic<bool>* interrupt = nullptr;
};

struct AdvanceResult {
  std::uint64_t edges = 0;
  bool interrupted = false;
};

inline void flush_and_checkpoint(const ComputationState& st, IntervalWriter& spill, CycleWriter* cycles,
                                 const std::optional<std::filesystem::path>& checkpoint) {
  spill.flush();
  if (cycles) cycles->flush();
  if (checkpoint) checkpoint_write(st, *checkpoint);
}

// Streams edges <= stop_epsilon from the cursor through the clique engine and
// the persistence state.
inline AdvanceResult advance(ComputationState& st, EdgeCursor& cursor, IntervalWriter& spill, CycleWriter* cycles,
                             const AdvanceLimits& limits) {
  AdvanceResult result;
  while (true) {
    if (limits.interrupt && limits.interrupt->load()) {
      result.interrupted = true;
      break;
    }
    if (limits.edge_limit && result.edges >= *limits.edge_limit) break;
    const auto offset = cursor.offset();
    const auto edge = cursor.next();
    if (!edge) break;
    if (edge->length > limits.stop_epsilon) {
      cursor.seek(offset);
      break;
    }

    {
      const auto batch = st.registry.process_edge(*edge);
      st.stats.simplices_emitted += batch.size();
      st.stats.largest_batch = std::max<std::uint64_t>(st.stats.largest_batch, batch.size());
      st.stats.peak_registry = std::max<std::uint64_t>(st.stats.peak_registry, st.registry.size());
      for (const auto& simplex : batch)
        if (auto closed = st.persistence.add_simplex(simplex)) {
          spill_interval(spill, *closed);
          if (cycles) cycles->write(*closed, st.persistence.last_representative());
        }
    }

    st.cursor_offset = cursor.offset();
    st.epsilon_reached = edge->length;
    ++st.edges_consumed;
    ++result.edges;
    if (limits.checkpoint_every != 0 && st.edges_consumed % limits.checkpoint_every == 0)
      flush_and_checkpoint(st, spill, cycles, limits.checkpoint);
  }
  return result;
}

struct IntervalTally {
  std::vector<std::uint64_t> finite_per_dim;
  std::vector<std::uint64_t> infinite_per_dim;
  std::vector<Interval> longest;  // a few of the longest finite bars per degree
};

inline IntervalTally tally_intervals(const std::vector<Interval>& intervals, int max_dim, std::size_t keep_per_dim) {
  IntervalTally t;
  t.finite_per_dim.assign(static_cast<std::size_t>(max_dim), 0);
  t.infinite_per_dim.assign(static_cast<std::size_t>(max_dim), 0);
  std::vector<std::vector<Interval>> finite(static_cast<std::size_t>(max_dim));
  for (const auto& iv : intervals) {
    if (iv.dimension < 0 || iv.dimension >= max_dim) continue;
    if (iv.is_infinite()) {
      ++t.infinite_per_dim[iv.dimension];
      t.longest.push_back(iv);
    } else {
      ++t.finite_per_dim[iv.dimension];
      if (iv.length() > 0) finite[iv.dimension].push_back(iv);
    }
  }
  for (auto& bucket : finite) {
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const Interval& a, const Interval& b) { return a.length() > b.length(); });
    if (bucket.size() > keep_per_dim) bucket.resize(keep_per_dim);
    t.longest.insert(t.longest.end(), bucket.begin(), bucket.end());
  }
  std::stable_sort(t.longest.begin(), t.longest.end(), interval_less);
  return t;
}

struct RunSummary {
  std::size_t vertex_count = 0;
  std::uint64_t edges_in_file = 0;
  std::uint64_t edges_consumed = 0;
  std::uint64_t edges_this_run = 0;
  Filtration epsilon_reached = 0.0;
  std::uint64_t closed_intervals = 0;
  std::vector<std::size_t> betti;
  RunStats stats;
  CascadeStats cascades;
  std::int64_t peak_live_simplices = 0;
  bool interrupted = false;
  IntervalTally tally;
};

struct ComputeOptions {
  std::filesystem::path input;
  Metric metric = Metric::euclidean;
  bool input_header = false;
  Filtration max_epsilon = kInfinity;
  int max_dim = 3;
  std::filesystem::path edges;
  std::filesystem::path intervals;
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t checkpoint_every = 0;
  std::optional<Filtration> stop_epsilon;
  std::optional<std::uint64_t> edge_limit;
  std::size_t memory_budget = kDefaultMemoryBudget;
  bool representatives = false;
  std::size_t report_per_dim = 5;
  const std::atomic<bool>* interrupt = nullptr;
};

struct ResumeOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path edges;
  std::filesystem::path intervals;
  std::optional<Filtration> stop_epsilon;
  std::optional<std::uint64_t> edge_limit;
  std::uint64_t checkpoint_every = 0;
  std::size_t report_per_dim = 5;
  const std::atomic<bool>* interrupt = nullptr;
};

namespace detail {

inline std::filesystem::path cycles_path(const std::filesystem::path& intervals) {
  auto p = intervals;
  p += ".cycles";
  return p;
}

// Shared tail of compute and resume.
inline RunSummary run_and_finish(ComputationState& st, EdgeCursor& cursor, IntervalWriter& spill,
                                 std::optional<CycleWriter>& cycles, const AdvanceLimits& limits,
                                 const std::filesystem::path& intervals_path, std::size_t report_per_dim) {
  simplex_tracking::reset_peak();
  const auto adv = advance(st, cursor, spill, cycles ? &*cycles : nullptr, limits);

  RunSummary s;
  s.peak_live_simplices = simplex_tracking::peak();
  s.interrupted = adv.interrupted;
  s.edges_this_run = adv.edges;

  if (adv.interrupted) {
    flush_and_checkpoint(st, spill, cycles ? &*cycles : nullptr, limits.checkpoint);
    spill.finalize();
  } else {
    for (const auto& iv : st.persistence.open_intervals()) spill_interval(spill, iv);
    spill.finalize();
    if (cycles) cycles->flush();
    if (limits.checkpoint) checkpoint_write(st, *limits.checkpoint);
  }

  s.vertex_count = st.registry.vertex_count();
  s.edges_in_file = cursor.record_count();
  s.edges_consumed = st.edges_consumed;
  s.epsilon_reached = st.epsilon_reached;
  s.closed_intervals = st.persistence.closed_count();
  s.betti = st.persistence.betti_numbers();
  s.stats = st.stats;
  s.cascades = st.persistence.cascade_stats();
  s.tally = tally_intervals(read_intervals(intervals_path), st.persistence.max_dim(), report_per_dim);
  return s;
}

}  // namespace detail

// compute_edges -> external sort -> interleaved clique/persistence stream.
inline RunSummary compute(const ComputeOptions& opts) {
  if (opts.max_dim < 1 || opts.max_dim > 254) throw InputError("max dimension must lie in 1..254");
  if (!(opts.max_epsilon >= 0)) throw InputError("max epsilon must be a non-negative number");
  const Filtration stop = opts.stop_epsilon.value_or(opts.max_epsilon);
  if (!(stop >= 0)) throw InputError("stop epsilon must be a non-negative number");
  if (stop > opts.max_epsilon) throw InputError("stop epsilon exceeds max epsilon");
  if (opts.checkpoint_every != 0 && !opts.checkpoint) throw InputError("--checkpoint-every needs --checkpoint");

  const auto input = load_input(opts.input, opts.metric, opts.input_header);
  const auto edge_file = build_edge_file(input, opts.max_epsilon, opts.edges, opts.memory_budget);

  ComputationState st(input.vertex_count(), opts.max_dim, opts.representatives);
  st.fingerprint = edge_file_fingerprint(edge_file.path);
  seed_vertices(st);

  EdgeCursor cursor(edge_file.path);
  auto spill = IntervalWriter::create(opts.intervals);
  std::optional<CycleWriter> cycles;
  if (opts.representatives) cycles = CycleWriter::create(detail::cycles_path(opts.intervals));

  AdvanceLimits limits{stop, opts.edge_limit, opts.checkpoint_every, opts.checkpoint, opts.interrupt};
  return detail::run_and_finish(st, cursor, spill, cycles, limits, opts.intervals, opts.report_per_dim);
}

// Continues from a checkpoint; the interval file is cut back to the closed
// intervals the checkpoint accounts for, then extended.
inline RunSummary resume(const ResumeOptions& opts) {
  if (opts.stop_epsilon && !(*opts.stop_epsilon >= 0)) throw InputError("stop epsilon must be a non-negative number");
  auto st = checkpoint_read(opts.checkpoint, opts.edges);

  EdgeCursor cursor(opts.edges);
  cursor.seek(st.cursor_offset);
  auto spill = IntervalWriter::reopen(opts.intervals, st.persistence.closed_count());
  std::optional<CycleWriter> cycles;
  if (st.persistence.keeps_representatives())
    cycles = CycleWriter::reopen(detail::cycles_path(opts.intervals), st.persistence.closed_count());

  AdvanceLimits limits{opts.stop_epsilon.value_or(kInfinity), opts.edge_limit, opts.checkpoint_every, opts.checkpoint,
                       opts.interrupt};
  return detail::run_and_finish(st, cursor, spill, cycles, limits, opts.intervals, opts.report_per_dim);
}

// Emits the whole filtration (vertices, then every edge's batch) for an
// already sorted edge file. Used by the self-check and tests.
template <class Sink>
void stream_filtration(const std::filesystem::path& sorted_edges, std::size_t vertex_count, int max_dim, Sink&& sink,
                       RetentionRule rule = RetentionRule::subset) {
  CliqueRegistry registry(vertex_count, max_dim, rule);
  for (std::size_t v = 0; v < vertex_count; ++v) sink(SimplexEntry({static_cast<VertexId>(v)}, 0.0));
  EdgeCursor cursor(sorted_edges);
  while (auto edge = cursor.next())
    for (const auto& s : registry.process_edge(*edge)) sink(s);
}

}  // namespace ripstream
