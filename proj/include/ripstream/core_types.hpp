#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ripstream {

using VertexId = std::uint32_t;
using Filtration = double;

inline constexpr Filtration kInfinity = std::numeric_limits<Filtration>::infinity();

// Canonical orientation: source < target.
struct Edge {
  Filtration length = 0.0;
  VertexId source = 0;
  VertexId target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Total order of edge records: (length, source, target).
inline bool edge_less(const Edge& a, const Edge& b) noexcept {
  if (a.length != b.length) return a.length < b.length;
  if (a.source != b.source) return a.source < b.source;
  return a.target < b.target;
}

// Strictly increasing, non-empty vertex sequence.
using Clique = std::vector<VertexId>;

inline bool is_strictly_increasing(std::span<const VertexId> vs) noexcept {
  return std::adjacent_find(vs.begin(), vs.end(), std::greater_equal<>{}) == vs.end();
}

inline bool is_subset(std::span<const VertexId> sub, std::span<const VertexId> super) noexcept {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

struct VertexSeqHash {
  std::size_t operator()(std::span<const VertexId> vs) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (VertexId v : vs) {
      h ^= v;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const std::vector<VertexId>& vs) const noexcept {
    return (*this)(std::span<const VertexId>(vs));
  }
};

// Live-instance accounting for SimplexEntry. The persistence state stores its
// own compact records, so this counts exactly the entries held by the
// generation side of the pipeline.
namespace simplex_tracking {
inline std::atomic<std::int64_t> live_count{0};
inline std::atomic<std::int64_t> peak_count{0};

inline void on_construct() noexcept {
  const auto now = live_count.fetch_add(1, std::memory_order_relaxed) + 1;
  auto peak = peak_count.load(std::memory_order_relaxed);
  while (now > peak && !peak_count.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}
inline void on_destroy() noexcept { live_count.fetch_sub(1, std::memory_order_relaxed); }

inline std::int64_t live() noexcept { return live_count.load(std::memory_order_relaxed); }
inline std::int64_t peak() noexcept { return peak_count.load(std::memory_order_relaxed); }
inline void reset_peak() noexcept { peak_count.store(live(), std::memory_order_relaxed); }
}  // namespace simplex_tracking

// A simplex of the filtration: sorted vertices plus the length of its longest
// edge (0 for vertices).
struct SimplexEntry {
  std::vector<VertexId> vertices;
  Filtration filtration = 0.0;

  SimplexEntry() noexcept { simplex_tracking::on_construct(); }
  SimplexEntry(std::vector<VertexId> vs, Filtration f) : vertices(std::move(vs)), filtration(f) {
    simplex_tracking::on_construct();
  }
  SimplexEntry(const SimplexEntry& o) : vertices(o.vertices), filtration(o.filtration) {
    simplex_tracking::on_construct();
  }
  SimplexEntry(SimplexEntry&& o) noexcept : vertices(std::move(o.vertices)), filtration(o.filtration) {
    simplex_tracking::on_construct();
  }
  SimplexEntry& operator=(const SimplexEntry&) = default;
  SimplexEntry& operator=(SimplexEntry&&) noexcept = default;
  ~SimplexEntry() { simplex_tracking::on_destroy(); }

  int dimension() const noexcept { return static_cast<int>(vertices.size()) - 1; }

  friend bool operator==(const SimplexEntry& a, const SimplexEntry& b) noexcept {
    return a.filtration == b.filtration && a.vertices == b.vertices;
  }
};

// (filtration, dimension, lexicographic vertices). Faces precede cofaces.
inline std::weak_ordering compare_simplices(const SimplexEntry& a, const SimplexEntry& b) noexcept {
  if (a.filtration < b.filtration) return std::weak_ordering::less;
  if (b.filtration < a.filtration) return std::weak_ordering::greater;
  if (a.vertices.size() != b.vertices.size()) return a.vertices.size() <=> b.vertices.size();
  return std::lexicographical_compare_three_way(a.vertices.begin(), a.vertices.end(),
                                                b.vertices.begin(), b.vertices.end());
}

struct SimplexLess {
  bool operator()(const SimplexEntry& a, const SimplexEntry& b) const noexcept {
    return compare_simplices(a, b) < 0;
  }
};

// A persistence interval; death == kInfinity while the class is alive.
struct Interval {
  int dimension = 0;
  Filtration birth = 0.0;
  Filtration death = kInfinity;

  bool is_infinite() const noexcept { return death == kInfinity; }
  Filtration length() const noexcept { return death - birth; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline bool interval_less(const Interval& a, const Interval& b) noexcept {
  if (a.dimension != b.dimension) return a.dimension < b.dimension;
  if (a.birth != b.birth) return a.birth < b.birth;
  return a.death < b.death;
}

// Shortest decimal text that parses back to the same double.
inline std::string format_exact(double x) {
  if (x == kInfinity) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace ripstream
