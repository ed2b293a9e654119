#pragma once

// Incremental persistence over Z/2.
//
// Simplices arrive one at a time with faces first and non-decreasing
// filtration. Each new boundary is reduced against the cascades stored for
// already-paired marked simplices, youngest term first:
//   * reduces to zero        -> the simplex is marked; a class is born.
//   * youngest term is an    -> that class dies here; the reduced chain becomes
//     unpaired marked simplex   its cascade (a cycle representing the class).
// Closed intervals are returned to the caller and never kept in the state.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core_types.hpp"
#include "errors.hpp"

namespace ripstream {

using StreamIndex = std::uint32_t;
inline constexpr StreamIndex kNoPartner = std::numeric_limits<StreamIndex>::max();

// Z/2 chain: sorted stream indices.
using Chain = std::vector<StreamIndex>;

inline void add_chain(Chain& into, const Chain& other) {
  Chain sum;
  sum.reserve(into.size() + other.size());
  std::set_symmetric_difference(into.begin(), into.end(), other.begin(), other.end(), std::back_inserter(sum));
  into.swap(sum);
}

struct CascadeStats {
  std::size_t count = 0;  // cascades of paired marked simplices
  std::size_t max_size = 0;
  std::size_t total_size = 0;
  double mean_size() const noexcept { return count == 0 ? 0.0 : static_cast<double>(total_size) / count; }
};

class PersistenceState {
 public:
  struct Record {
    std::vector<VertexId> vertices;
    Filtration filtration = 0.0;
    bool marked = false;
    StreamIndex partner = kNoPartner;

    int dimension() const noexcept { return static_cast<int>(vertices.size()) - 1; }
    friend bool operator==(const Record&, const Record&) = default;
  };

  // `max_dim` is the skeleton cap: homology is reported in degrees below it.
  explicit PersistenceState(int max_dim, bool keep_representatives = false)
      : max_dim_(max_dim), keep_representatives_(keep_representatives) {
    if (max_dim < 1) throw InputError("max dimension must be at least 1");
  }

  // Rebuilds a state from its table image (checkpoint restore).
  static PersistenceState restore(int max_dim, bool keep_representatives, std::vector<Record> records,
                                  std::map<StreamIndex, Chain> cascades, std::uint64_t closed_count) {
    PersistenceState st(max_dim, keep_representatives);
    st.index_of_.reserve(records.size());
    for (StreamIndex i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.vertices.empty() || !is_strictly_increasing(r.vertices)) throw FormatError("invalid simplex in state image");
      if (r.partner != kNoPartner && r.partner >= records.size()) throw FormatError("dangling pairing in state image");
      if (!st.index_of_.emplace(r.vertices, i).second) throw FormatError("duplicate simplex in state image");
    }
    for (const auto& [key, chain] : cascades)
      if (key >= records.size() || !records[key].marked) throw FormatError("cascade attached to unmarked simplex");
    st.records_ = std::move(records);
    st.cascades_ = std::move(cascades);
    st.closed_count_ = closed_count;
    return st;
  }

  // Stream indices of the codimension-1 faces, sorted.
  Chain boundary(const SimplexEntry& s) const {
    Chain out;
    if (s.vertices.size() <= 1) return out;
    out.reserve(s.vertices.size());
    std::vector<VertexId> facet(s.vertices.size() - 1);
    for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
      std::copy(s.vertices.begin(), s.vertices.begin() + skip, facet.begin());
      std::copy(s.vertices.begin() + skip + 1, s.vertices.end(), facet.begin() + skip);
      auto it = index_of_.find(facet);
      if (it == index_of_.end()) throw ContractError("stream order violation: facet of " + describe(s) + " not yet seen");
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<Interval> add_simplex(const SimplexEntry& s) {
    check_admissible(s);
    Chain d = boundary(s);
    while (!d.empty()) {
      const auto& youngest = records_[d.back()];
      if (!youngest.marked)
        throw ContractError("reduction reached unmarked simplex " + std::to_string(d.back()) + " while adding " +
                            describe(s));
      if (youngest.partner == kNoPartner) break;
      add_chain(d, cascades_.at(d.back()));
    }

    const auto index = static_cast<StreamIndex>(records_.size());
    index_of_.emplace(s.vertices, index);
    records_.push_back(Record{s.vertices, s.filtration, d.empty(), kNoPartner});

    if (d.empty()) {
      cascades_[index] = Chain{index};
      return std::nullopt;
    }
    const StreamIndex birth = d.back();
    records_[birth].partner = index;
    records_[index].partner = birth;
    if (keep_representatives_) {
      last_representative_.clear();
      for (StreamIndex i : d) last_representative_.push_back(records_[i].vertices);
    }
    cascades_[birth] = std::move(d);
    ++closed_count_;
    return Interval{records_[birth].dimension(), records_[birth].filtration, s.filtration};
  }

  // One interval per unpaired marked simplex of degree < max_dim, ordered by
  // (dimension, birth, stream position).
  std::vector<Interval> open_intervals() const {
    std::vector<Interval> out;
    for (const auto& r : records_)
      if (r.marked && r.partner == kNoPartner && r.dimension() < max_dim_)
        out.push_back(Interval{r.dimension(), r.filtration, kInfinity});
    std::stable_sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) {
      if (a.dimension != b.dimension) return a.dimension < b.dimension;
      return a.birth < b.birth;
    });
    return out;
  }

  // Open-class counts in degrees 0 .. max_dim-1.
  std::vector<std::size_t> betti_numbers() const {
    std::vector<std::size_t> betti(static_cast<std::size_t>(max_dim_), 0);
    for (const auto& r : records_)
      if (r.marked && r.partner == kNoPartner && r.dimension() < max_dim_) ++betti[r.dimension()];
    return betti;
  }

  CascadeStats cascade_stats() const {
    CascadeStats stats;
    for (const auto& [key, chain] : cascades_) {
      if (records_[key].partner == kNoPartner) continue;
      ++stats.count;
      stats.total_size += chain.size();
      stats.max_size = std::max(stats.max_size, chain.size());
    }
    return stats;
  }

  // Cycle killed by the most recent closing simplex, as vertex lists. Only
  // filled when representatives are kept.
  const std::vector<std::vector<VertexId>>& last_representative() const noexcept { return last_representative_; }

  int max_dim() const noexcept { return max_dim_; }
  bool keeps_representatives() const noexcept { return keep_representatives_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::uint64_t closed_count() const noexcept { return closed_count_; }
  std::size_t marked_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const Record& r) { return r.marked; }));
  }

  std::span<const Record> records() const noexcept { return records_; }
  const std::map<StreamIndex, Chain>& cascades() const noexcept { return cascades_; }

  friend bool operator==(const PersistenceState& a, const PersistenceState& b) {
    return a.max_dim_ == b.max_dim_ && a.keep_representatives_ == b.keep_representatives_ &&
           a.closed_count_ == b.closed_count_ && a.records_ == b.records_ && a.cascades_ == b.cascades_;
  }

 private:
  void check_admissible(const SimplexEntry& s) const {
    if (s.vertices.empty() || !is_strictly_increasing(s.vertices)) throw ContractError("malformed simplex " + describe(s));
    if (s.dimension() > max_dim_) throw ContractError("simplex " + describe(s) + " exceeds the skeleton cap");
    if (!(s.filtration >= 0)) throw ContractError("simplex " + describe(s) + " has an invalid filtration value");
    if (records_.size() >= kNoPartner) throw ContractError("stream index space exhausted");
    if (!records_.empty() && s.filtration < records_.back().filtration)
      throw ContractError("stream order violation: " + describe(s) + " arrives after filtration " +
                          format_exact(records_.back().filtration));
    if (index_of_.contains(s.vertices)) throw ContractError("simplex " + describe(s) + " consumed twice");
  }

  static std::string describe(const SimplexEntry& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s.vertices[i]);
    }
    return out + "}@" + format_exact(s.filtration);
  }

  int max_dim_;
  bool keep_representatives_;
  std::vector<Record> records_;
  std::unordered_map<std::vector<VertexId>, StreamIndex, VertexSeqHash> index_of_;
  std::map<StreamIndex, Chain> cascades_;
  std::uint64_t closed_count_ = 0;
  std::vector<std::vector<VertexId>> last_representative_;
};

}  // namespace ripstream
