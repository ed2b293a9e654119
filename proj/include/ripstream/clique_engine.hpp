#pragma once

// Incremental maximal-clique maintenance for a graph that only gains edges.
//
// When edge (s, t) arrives, every new maximal clique has the form
// (A ∩ B) ∪ {s, t} with A a maximal clique through s and B one through t, and
// only the inclusion-maximal intersections give maximal cliques. Every clique
// that appears for the first time contains both s and t, so the new simplices
// are exactly S ∪ {s, t} for S ranging over subsets of those intersections.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <string>
#include <unordered_set>
#include <vector>

#include "core_types.hpp"
#include "errors.hpp"

namespace ripstream {

// Which old cliques survive an edge insertion.
enum class RetentionRule {
  // Keep an old clique unless it is a subset of some new clique.
  subset,
  // Keep an old clique only if it differs from every new clique by more than
  // one vertex. Discards maximal cliques; kept so the self-check can show it
  // does.
  listing_threshold,
};

// Inclusion-maximal elements of `cliques`, duplicates collapsed, in
// lexicographic order.
inline std::vector<Clique> maximal_filter(std::vector<Clique> cliques) {
  std::sort(cliques.begin(), cliques.end(), [](const Clique& a, const Clique& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());

  std::vector<Clique> kept;
  for (auto& c : cliques) {
    const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Clique& k) {
      return k.size() > c.size() && is_subset(c, k);
    });
    if (!covered) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

class CliqueRegistry {
 public:
  using CliqueId = std::uint32_t;

  CliqueRegistry(std::size_t vertex_count, int max_dim, RetentionRule rule = RetentionRule::subset)
      : max_dim_(max_dim), rule_(rule), by_vertex_(vertex_count) {
    if (vertex_count == 0) throw InputError("clique registry needs at least one vertex");
    if (vertex_count > std::numeric_limits<VertexId>::max()) throw InputError("too many vertices");
    if (max_dim < 1) throw InputError("max dimension must be at least 1");
    slots_.reserve(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) insert(Clique{static_cast<VertexId>(v)});
  }

  // Rebuilds a registry from a known clique system. The cliques must be sorted,
  // in range, pairwise non-nested and together cover every vertex.
  static CliqueRegistry from_cliques(std::size_t vertex_count, int max_dim, const std::vector<Clique>& cliques,
                                     RetentionRule rule = RetentionRule::subset) {
    CliqueRegistry reg(vertex_count, max_dim, rule);
    reg.slots_.clear();
    reg.free_.clear();
    reg.live_ = 0;
    for (auto& list : reg.by_vertex_) list.clear();
    for (const auto& c : cliques) {
      if (c.empty() || !is_strictly_increasing(c) || c.back() >= vertex_count)
        throw FormatError("invalid clique in registry image");
      reg.insert(c);
    }
    for (std::size_t v = 0; v < vertex_count; ++v)
      if (reg.by_vertex_[v].empty()) throw FormatError("registry image leaves vertex " + std::to_string(v) + " uncovered");
    if (maximal_filter(cliques).size() != cliques.size()) throw FormatError("registry image is not an antichain");
    return reg;
  }

  std::size_t vertex_count() const noexcept { return by_vertex_.size(); }
  int max_dim() const noexcept { return max_dim_; }
  RetentionRule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return live_; }

  // All stored maximal cliques, lexicographically sorted.
  std::vector<Clique> cliques() const {
    std::vector<Clique> out;
    out.reserve(live_);
    for (const auto& c : slots_)
      if (!c.empty()) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Clique> cliques_containing(VertexId v) const {
    check_vertex(v);
    std::vector<Clique> out;
    for (CliqueId id : by_vertex_[v]) out.push_back(slots_[id]);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_edge(VertexId s, VertexId t) const {
    check_vertex(s);
    check_vertex(t);
    if (s == t) return false;
    return std::any_of(by_vertex_[s].begin(), by_vertex_[s].end(),
                       [&](CliqueId id) { return std::binary_search(slots_[id].begin(), slots_[id].end(), t); });
  }

  // Inserts the edge, updates the clique system and returns the simplices the
  // edge creates (dimension <= max_dim), sorted by simplex order.
  std::vector<SimplexEntry> process_edge(const Edge& edge) {
    VertexId s = edge.source;
    VertexId t = edge.target;
    if (s == t) throw InputError("self-loop on vertex " + std::to_string(s));
    check_vertex(s);
    check_vertex(t);
    if (s > t) std::swap(s, t);
    if (has_edge(s, t))
      throw ContractError("edge (" + std::to_string(s) + ", " + std::to_string(t) + ") inserted twice");

    std::vector<Clique> intersections;
    intersections.reserve(by_vertex_[s].size() * by_vertex_[t].size());
    for (CliqueId a : by_vertex_[s])
      for (CliqueId b : by_vertex_[t]) {
        Clique common;
        std::set_intersection(slots_[a].begin(), slots_[a].end(), slots_[b].begin(), slots_[b].end(),
                              std::back_inserter(common));
        intersections.push_back(std::move(common));
      }
    const auto seeds = maximal_filter(std::move(intersections));

    std::vector<Clique> fresh;
    fresh.reserve(seeds.size());
    for (const auto& seed : seeds) fresh.push_back(with_endpoints(seed, s, t));

    retire_covered(fresh, s, t);
    for (auto& c : fresh) insert(std::move(c));

    return new_simplices(seeds, s, t, edge.length);
  }

 private:
  static Clique with_endpoints(const Clique& seed, VertexId s, VertexId t) {
    Clique out;
    out.reserve(seed.size() + 2);
    const VertexId ends[2] = {s, t};
    std::merge(seed.begin(), seed.end(), std::begin(ends), std::end(ends), std::back_inserter(out));
    return out;
  }

  void retire_covered(const std::vector<Clique>& fresh, VertexId s, VertexId t) {
    std::vector<CliqueId> doomed;
    if (rule_ == RetentionRule::subset) {
      // A clique swallowed by a new one must contain s or t.
      std::vector<CliqueId> candidates = by_vertex_[s];
      candidates.insert(candidates.end(), by_vertex_[t].begin(), by_vertex_[t].end());
      for (CliqueId id : candidates)
        if (std::any_of(fresh.begin(), fresh.end(), [&](const Clique& f) { return is_subset(slots_[id], f); }))
          doomed.push_back(id);
    } else {
      for (CliqueId id = 0; id < slots_.size(); ++id) {
        if (slots_[id].empty()) continue;
        std::size_t min_diff = std::numeric_limits<std::size_t>::max();
        for (const auto& f : fresh) {
          Clique diff;
          std::set_difference(slots_[id].begin(), slots_[id].end(), f.begin(), f.end(), std::back_inserter(diff));
          min_diff = std::min(min_diff, diff.size());
        }
        if (min_diff <= 1) doomed.push_back(id);
      }
    }
    for (CliqueId id : doomed) erase(id);
  }

  std::vector<SimplexEntry> new_simplices(const std::vector<Clique>& seeds, VertexId s, VertexId t,
                                          Filtration length) const {
    const std::size_t max_subset = static_cast<std::size_t>(max_dim_ - 1);
    std::unordered_set<std::vector<VertexId>, VertexSeqHash> seen;
    std::vector<std::vector<VertexId>> keys;
    std::vector<std::size_t> pick;
    Clique subset;
    for (const auto& seed : seeds) {
      const std::size_t top = std::min(max_subset, seed.size());
      for (std::size_t k = 0; k <= top; ++k) {
        // Lexicographic walk over k-combinations of seed positions.
        pick.resize(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        while (true) {
          subset.clear();
          for (std::size_t i : pick) subset.push_back(seed[i]);
          auto simplex = with_endpoints(subset, s, t);
          if (seen.insert(simplex).second) keys.push_back(std::move(simplex));
          std::size_t i = k;
          while (i > 0 && pick[i - 1] == seed.size() - k + i - 1) --i;
          if (i == 0) break;
          ++pick[i - 1];
          for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
      }
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
    // Reserved up front so no SimplexEntry is ever moved or copied here.
    std::vector<SimplexEntry> out;
    out.reserve(keys.size());
    for (auto& k : keys) out.emplace_back(std::move(k), length);
    return out;
  }

  void insert(Clique c) {
    CliqueId id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      slots_[id] = std::move(c);
    } else {
      id = static_cast<CliqueId>(slots_.size());
      slots_.push_back(std::move(c));
    }
    for (VertexId v : slots_[id]) by_vertex_[v].push_back(id);
    ++live_;
  }

  void erase(CliqueId id) {
    for (VertexId v : slots_[id]) {
      auto& list = by_vertex_[v];
      auto it = std::find(list.begin(), list.end(), id);
      *it = list.back();
      list.pop_back();
    }
    slots_[id].clear();
    slots_[id].shrink_to_fit();
    free_.push_back(id);
    --live_;
  }

  void check_vertex(VertexId v) const {
    if (v >= by_vertex_.size())
      throw InputError("vertex " + std::to_string(v) + " out of range (n = " + std::to_string(by_vertex_.size()) + ")");
  }

  int max_dim_;
  RetentionRule rule_;
  std::vector<Clique> slots_;  // empty slot = free
  std::vector<CliqueId> free_;
  std::vector<std::vector<CliqueId>> by_vertex_;
  std::size_t live_ = 0;
};

}  // namespace ripstream
