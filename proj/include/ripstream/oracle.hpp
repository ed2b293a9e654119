#pragma once

// Brute-force reference implementations. Nothing here calls into the clique
// or persistence engines; only the vocabulary types are shared.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "core_types.hpp"
#include "edge_pipeline.hpp"
#include "errors.hpp"

namespace ripstream::oracle {

// Adjacency bitsets; up to 64 vertices.
class DenseGraph {
 public:
  explicit DenseGraph(std::size_t n) : adj_(n, 0) {
    if (n > 64) throw InputError("dense oracle graph supports at most 64 vertices");
  }

  std::size_t size() const noexcept { return adj_.size(); }

  void add_edge(VertexId a, VertexId b) {
    if (a == b) throw InputError("self-loop");
    adj_[a] |= std::uint64_t{1} << b;
    adj_[b] |= std::uint64_t{1} << a;
  }

  bool has_edge(VertexId a, VertexId b) const noexcept { return (adj_[a] >> b) & 1U; }
  std::uint64_t neighbours(VertexId v) const noexcept { return adj_[v]; }

 private:
  std::vector<std::uint64_t> adj_;
};

namespace detail {
inline Clique to_clique(std::uint64_t bits) {
  Clique c;
  while (bits) {
    c.push_back(static_cast<VertexId>(std::countr_zero(bits)));
    bits &= bits - 1;
  }
  return c;
}

// Tomita-style pivoting.
inline void expand(const DenseGraph& g, std::uint64_t r, std::uint64_t p, std::uint64_t x, std::vector<Clique>& out) {
  if (p == 0 && x == 0) {
    out.push_back(to_clique(r));
    return;
  }
  const std::uint64_t px = p | x;
  VertexId pivot = static_cast<VertexId>(std::countr_zero(px));
  int best = -1;
  for (std::uint64_t bits = px; bits; bits &= bits - 1) {
    const auto u = static_cast<VertexId>(std::countr_zero(bits));
    const int c = std::popcount(p & g.neighbours(u));
    if (c > best) best = c, pivot = u;
  }
  for (std::uint64_t bits = p & ~g.neighbours(pivot); bits; bits &= bits - 1) {
    const auto v = static_cast<VertexId>(std::countr_zero(bits));
    const std::uint64_t vb = std::uint64_t{1} << v;
    expand(g, r | vb, p & g.neighbours(v), x & g.neighbours(v), out);
    p &= ~vb;
    x |= vb;
  }
}
}  // namespace detail

// All maximal cliques, lexicographically sorted.
inline std::vector<Clique> bron_kerbosch(const DenseGraph& g) {
  std::vector<Clique> out;
  const std::uint64_t all = g.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.size()) - 1;
  if (g.size() > 0) detail::expand(g, 0, all, 0, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Pairwise distances computed directly from coordinates.
inline std::vector<std::vector<double>> pairwise_distances(const PointCloud& points, Metric metric) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < points.dim; ++k) {
        const double delta = points.coords[i * points.dim + k] - points.coords[j * points.dim + k];
        acc += metric == Metric::manhattan ? std::fabs(delta) : delta * delta;
      }
      dist[i][j] = dist[j][i] = metric == Metric::manhattan ? acc : std::sqrt(acc);
    }
  return dist;
}

// Every clique of the epsilon-graph with at most max_dim + 1 vertices, with
// filtration = longest internal edge, sorted by simplex order.
inline std::vector<SimplexEntry> rips_batch(const std::vector<std::vector<double>>& dist, Filtration epsilon,
                                            int max_dim) {
  const std::size_t n = dist.size();
  std::vector<SimplexEntry> out;
  std::vector<VertexId> current;
  auto grow = [&](auto&& self, Filtration diameter) -> void {
    out.emplace_back(current, diameter);
    if (static_cast<int>(current.size()) > max_dim) return;
    for (VertexId w = current.back() + 1; w < n; ++w) {
      Filtration d = diameter;
      bool ok = true;
      for (VertexId u : current) {
        if (!(dist[u][w] <= epsilon)) {
          ok = false;
          break;
        }
        d = std::max(d, dist[u][w]);
      }
      if (!ok) continue;
      current.push_back(w);
      self(self, d);
      current.pop_back();
    }
  };
  for (VertexId v = 0; v < n; ++v) {
    current.assign(1, v);
    grow(grow, 0.0);
  }
  std::sort(out.begin(), out.end(), SimplexLess{});
  return out;
}

inline std::vector<SimplexEntry> rips_batch(const PointCloud& points, Metric metric, Filtration epsilon, int max_dim) {
  return rips_batch(pairwise_distances(points, metric), epsilon, max_dim);
}

// Textbook boundary-matrix column reduction over Z/2. The stream must list
// faces before cofaces with non-decreasing filtration. Returns every interval
// in every degree, sorted.
inline std::vector<Interval> barcode_bruteforce(const std::vector<SimplexEntry>& stream) {
  std::map<std::vector<VertexId>, std::size_t> index;
  std::vector<std::vector<std::size_t>> columns(stream.size());
  for (std::size_t j = 0; j < stream.size(); ++j) {
    const auto& vs = stream[j].vertices;
    if (j > 0 && stream[j].filtration < stream[j - 1].filtration) throw ContractError("oracle: filtration decreases");
    if (vs.size() > 1)
      for (std::size_t skip = 0; skip < vs.size(); ++skip) {
        auto facet = vs;
        facet.erase(facet.begin() + static_cast<std::ptrdiff_t>(skip));
        auto it = index.find(facet);
        if (it == index.end()) throw ContractError("oracle: facet missing before coface");
        columns[j].push_back(it->second);
      }
    std::sort(columns[j].begin(), columns[j].end());
    index.emplace(vs, j);
  }

  std::map<std::size_t, std::size_t> column_with_low;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto& col = columns[j];
    while (!col.empty()) {
      auto hit = column_with_low.find(col.back());
      if (hit == column_with_low.end()) break;
      std::vector<std::size_t> sum;
      const auto& other = columns[hit->second];
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(), std::back_inserter(sum));
      col.swap(sum);
    }
    if (!col.empty()) column_with_low.emplace(col.back(), j);
  }

  std::vector<Interval> out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const int dim = static_cast<int>(stream[j].vertices.size()) - 1;
    if (!columns[j].empty()) {
      const auto birth = columns[j].back();
      out.push_back(Interval{dim - 1, stream[birth].filtration, stream[j].filtration});
    } else if (!column_with_low.contains(j)) {
      out.push_back(Interval{dim, stream[j].filtration, kInfinity});
    }
  }
  std::sort(out.begin(), out.end(), interval_less);
  return out;
}

}  // namespace ripstream::oracle
