#pragma once

// Randomised cross-checks of the streaming engines against the brute-force
// oracles. Each suite stops at the first divergence and reports it.

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clique_engine.hpp"
#include "core_types.hpp"
#include "edge_pipeline.hpp"
#include "oracle.hpp"
#include "persistence_engine.hpp"
#include "session.hpp"

namespace ripstream::selfcheck {

struct SuiteReport {
  std::string name;
  std::size_t trials = 0;
  bool passed = true;
  std::string counterexample;
};

struct RandomCloud {
  PointCloud points;
  Metric metric = Metric::euclidean;
  Filtration epsilon = kInfinity;
  int max_dim = 2;
};

namespace detail {

inline std::string format_cliques(const std::vector<Clique>& cliques) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    out << (i ? " " : "") << '[';
    for (std::size_t j = 0; j < cliques[i].size(); ++j) out << (j ? "," : "") << cliques[i][j];
    out << ']';
  }
  return out.str() + "}";
}

inline std::string format_cloud(const RandomCloud& c) {
  std::ostringstream out;
  out << "metric=" << (c.metric == Metric::manhattan ? "manhattan" : "euclidean")
      << " epsilon=" << format_exact(c.epsilon) << " max_dim=" << c.max_dim << " points=[";
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    out << (i ? "; " : "");
    for (std::size_t k = 0; k < c.points.dim; ++k) out << (k ? "," : "") << format_exact(c.points.row(i)[k]);
  }
  return out.str() + "]";
}

inline std::string format_simplices(const std::vector<SimplexEntry>& s, std::size_t limit = 40) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.size() && i < limit; ++i) {
    out << (i ? " " : "") << '[';
    for (std::size_t j = 0; j < s[i].vertices.size(); ++j) out << (j ? "," : "") << s[i].vertices[j];
    out << "]@" << format_exact(s[i].filtration);
  }
  if (s.size() > limit) out << " ... (" << s.size() << " total)";
  return out.str();
}

inline std::string format_intervals(const std::vector<Interval>& ivs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ivs.size(); ++i)
    out << (i ? " " : "") << '(' << ivs[i].dimension << ',' << format_exact(ivs[i].birth) << ','
        << format_exact(ivs[i].death) << ')';
  return out.str();
}

}  // namespace detail

// Uniform points in the unit cube, or (one time in three) on a small integer
// grid so that equal edge lengths and duplicate points show up.
inline RandomCloud random_cloud(std::mt19937_64& rng, std::size_t max_points, std::vector<int> max_dims = {2, 3}) {
  RandomCloud c;
  std::uniform_int_distribution<std::size_t> n_dist(2, std::max<std::size_t>(2, max_points));
  const std::size_t n = n_dist(rng);
  c.points.dim = std::uniform_int_distribution<int>(2, 3)(rng);
  c.max_dim = max_dims[std::uniform_int_distribution<std::size_t>(0, max_dims.size() - 1)(rng)];
  c.metric = std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? Metric::manhattan : Metric::euclidean;
  const bool grid = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> cell(0, 3);
  for (std::size_t i = 0; i < n * c.points.dim; ++i) c.points.coords.push_back(grid ? cell(rng) : unit(rng));
  const double scale = grid ? 3.0 : 1.0;
  const double span = c.metric == Metric::manhattan ? static_cast<double>(c.points.dim) : std::sqrt(c.points.dim);
  c.epsilon = std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? kInfinity
                                                                  : std::uniform_real_distribution<double>(0.2, 0.7)(rng) * span * scale;
  return c;
}

// Streams the cloud through the real pipeline: edge file, external sort
// (small random budget), clique engine.
inline std::vector<SimplexEntry> streamed_simplices(const RandomCloud& c, const std::filesystem::path& dir,
                                                    std::size_t memory_budget,
                                                    RetentionRule rule = RetentionRule::subset) {
  const auto unsorted = compute_edges(c.points, c.metric, c.epsilon, dir / "edges.unsorted");
  const auto sorted = external_sort_edges(unsorted, dir / "edges.sorted", memory_budget);
  std::vector<SimplexEntry> out;
  stream_filtration(sorted.path, c.points.size(), c.max_dim, [&](const SimplexEntry& s) { out.push_back(s); }, rule);
  return out;
}

// Interval multiset from the interleaved engine, sorted.
inline std::vector<Interval> streamed_barcode(const RandomCloud& c, const std::filesystem::path& dir,
                                              std::size_t memory_budget) {
  const auto unsorted = compute_edges(c.points, c.metric, c.epsilon, dir / "edges.unsorted");
  const auto sorted = external_sort_edges(unsorted, dir / "edges.sorted", memory_budget);
  PersistenceState state(c.max_dim);
  std::vector<Interval> out;
  stream_filtration(sorted.path, c.points.size(), c.max_dim, [&](const SimplexEntry& s) {
    if (auto iv = state.add_simplex(s)) out.push_back(*iv);
  });
  for (const auto& iv : state.open_intervals()) out.push_back(iv);
  std::sort(out.begin(), out.end(), interval_less);
  return out;
}

inline std::vector<Interval> oracle_barcode(const RandomCloud& c) {
  auto all = oracle::barcode_bruteforce(oracle::rips_batch(c.points, c.metric, c.epsilon, c.max_dim));
  std::erase_if(all, [&](const Interval& iv) { return iv.dimension >= c.max_dim; });
  return all;
}

// Random graphs on up to `max_vertices` vertices; every prefix of a random
// edge order is compared against Bron-Kerbosch.
inline SuiteReport clique_suite(std::uint64_t seed, std::size_t trials, std::size_t max_vertices = 12,
                                RetentionRule rule = RetentionRule::subset) {
  SuiteReport report{"clique", trials, true, {}};
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
    const double density = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    std::vector<Edge> edges;
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = a + 1; b < n; ++b)
        if (std::bernoulli_distribution(density)(rng)) edges.push_back(Edge{1.0, a, b});
    std::shuffle(edges.begin(), edges.end(), rng);

    CliqueRegistry registry(n, 64, rule);
    oracle::DenseGraph graph(n);
    for (std::size_t k = 0; k <= edges.size(); ++k) {
      if (k > 0) {
        registry.process_edge(edges[k - 1]);
        graph.add_edge(edges[k - 1].source, edges[k - 1].target);
      }
      const auto expected = oracle::bron_kerbosch(graph);
      const auto got = registry.cliques();
      if (got != expected) {
        std::ostringstream out;
        out << "trial " << trial << ": n=" << n << " edge order=";
        for (std::size_t i = 0; i < edges.size(); ++i)
          out << (i ? " " : "") << edges[i].source << '-' << edges[i].target;
        out << "\n  after " << k << " edges: registry=" << detail::format_cliques(got)
            << "\n  bron-kerbosch=" << detail::format_cliques(expected);
        report.passed = false;
        report.counterexample = out.str();
        return report;
      }
    }
  }
  return report;
}

inline SuiteReport stream_suite(std::uint64_t seed, std::size_t trials, std::size_t max_points = 20) {
  SuiteReport report{"stream", trials, true, {}};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  ScratchDir dir("ripstream-selfcheck");
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto cloud = random_cloud(rng, max_points);
    const std::size_t budget = kMinMemoryBudget * std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    auto got = streamed_simplices(cloud, dir.path(), budget);
    auto expected = oracle::rips_batch(cloud.points, cloud.metric, cloud.epsilon, cloud.max_dim);
    std::sort(got.begin(), got.end(), SimplexLess{});
    if (got != expected) {
      report.passed = false;
      report.counterexample = "trial " + std::to_string(trial) + ": " + detail::format_cloud(cloud) +
                              "\n  streamed=" + detail::format_simplices(got) +
                              "\n  batch=" + detail::format_simplices(expected);
      return report;
    }
  }
  return report;
}

inline SuiteReport barcode_suite(std::uint64_t seed, std::size_t trials, std::size_t max_points = 25) {
  SuiteReport report{"barcode", trials, true, {}};
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  ScratchDir dir("ripstream-selfcheck");
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto cloud = random_cloud(rng, max_points, {1, 2, 3});
    const auto got = streamed_barcode(cloud, dir.path(), kMinMemoryBudget * 2);
    const auto expected = oracle_barcode(cloud);
    if (got != expected) {
      report.passed = false;
      report.counterexample = "trial " + std::to_string(trial) + ": " + detail::format_cloud(cloud) +
                              "\n  engine=" + detail::format_intervals(got) +
                              "\n  oracle=" + detail::format_intervals(expected);
      return report;
    }
  }
  return report;
}

struct Options {
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  RetentionRule rule = RetentionRule::subset;
};

inline std::vector<SuiteReport> run_all(const Options& opts) {
  return {clique_suite(opts.seed, opts.trials, 12, opts.rule), stream_suite(opts.seed, opts.trials),
          barcode_suite(opts.seed, opts.trials)};
}

}  // namespace ripstream::selfcheck
