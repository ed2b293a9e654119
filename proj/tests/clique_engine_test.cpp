#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ripstream/clique_engine.hpp"
#include "test_support.hpp"

namespace ripstream {
namespace {

using namespace testing::seven_vertex;

std::vector<std::vector<VertexId>> vertex_lists(const std::vector<SimplexEntry>& simplices) {
  std::vector<std::vector<VertexId>> out;
  for (const auto& s : simplices) out.push_back(s.vertices);
  return out;
}

CliqueRegistry seven_vertex_registry(int max_dim) {
  CliqueRegistry reg(7, max_dim);
  for (const auto& e : testing::seven_vertex::edges()) reg.process_edge(e);
  return reg;
}

TEST(CliqueRegistry, StartsFromSingletons) {
  EXPECT_EQ(CliqueRegistry(1, 3).cliques(), (std::vector<Clique>{{0}}));
  EXPECT_EQ(CliqueRegistry(3, 3).cliques(), (std::vector<Clique>{{0}, {1}, {2}}));
  const CliqueRegistry seven(7, 3);
  EXPECT_EQ(seven.size(), 7u);
  for (VertexId v = 0; v < 7; ++v) EXPECT_EQ(seven.cliques_containing(v), (std::vector<Clique>{{v}}));
}

TEST(CliqueRegistry, RejectsBadConstruction) {
  EXPECT_THROW(CliqueRegistry(0, 3), InputError);
  EXPECT_THROW(CliqueRegistry(3, 0), InputError);
}

TEST(CliqueRegistry, CliquesContainingChecksRange) {
  const CliqueRegistry reg(3, 2);
  EXPECT_EQ(reg.cliques_containing(2), (std::vector<Clique>{{2}}));
  EXPECT_THROW(reg.cliques_containing(3), InputError);
}

TEST(CliqueRegistry, SevenVertexGraphCliques) {
  const auto reg = seven_vertex_registry(4);
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{a, b, c, f}, {a, b, c, g}, {d, e, f}, {d, e, g}}));
  EXPECT_EQ(reg.cliques_containing(f), (std::vector<Clique>{{a, b, c, f}, {d, e, f}}));
  EXPECT_EQ(reg.cliques_containing(g), (std::vector<Clique>{{a, b, c, g}, {d, e, g}}));
}

TEST(CliqueRegistry, SevenVertexExampleInsertion) {
  auto reg = seven_vertex_registry(4);
  const auto fresh = reg.process_edge(Edge{2.5, f, g});
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{a, b, c, f, g}, {d, e, f, g}}));
  const std::vector<std::vector<VertexId>> expected = {
      {f, g},                                                                  // edge
      {a, f, g}, {b, f, g}, {c, f, g}, {d, f, g}, {e, f, g},                   // triangles
      {a, b, f, g}, {a, c, f, g}, {b, c, f, g}, {d, e, f, g},                  // tetrahedra
      {a, b, c, f, g}};
  EXPECT_EQ(vertex_lists(fresh), expected);
  for (const auto& s : fresh) EXPECT_EQ(s.filtration, 2.5);
}

TEST(CliqueRegistry, SevenVertexExampleWithTriangleCap) {
  auto reg = seven_vertex_registry(2);
  const auto fresh = reg.process_edge(Edge{2.5, f, g});
  EXPECT_EQ(vertex_lists(fresh),
            (std::vector<std::vector<VertexId>>{{f, g}, {a, f, g}, {b, f, g}, {c, f, g}, {d, f, g}, {e, f, g}}));
  // Cap only limits emission; the registry still holds the full cliques.
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{a, b, c, f, g}, {d, e, f, g}}));
}

TEST(CliqueRegistry, SevenVertexStateRebuiltFromCliques) {
  auto reg = CliqueRegistry::from_cliques(7, 4, {{a, b, c, f}, {a, b, c, g}, {d, e, f}, {d, e, g}});
  EXPECT_EQ(reg.process_edge(Edge{1, g, f}).size(), 11u);
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{a, b, c, f, g}, {d, e, f, g}}));
}

TEST(CliqueRegistry, TwoIsolatedVertices) {
  CliqueRegistry reg(2, 3);
  const auto fresh = reg.process_edge(Edge{1.0, 0, 1});
  EXPECT_EQ(vertex_lists(fresh), (std::vector<std::vector<VertexId>>{{0, 1}}));
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{0, 1}}));
}

TEST(CliqueRegistry, EndpointOrderDoesNotMatter) {
  CliqueRegistry reg(3, 3);
  reg.process_edge(Edge{1.0, 2, 0});
  EXPECT_TRUE(reg.has_edge(0, 2));
  EXPECT_TRUE(reg.has_edge(2, 0));
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{0, 2}, {1}}));
}

TEST(CliqueRegistry, RejectsDuplicateEdgesAndSelfLoops) {
  CliqueRegistry reg(3, 3);
  reg.process_edge(Edge{1.0, 0, 1});
  EXPECT_THROW(reg.process_edge(Edge{2.0, 0, 1}), ContractError);
  EXPECT_THROW(reg.process_edge(Edge{2.0, 1, 0}), ContractError);
  EXPECT_THROW(reg.process_edge(Edge{2.0, 2, 2}), InputError);
  EXPECT_THROW(reg.process_edge(Edge{2.0, 0, 3}), InputError);
}

TEST(CliqueRegistry, ListingThresholdDropsMaximalCliques) {
  // Singletons {2} and {3} differ from the new clique {0,1} by one vertex, so
  // the one-vertex threshold discards them although they stay maximal.
  CliqueRegistry subset(4, 3, RetentionRule::subset);
  CliqueRegistry listing(4, 3, RetentionRule::listing_threshold);
  subset.process_edge(Edge{1, 0, 1});
  listing.process_edge(Edge{1, 0, 1});
  EXPECT_EQ(subset.cliques(), (std::vector<Clique>{{0, 1}, {2}, {3}}));
  EXPECT_EQ(listing.cliques(), (std::vector<Clique>{{0, 1}}));

  // Same effect on a non-singleton: {1,3} survives 0-2 only under subset.
  CliqueRegistry reg(4, 3);
  for (auto e : std::vector<Edge>{{1, 0, 1}, {1, 1, 2}, {1, 1, 3}, {1, 0, 2}}) reg.process_edge(e);
  EXPECT_EQ(reg.cliques(), (std::vector<Clique>{{0, 1, 2}, {1, 3}}));
}

TEST(MaximalFilter, Examples) {
  EXPECT_EQ(maximal_filter({{0, 1, 2}, {0, 1}, {3, 4}}), (std::vector<Clique>{{0, 1, 2}, {3, 4}}));
  EXPECT_EQ(maximal_filter({{}, {0, 1, 2}, {}, {3, 4}}), (std::vector<Clique>{{0, 1, 2}, {3, 4}}));
  EXPECT_EQ(maximal_filter({{}, {}}), (std::vector<Clique>{{}}));
  EXPECT_EQ(maximal_filter({{1, 2}, {1, 2}}), (std::vector<Clique>{{1, 2}}));
  EXPECT_TRUE(maximal_filter({}).empty());
}

TEST(MaximalFilter, MatchesPairwiseContainmentScan) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Clique> sets;
    for (int i = 0; i < 50; ++i) {
      Clique c;
      for (VertexId v = 0; v < 10; ++v)
        if (std::bernoulli_distribution(0.35)(rng)) c.push_back(v);
      sets.push_back(c);
    }
    // Quadratic scan: keep x unless some y strictly contains it.
    std::set<Clique> expected;
    for (const auto& x : sets) {
      bool dominated = false;
      for (const auto& y : sets)
        if (y.size() > x.size() && std::includes(y.begin(), y.end(), x.begin(), x.end())) dominated = true;
      if (!dominated) expected.insert(x);
    }
    EXPECT_EQ(maximal_filter(sets), std::vector<Clique>(expected.begin(), expected.end()));
  }
}

TEST(CliqueRegistry, EmissionIsFreshAndNeverRepeats) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    std::vector<Edge> edges;
    for (VertexId x = 0; x < n; ++x)
      for (VertexId y = x + 1; y < n; ++y)
        if (std::bernoulli_distribution(0.6)(rng)) edges.push_back(Edge{1.0, x, y});
    std::shuffle(edges.begin(), edges.end(), rng);
    const int max_dim = 1 + static_cast<int>(rng() % 4);
    CliqueRegistry reg(n, max_dim);
    std::set<std::vector<VertexId>> seen;
    for (const auto& e : edges) {
      const auto fresh = reg.process_edge(e);
      ASSERT_FALSE(fresh.empty());
      for (const auto& s : fresh) {
        EXPECT_TRUE(std::binary_search(s.vertices.begin(), s.vertices.end(), e.source));
        EXPECT_TRUE(std::binary_search(s.vertices.begin(), s.vertices.end(), e.target));
        EXPECT_LE(s.dimension(), max_dim);
        EXPECT_TRUE(seen.insert(s.vertices).second);
      }
      EXPECT_TRUE(std::is_sorted(fresh.begin(), fresh.end(), SimplexLess{}));
      // Antichain and coverage.
      const auto cliques = reg.cliques();
      EXPECT_EQ(maximal_filter(cliques), cliques);
      std::set<VertexId> covered;
      for (const auto& c : cliques) covered.insert(c.begin(), c.end());
      EXPECT_EQ(covered.size(), n);
    }
  }
}

}  // namespace
}  // namespace ripstream
