// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "ripstream/ripstream.hpp"
#include "test_support.hpp"

namespace {

using namespace ripstream;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome seven_vertex_example() {
  using namespace testing::seven_vertex;
  Outcome o;
  auto reg = CliqueRegistry::from_cliques(7, 4, {{a, b, c, f}, {a, b, c, g}, {d, e, f}, {d, e, g}});
  const auto t0 = Clock::now();
  const auto fresh = reg.process_edge(Edge{1.0, f, g});
  const double elapsed = seconds_since(t0);

  const std::vector<std::vector<VertexId>> expected = {{f, g},       {a, f, g},    {b, f, g},   {c, f, g},
                                                       {d, f, g},    {e, f, g},    {a, b, f, g}, {a, c, f, g},
                                                       {b, c, f, g}, {d, e, f, g}, {a, b, c, f, g}};
  std::vector<std::vector<VertexId>> got;
  for (const auto& s : fresh) got.push_back(s.vertices);
  if (got != expected) o.fail("emitted " + std::to_string(got.size()) + " simplices, not the expected 11");
  if (reg.cliques() != std::vector<Clique>{{a, b, c, f, g}, {d, e, f, g}}) o.fail("wrong maximal cliques after f-g");
  if (elapsed >= 1e-3) o.fail("took " + std::to_string(elapsed * 1e3) + " ms");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(elapsed * 1e6) + " us";
  return o;
}

Outcome suite_within(const selfcheck::SuiteReport& report, double elapsed, double limit) {
  Outcome o;
  if (!report.passed) o.fail(report.counterexample);
  if (elapsed >= limit) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.ok) o.detail = std::to_string(report.trials) + " trials in " + std::to_string(elapsed) + " s";
  return o;
}

Outcome clique_equivalence() {
  const auto t0 = Clock::now();
  const auto report = selfcheck::clique_suite(2024, 200, 12);
  return suite_within(report, seconds_since(t0), 30);
}

Outcome stream_completeness() {
  const auto t0 = Clock::now();
  const auto report = selfcheck::stream_suite(2024, 50, 20);
  return suite_within(report, seconds_since(t0), 60);
}

Outcome barcode_equivalence() {
  const auto t0 = Clock::now();
  const auto report = selfcheck::barcode_suite(2024, 50, 25);
  return suite_within(report, seconds_since(t0), 120);
}

ComputeOptions circle_options(const ScratchDir& dir) {
  testing::write_points(dir / "circle.csv", testing::unit_circle(8));
  ComputeOptions opts;
  opts.input = dir / "circle.csv";
  opts.max_dim = 2;
  opts.max_epsilon = 2.1;
  opts.edges = dir / "circle.edges";
  opts.intervals = dir / "circle.intervals";
  return opts;
}

Outcome circle_benchmark() {
  Outcome o;
  ScratchDir dir("ripstream-acceptance");
  const auto opts = circle_options(dir);
  compute(opts);
  auto got = read_intervals(opts.intervals);
  std::sort(got.begin(), got.end(), interval_less);

  const auto cloud = read_point_cloud(opts.input, false);
  auto expected = oracle::barcode_bruteforce(oracle::rips_batch(cloud, Metric::euclidean, 2.1, 2));
  std::erase_if(expected, [](const Interval& iv) { return iv.dimension >= 2; });
  if (got != expected) o.fail("interval multiset differs from the oracle");

  std::vector<Interval> infinite_h0, h1;
  for (const auto& iv : got) {
    if (iv.dimension == 0 && iv.is_infinite()) infinite_h0.push_back(iv);
    if (iv.dimension == 1 && iv.length() > 0) h1.push_back(iv);
  }
  if (infinite_h0.size() != 1) o.fail(std::to_string(infinite_h0.size()) + " infinite H0 intervals");
  if (h1.size() != 1) {
    o.fail(std::to_string(h1.size()) + " H1 intervals of positive length");
    return o;
  }
  const double birth = 2 * std::sin(std::numbers::pi / 8);
  const double death = 2 * std::sin(3 * std::numbers::pi / 8);
  if (std::abs(h1[0].birth - birth) > 1e-12 || std::abs(h1[0].death - death) > 1e-12)
    o.fail("H1 [" + format_exact(h1[0].birth) + ", " + format_exact(h1[0].death) + ") is off the closed form");
  if (o.ok) o.detail = "H1 [" + format_exact(h1[0].birth) + ", " + format_exact(h1[0].death) + ")";
  return o;
}

Outcome resume_determinism() {
  Outcome o;
  std::mt19937_64 rng(606);
  ScratchDir dir("ripstream-acceptance");
  for (int trial = 0; trial < 10 && o.ok; ++trial) {
    PointCloud cloud;
    cloud.dim = 2 + trial % 2;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 20)(rng);
    for (std::size_t i = 0; i < n * cloud.dim; ++i)
      cloud.coords.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    testing::write_points(dir / "in.csv", cloud);

    ComputeOptions opts;
    opts.input = dir / "in.csv";
    opts.max_dim = std::uniform_int_distribution<int>(1, 3)(rng);
    opts.edges = dir / "run.edges";
    opts.intervals = dir / "run.intervals";
    opts.checkpoint = dir / "run.ckpt";
    const auto full = compute(opts);
    const auto one_shot = io::read_file(opts.intervals);

    const auto position = std::uniform_int_distribution<std::uint64_t>(0, full.edges_in_file)(rng);
    opts.edge_limit = position;
    compute(opts);
    ResumeOptions r;
    r.checkpoint = *opts.checkpoint;
    r.edges = opts.edges;
    r.intervals = opts.intervals;
    resume(r);
    if (io::read_file(opts.intervals) != one_shot)
      o.fail("trial " + std::to_string(trial) + ": interval file differs after resuming at edge " +
             std::to_string(position) + " of " + std::to_string(full.edges_in_file));
  }
  if (o.ok) o.detail = "10 inputs, byte-identical";
  return o;
}

Outcome external_sort_scale() {
  Outcome o;
  constexpr std::uint64_t kEdges = 1'000'000;
  ScratchDir dir("ripstream-acceptance");
  std::mt19937_64 rng(707);
  std::vector<Edge> edges;
  edges.reserve(kEdges);
  EdgeFile unsorted{dir / "unsorted.edges", 0, kInfinity};
  {
    EdgeWriter w(dir / "unsorted.edges");
    std::uniform_int_distribution<VertexId> vertex(0, 99'999);
    std::uniform_int_distribution<int> coarse(0, 999);
    for (std::uint64_t i = 0; i < kEdges; ++i) {
      // Half the lengths come from a small set so ties are common.
      const double len = i % 2 ? coarse(rng) / 100.0 : std::uniform_real_distribution<double>(0, 10)(rng);
      Edge e{len, vertex(rng), vertex(rng)};
      edges.push_back(e);
      w.write(e);
    }
    unsorted.record_count = w.finish();
  }
  const std::size_t budget = kEdges * kEdgeRecordSize / 10;
  const auto runs = (kEdges + budget / kEdgeRecordSize - 1) / (budget / kEdgeRecordSize);

  const auto t0 = Clock::now();
  external_sort_edges(unsorted, dir / "sorted.edges", budget);
  const double elapsed = seconds_since(t0);

  std::stable_sort(edges.begin(), edges.end(), edge_less);
  testing::write_edges(dir / "memory.edges", edges);
  if (io::read_file(dir / "sorted.edges") != io::read_file(dir / "memory.edges"))
    o.fail("external sort output differs from the in-memory sort");
  if (runs < 8) o.fail("budget forces only " + std::to_string(runs) + " runs");
  if (elapsed >= 60) o.fail("took " + std::to_string(elapsed) + " s");
  std::size_t leftovers = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path()))
    leftovers += entry.path().string().find(".run") != std::string::npos ||
                 entry.path().string().find(".merge") != std::string::npos;
  if (leftovers) o.fail(std::to_string(leftovers) + " temporary files left behind");
  if (o.ok) o.detail = std::to_string(runs) + " runs, " + std::to_string(elapsed) + " s";
  return o;
}

Outcome memory_discipline() {
  Outcome o;
  ScratchDir dir("ripstream-acceptance");
  const auto summary = compute(circle_options(dir));
  if (summary.peak_live_simplices < 1) o.fail("live simplex counter never moved");
  if (static_cast<std::uint64_t>(summary.peak_live_simplices) > summary.stats.largest_batch)
    o.fail("peak live simplices " + std::to_string(summary.peak_live_simplices) + " exceeds largest batch " +
           std::to_string(summary.stats.largest_batch));
  // The persistence state reports closed intervals only as a count.
  static_assert(std::is_same_v<decltype(std::declval<const PersistenceState&>().closed_count()), std::uint64_t>);
  if (summary.closed_intervals == 0) o.fail("no intervals closed");
  if (o.ok)
    o.detail = "peak " + std::to_string(summary.peak_live_simplices) + " <= largest batch " +
               std::to_string(summary.stats.largest_batch);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 worked clique example", seven_vertex_example},
      {"2 clique oracle equivalence", clique_equivalence},
      {"3 stream completeness", stream_completeness},
      {"4 barcode oracle equivalence", barcode_equivalence},
      {"5 circle benchmark", circle_benchmark},
      {"6 resume determinism", resume_determinism},
      {"7 external sort scale", external_sort_scale},
      {"8 streaming memory discipline", memory_discipline},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.ok;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
