// ripstream: streaming Vietoris-Rips persistent homology.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ripstream/ripstream.hpp"

namespace {

using namespace ripstream;

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInput = 2,
  kExitIo = 3,
  kExitContract = 4,
  kExitCheckpoint = 5,
  kExitInterrupted = 130,
};

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0    success\n"
    "  1    selfcheck found a mismatch\n"
    "  2    input error (bad flags, unreadable or malformed input data)\n"
    "  3    I/O error\n"
    "  4    contract violation (internal bug)\n"
    "  5    checkpoint or data file rejected (version, fingerprint, truncation, corruption)\n"
    "  130  interrupted; a checkpoint was written if --checkpoint was given\n";

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

void print_summary(const RunSummary& s) {
  std::cout << "vertices:          " << s.vertex_count << "\n"
            << "edges:             " << s.edges_consumed << " of " << s.edges_in_file << " processed ("
            << s.edges_this_run << " this run), epsilon reached " << format_exact(s.epsilon_reached) << "\n"
            << "simplices:         " << s.stats.simplices_emitted << "\n"
            << "closed intervals:  " << s.closed_intervals << "\n";
  for (std::size_t d = 0; d < s.tally.finite_per_dim.size(); ++d)
    std::cout << "  H" << d << ": " << s.tally.finite_per_dim[d] << " finite, " << s.tally.infinite_per_dim[d]
              << " infinite\n";
  std::cout << "betti (open):      " << join(s.betti) << "\n"
            << "peak registry:     " << s.stats.peak_registry << " maximal cliques\n"
            << "largest batch:     " << s.stats.largest_batch << " simplices\n"
            << "cascades:          " << s.cascades.count << " (max " << s.cascades.max_size << ", mean "
            << s.cascades.mean_size() << ")\n";
  if (!s.tally.longest.empty()) {
    std::cout << "longest intervals:\n";
    for (const auto& iv : s.tally.longest)
      std::cout << "  H" << iv.dimension << " [" << format_exact(iv.birth) << ", " << format_exact(iv.death) << ")\n";
  }
  if (s.interrupted) std::cout << "interrupted before the end of the edge stream\n";

  std::cout << "#: vertices=" << s.vertex_count << "\n"
            << "#: edges_in_file=" << s.edges_in_file << "\n"
            << "#: edges_processed=" << s.edges_consumed << "\n"
            << "#: edges_this_run=" << s.edges_this_run << "\n"
            << "#: epsilon_reached=" << format_exact(s.epsilon_reached) << "\n"
            << "#: simplices=" << s.stats.simplices_emitted << "\n"
            << "#: closed_intervals=" << s.closed_intervals << "\n";
  for (std::size_t d = 0; d < s.tally.finite_per_dim.size(); ++d)
    std::cout << "#: finite_dim" << d << "=" << s.tally.finite_per_dim[d] << "\n"
              << "#: infinite_dim" << d << "=" << s.tally.infinite_per_dim[d] << "\n";
  std::cout << "#: betti=" << join(s.betti) << "\n"
            << "#: peak_registry=" << s.stats.peak_registry << "\n"
            << "#: largest_batch=" << s.stats.largest_batch << "\n"
            << "#: peak_live_simplices=" << s.peak_live_simplices << "\n"
            << "#: cascade_count=" << s.cascades.count << "\n"
            << "#: cascade_max=" << s.cascades.max_size << "\n"
            << "#: cascade_mean=" << s.cascades.mean_size() << "\n";
  for (const auto& iv : s.tally.longest)
    std::cout << "#: interval=" << iv.dimension << "," << format_exact(iv.birth) << "," << format_exact(iv.death)
              << "\n";
  std::cout << "#: interrupted=" << (s.interrupted ? 1 : 0) << "\n";
}

int inspect(const std::string& path) {
  const auto st = checkpoint_read_unverified(path);
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& c : st.registry.cliques()) ++histogram[c.size()];
  const auto betti = st.persistence.betti_numbers();
  std::string hist;
  for (const auto& [size, count] : histogram) hist += (hist.empty() ? "" : ",") + std::to_string(size) + ":" + std::to_string(count);

  std::cout << "checkpoint:        " << path << "\n"
            << "cursor offset:     " << st.cursor_offset << "\n"
            << "edges consumed:    " << st.edges_consumed << "\n"
            << "epsilon reached:   " << format_exact(st.epsilon_reached) << "\n"
            << "vertices:          " << st.registry.vertex_count() << "\n"
            << "max dim:           " << st.registry.max_dim() << "\n"
            << "registry size:     " << st.registry.size() << " maximal cliques\n"
            << "clique sizes:\n";
  for (const auto& [size, count] : histogram) std::cout << "  " << size << ": " << count << "\n";
  std::cout << "open intervals:    " << join(betti) << " (by degree)\n"
            << "closed intervals:  " << st.persistence.closed_count() << "\n"
            << "consumed simplices:" << st.persistence.size() << "\n";

  std::cout << "#: cursor_offset=" << st.cursor_offset << "\n"
            << "#: edges_consumed=" << st.edges_consumed << "\n"
            << "#: epsilon_reached=" << format_exact(st.epsilon_reached) << "\n"
            << "#: vertices=" << st.registry.vertex_count() << "\n"
            << "#: registry_size=" << st.registry.size() << "\n"
            << "#: clique_histogram=" << hist << "\n"
            << "#: betti=" << join(betti) << "\n"
            << "#: closed_count=" << st.persistence.closed_count() << "\n"
            << "#: consumed=" << st.persistence.size() << "\n";
  return kExitOk;
}

int plot_barcode(const std::string& intervals_path, const std::string& format, double min_length,
                 const std::string& out_path, std::size_t width) {
  const auto intervals = plot::filter_by_length(read_intervals(intervals_path), min_length);
  const auto rendered = format == "svg" ? plot::render_svg(intervals) : plot::render_text(intervals, width);
  if (out_path == "-") {
    std::cout << rendered;
    return kExitOk;
  }
  std::ofstream out(out_path);
  out << rendered;
  if (!out) throw IoError("cannot write " + out_path);
  return kExitOk;
}

int run_selfcheck(std::uint64_t seed, std::size_t trials, const std::string& retention) {
  std::cout << "selfcheck seed=" << seed << " trials=" << trials << "\n";
  if (trials == 0) std::cerr << "warning: --trials 0 runs no checks; passing vacuously\n";
  selfcheck::Options opts{seed, trials, retention == "listing" ? RetentionRule::listing_threshold : RetentionRule::subset};
  bool ok = true;
  for (const auto& report : selfcheck::run_all(opts)) {
    std::cout << (report.passed ? "PASS " : "FAIL ") << report.name << " (" << report.trials << " trials)\n";
    std::cout << "#: suite_" << report.name << "=" << (report.passed ? "pass" : "fail") << "\n";
    if (!report.passed) {
      std::cout << "counterexample:\n  " << report.counterexample << "\n";
      ok = false;
      break;
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming Vietoris-Rips persistent homology with checkpoint/resume"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  ComputeOptions copt;
  std::string input, metric = "euclidean", edges, intervals, checkpoint;
  std::optional<double> stop_epsilon;
  std::optional<std::uint64_t> max_edges;
  auto* compute_cmd = app.add_subcommand("compute", "Build the edge file and run the interleaved computation");
  compute_cmd->add_option("--input", input, "Point file (CSV/whitespace rows) or lower-triangular distance matrix")
      ->required();
  compute_cmd->add_option("--metric", metric, "euclidean | manhattan | matrix")
      ->check(CLI::IsMember({"euclidean", "manhattan", "matrix"}));
  compute_cmd->add_flag("--header", copt.input_header, "Skip the first row of the point file");
  compute_cmd->add_option("--max-epsilon", copt.max_epsilon, "Largest edge kept in the edge file");
  compute_cmd->add_option("--max-dim", copt.max_dim, "Skeleton cap; homology reported below it")->capture_default_str();
  compute_cmd->add_option("--edges", edges, "Sorted edge file to write (default: <intervals>.edges)");
  compute_cmd->add_option("--intervals", intervals, "Interval spill file")->required();
  compute_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
  compute_cmd->add_option("--checkpoint-every", copt.checkpoint_every, "Checkpoint every N edges");
  compute_cmd->add_option("--stop-epsilon", stop_epsilon, "Stop after the last edge not longer than this");
  compute_cmd->add_option("--max-edges", max_edges, "Stop after processing this many edges");
  compute_cmd->add_option("--memory-budget", copt.memory_budget, "External sort budget in bytes")
      ->capture_default_str();
  compute_cmd->add_flag("--representatives", copt.representatives,
                        "Write the cycle killed at each death to <intervals>.cycles");
  compute_cmd->add_option("--report", copt.report_per_dim, "Longest finite intervals listed per degree")
      ->capture_default_str();

  ResumeOptions ropt;
  std::string r_checkpoint, r_edges, r_intervals;
  auto* resume_cmd = app.add_subcommand("resume", "Continue a computation from a checkpoint");
  resume_cmd->add_option("--checkpoint", r_checkpoint, "Checkpoint to resume (rewritten on exit)")->required();
  resume_cmd->add_option("--edges", r_edges, "The sorted edge file the checkpoint was taken against")->required();
  resume_cmd->add_option("--intervals", r_intervals, "Interval file of the interrupted run")->required();
  resume_cmd->add_option("--stop-epsilon", ropt.stop_epsilon, "Stop after the last edge not longer than this");
  resume_cmd->add_option("--max-edges", ropt.edge_limit, "Stop after processing this many more edges");
  resume_cmd->add_option("--checkpoint-every", ropt.checkpoint_every, "Checkpoint every N edges");
  resume_cmd->add_option("--report", ropt.report_per_dim, "Longest finite intervals listed per degree");

  std::string i_checkpoint;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarise a checkpoint");
  inspect_cmd->add_option("--checkpoint", i_checkpoint, "Checkpoint file")->required();

  std::string p_intervals, p_format = "txt", p_out = "-";
  double p_min_length = 0.0;
  std::size_t p_width = 0;
  auto* plot_cmd = app.add_subcommand("plot", "Render a barcode from an interval file");
  plot_cmd->add_option("--intervals", p_intervals, "Interval file")->required();
  plot_cmd->add_option("--format", p_format, "txt | svg")->check(CLI::IsMember({"txt", "svg"}));
  plot_cmd->add_option("--min-length", p_min_length, "Hide finite bars shorter than this");
  plot_cmd->add_option("--out", p_out, "Output path, - for standard output");
  plot_cmd->add_option("--width", p_width, "Text width (default: $COLUMNS or 80)");

  std::uint64_t s_seed = 1;
  std::size_t s_trials = 20;
  std::string s_retention = "subset";
  auto* selfcheck_cmd = app.add_subcommand("selfcheck", "Cross-check the engines against brute-force oracles");
  selfcheck_cmd->add_option("--seed", s_seed, "Random seed")->capture_default_str();
  selfcheck_cmd->add_option("--trials", s_trials, "Trials per suite")->capture_default_str();
  selfcheck_cmd->add_option("--retention", s_retention, "Clique retention rule under test: subset | listing")
      ->check(CLI::IsMember({"subset", "listing"}))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::signal(SIGINT, on_sigint);
  try {
    if (*compute_cmd) {
      copt.input = input;
      copt.metric = parse_metric(metric);
      copt.intervals = intervals;
      copt.edges = edges.empty() ? intervals + ".edges" : edges;
      if (!checkpoint.empty()) copt.checkpoint = checkpoint;
      copt.stop_epsilon = stop_epsilon;
      copt.edge_limit = max_edges;
      copt.interrupt = &g_interrupted;
      const auto summary = compute(copt);
      print_summary(summary);
      return summary.interrupted ? kExitInterrupted : kExitOk;
    }
    if (*resume_cmd) {
      ropt.checkpoint = r_checkpoint;
      ropt.edges = r_edges;
      ropt.intervals = r_intervals;
      ropt.interrupt = &g_interrupted;
      const auto summary = resume(ropt);
      print_summary(summary);
      return summary.interrupted ? kExitInterrupted : kExitOk;
    }
    if (*inspect_cmd) return inspect(i_checkpoint);
    if (*plot_cmd) {
      std::size_t width = p_width;
      if (width == 0) {
        const char* cols = std::getenv("COLUMNS");
        width = cols ? std::strtoul(cols, nullptr, 10) : 0;
        if (width == 0) width = 80;
      }
      return plot_barcode(p_intervals, p_format, p_min_length, p_out, width);
    }
    if (*selfcheck_cmd) return run_selfcheck(s_seed, s_trials, s_retention);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
