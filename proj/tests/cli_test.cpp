#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <map>

#include "ripstream/session.hpp"
#include "test_support.hpp"

namespace ripstream {
namespace {

struct Result {
  int code = -1;
  std::string out;

  // Values of the "#: key=value" lines; repeated keys keep the last value.
  std::map<std::string, std::string> fields() const {
    std::map<std::string, std::string> f;
    std::istringstream in(out);
    for (std::string l; std::getline(in, l);) {
      if (l.rfind("#: ", 0) != 0) continue;
      const auto eq = l.find('=');
      if (eq != std::string::npos) f[l.substr(3, eq - 3)] = l.substr(eq + 1);
    }
    return f;
  }
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RIPSTREAM_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  ScratchDir dir{"ripstream-cli-test"};

  std::string p(const std::string& name) { return (dir / name).string(); }

  Result compute_circle(const std::string& extra = "") {
    testing::write_points(dir / "circle.csv", testing::unit_circle(8));
    return run("compute --input " + p("circle.csv") + " --max-dim 2 --max-epsilon 2.1 --intervals " + p("c.intervals") +
               " --checkpoint " + p("c.ckpt") + " " + extra);
  }
};

TEST_F(Cli, HelpListsExitCodes) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Exit codes"), std::string::npos);
  EXPECT_NE(r.out.find("130"), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsAnInputError) { EXPECT_EQ(run("compute --bogus").code, 2); }

TEST_F(Cli, ComputeReportsCircle) {
  const auto r = compute_circle();
  ASSERT_EQ(r.code, 0) << r.out;
  const auto f = r.fields();
  EXPECT_EQ(f.at("vertices"), "8");
  EXPECT_EQ(f.at("edges_in_file"), "28");
  EXPECT_EQ(f.at("edges_processed"), "28");
  EXPECT_EQ(f.at("infinite_dim0"), "1");
  EXPECT_EQ(f.at("infinite_dim1"), "0");
  EXPECT_EQ(f.at("betti"), "1,0");
  EXPECT_EQ(f.at("interrupted"), "0");
  EXPECT_TRUE(std::filesystem::exists(dir / "c.intervals.edges"));
  EXPECT_EQ(read_intervals(dir / "c.intervals").size(), 8u + std::stoul(f.at("finite_dim1")));
}

TEST_F(Cli, EmptyInputCreatesNoFiles) {
  testing::write_text(dir / "empty.csv", "");
  const auto r = run("compute --input " + p("empty.csv") + " --intervals " + p("e.intervals"));
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("input error"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "e.intervals"));
  EXPECT_FALSE(std::filesystem::exists(dir / "e.intervals.edges"));
}

TEST_F(Cli, MalformedRowNamesTheRow) {
  testing::write_text(dir / "bad.csv", "0,0\n1,x\n");
  const auto r = run("compute --input " + p("bad.csv") + " --intervals " + p("b.intervals"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("row 2"), std::string::npos) << r.out;
}

TEST_F(Cli, MissingInputIsAnIoError) {
  EXPECT_EQ(run("compute --input " + p("nope.csv") + " --intervals " + p("n.intervals")).code, 3);
}

TEST_F(Cli, InspectFreshCheckpoint) {
  ASSERT_EQ(compute_circle("--max-edges 0").code, 0);
  const auto r = run("inspect --checkpoint " + p("c.ckpt"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto f = r.fields();
  EXPECT_EQ(f.at("cursor_offset"), "16");
  EXPECT_EQ(f.at("edges_consumed"), "0");
  EXPECT_EQ(f.at("betti"), "8,0");
  EXPECT_EQ(f.at("clique_histogram"), "1:8");
}

TEST_F(Cli, ResumeFinishesTheRun) {
  ASSERT_EQ(compute_circle().code, 0);
  const auto full = io::read_file(dir / "c.intervals");
  ASSERT_EQ(compute_circle("--stop-epsilon 0.8").code, 0);
  const auto r = run("resume --checkpoint " + p("c.ckpt") + " --edges " + p("c.intervals.edges") + " --intervals " +
                     p("c.intervals") + " --stop-epsilon 2.1");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.fields().at("edges_processed"), "28");
  EXPECT_EQ(io::read_file(dir / "c.intervals"), full);
}

TEST_F(Cli, ResumeRejectsWrongEdgeFile) {
  ASSERT_EQ(compute_circle("--stop-epsilon 1").code, 0);
  testing::write_edges(dir / "other.edges", {{1, 0, 1}});
  const auto r = run("resume --checkpoint " + p("c.ckpt") + " --edges " + p("other.edges") + " --intervals " +
                     p("c.intervals"));
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("different edge file"), std::string::npos) << r.out;
}

TEST_F(Cli, CorruptCheckpointIsRejected) {
  ASSERT_EQ(compute_circle().code, 0);
  auto bytes = io::read_file(dir / "c.ckpt");
  bytes[bytes.size() / 2] ^= 0xFF;
  io::write_file_atomic(dir / "c.ckpt", bytes);
  EXPECT_EQ(run("inspect --checkpoint " + p("c.ckpt")).code, 5);
  bytes.resize(bytes.size() / 3);
  io::write_file_atomic(dir / "c.ckpt", bytes);
  EXPECT_EQ(run("inspect --checkpoint " + p("c.ckpt")).code, 5);
}

TEST_F(Cli, PlotText) {
  ASSERT_EQ(compute_circle().code, 0);
  const auto r = run("plot --intervals " + p("c.intervals") + " --format txt --width 70 --out -");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0 0 inf"), std::string::npos);
  EXPECT_NE(r.out.find(">|"), std::string::npos);
}

TEST_F(Cli, PlotSvgToFile) {
  ASSERT_EQ(compute_circle().code, 0);
  ASSERT_EQ(run("plot --intervals " + p("c.intervals") + " --format svg --min-length 0.1 --out " + p("b.svg")).code, 0);
  std::ifstream in(dir / "b.svg");
  const std::string svg((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("data-dim=\"1\""), std::string::npos);
}

TEST_F(Cli, Selfcheck) {
  const auto ok = run("selfcheck --trials 5");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.fields().at("suite_barcode"), "pass");
  const auto bad = run("selfcheck --trials 20 --retention listing");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("counterexample"), std::string::npos);
  const auto none = run("selfcheck --trials 0");
  EXPECT_EQ(none.code, 0);
  EXPECT_NE(none.out.find("warning"), std::string::npos);
}

}  // namespace
}  // namespace ripstream
