#include "commands.h"

#include <gtest/gtest.h>

#include <initializer_list>
#include <regex>
#include <set>
#include <sstream>

#include "combevo/error.h"
#include "reference_events.h"
#include "test_util.h"

namespace combevo::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"combevo"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : storage) argv.push_back(arg.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = Main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void WriteLog(const std::filesystem::path& path, std::span<const DiscoveryEvent> events) {
  std::string text;
  for (const auto& e : events) text += FormatEvent(e) + "\n";
  testing::WriteFile(path, text);
}

TEST(ParseCountTest, AcceptsScientificNotation) {
  EXPECT_EQ(ParseCount("1000"), 1000u);
  EXPECT_EQ(ParseCount("1e7"), 10000000u);
  EXPECT_EQ(ParseCount("2.5e3"), 2500u);
  EXPECT_THROW(ParseCount("abc"), ParseError);
  EXPECT_THROW(ParseCount("1.5"), ParseError);
  EXPECT_THROW(ParseCount("-3"), ParseError);
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ParseError("x")), kExitConfig);
  EXPECT_EQ(ExitCodeFor(ValidationError("x")), kExitConfig);
  EXPECT_EQ(ExitCodeFor(PatternError("x", 0)), kExitConfig);
  EXPECT_EQ(ExitCodeFor(IoError("x")), kExitIo);
  EXPECT_EQ(ExitCodeFor(CorruptFileError("x")), kExitIo);
}

TEST(RunCommandTest, ArityBelowTwoIsConfigError) {
  const Result r = RunCli({"run", "--max-arity", "1", "--iterations", "10"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("max_arity"), std::string::npos) << r.err;
}

TEST(RunCommandTest, UnwritableLogIsIoError) {
  const Result r = RunCli({"run", "--iterations", "10", "--log", "/nonexistent/dir/x.jsonl"});
  EXPECT_EQ(r.code, kExitIo);
}

TEST(RunCommandTest, UnknownAlphabetIsIoError) {
  const Result r = RunCli({"run", "--iterations", "10", "--alphabet", "/nonexistent.txt"});
  EXPECT_EQ(r.code, kExitIo);
}

TEST(RunCommandTest, BadFlagIsConfigError) {
  EXPECT_EQ(RunCli({"run", "--iterations", "ten"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"run", "--bogus"}).code, kExitConfig);
}

TEST(RunCommandTest, SameSeedSameLog) {
  const auto dir = testing::ScratchDir();
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    const Result r = RunCli({"run", "--seed", "42", "--iterations", "1e5", "--alphabet",
                             "minimal", "--log", (dir / name).string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("iterations/second"), std::string::npos) << r.out;
  }
  EXPECT_EQ(testing::ReadFile(dir / "a.jsonl"), testing::ReadFile(dir / "b.jsonl"));
  EXPECT_FALSE(ReadEventLog(dir / "a.jsonl").events.empty());
}

TEST(RunCommandTest, ConfigDirectoryLookup) {
  const auto dir = testing::ScratchDir();
  testing::WriteFile(dir / "tiny.txt", Alphabet::Minimal().Serialize());
  ::setenv(kConfigDirEnv, dir.c_str(), 1);
  EXPECT_EQ(ResolveConfigPath("tiny.txt"), (dir / "tiny.txt").string());
  EXPECT_EQ(ResolveConfigPath("builtin"), "builtin");
  const Result r = RunCli({"run", "--iterations", "100", "--alphabet", "tiny.txt", "--quiet"});
  ::unsetenv(kConfigDirEnv);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(StatsTest, ReferenceEvents) {
  const auto events = testing::EarlyReferenceEvents();
  const LogStats stats = ComputeStats(events);
  ASSERT_EQ(stats.points.size(), 6u);
  EXPECT_EQ(stats.points[0], (PlotPoint{4647, 1}));
  EXPECT_EQ(stats.points[5], (PlotPoint{93722, 1}));
  const std::map<std::uint32_t, std::uint64_t> milestones{{1, 4647}};
  EXPECT_EQ(stats.milestones, milestones);

  const auto dir = testing::ScratchDir();
  WriteLog(dir / "log.jsonl", events);
  const Result r = RunCli({"stats", "--log", (dir / "log.jsonl").string(), "--csv",
                           (dir / "plot.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(testing::ReadFile(dir / "plot.csv"),
            "iteration,value\n4647,1\n16394,1\n22729,1\n50419,1\n58595,1\n93722,1\n");
  EXPECT_NE(r.out.find("4647"), std::string::npos) << r.out;
}

TEST(StatsTest, EmptyLog) {
  const auto dir = testing::ScratchDir();
  testing::WriteFile(dir / "log.jsonl", "");
  const Result r = RunCli({"stats", "--log", (dir / "log.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "iteration,value\n");
  EXPECT_NE(r.err.find("events 0"), std::string::npos) << r.err;
  EXPECT_TRUE(ComputeStats({}).milestones.empty());
}

TEST(StatsTest, OnePointPerEvent) {
  std::vector<DiscoveryEvent> events;
  for (std::uint64_t i = 1; i <= 10000; ++i) {
    events.push_back({i * 3, static_cast<BlockId>(100 + i), "int NAME ;",
                      static_cast<std::uint32_t>(1 + i % 4), {1, 2}, 1, {}});
  }
  const auto dir = testing::ScratchDir();
  WriteLog(dir / "log.jsonl", events);
  const Result r = RunCli({"stats", "--log", (dir / "log.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = std::count(r.out.begin(), r.out.end(), '\n');
  EXPECT_EQ(rows, 10001);
  const LogStats stats = ComputeStats(events);
  EXPECT_EQ(stats.points.size(), events.size());
  EXPECT_EQ(stats.milestones.at(2), 3u);
  EXPECT_EQ(stats.milestones.at(1), 12u);
}

TEST(StatsTest, CorruptLogIsIoError) {
  const auto dir = testing::ScratchDir();
  testing::WriteFile(dir / "log.jsonl", "{broken\n");
  EXPECT_EQ(RunCli({"stats", "--log", (dir / "log.jsonl").string()}).code, kExitIo);
  EXPECT_EQ(RunCli({"stats", "--log", (dir / "missing.jsonl").string()}).code, kExitIo);
}

// Identifiers generated for NAME: n1, n2, ... or C1, m1, v1, ...
std::vector<std::string> Identifiers(const std::string& source) {
  static const std::regex kIdent(R"(\b([nCmv]\d+)\b)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(source.begin(), source.end(), kIdent);
       it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1]);
  }
  return out;
}

void ExpectBalanced(const std::string& source) {
  int depth = 0;
  for (char c : source) {
    depth += c == '{' ? 1 : c == '}' ? -1 : 0;
    ASSERT_GE(depth, 0) << source;
  }
  EXPECT_EQ(depth, 0) << source;
}

TEST(RenderTest, ClassWithHole) {
  const std::string source =
      RenderSource("public class NAME { PLACEHOLDER }", NamingMode::kSequential);
  EXPECT_EQ(source, "public class n1 {\n  /* hole */\n}\n");
  ExpectBalanced(source);
}

TEST(RenderTest, ClassWithMethodAndField) {
  const std::string text =
      "public class NAME { public void NAME ( ) { PLACEHOLDER } short NAME ; }";
  const std::string sequential = RenderSource(text, NamingMode::kSequential);
  ExpectBalanced(sequential);
  const auto ids = Identifiers(sequential);
  ASSERT_EQ(ids.size(), 3u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 3u);
  EXPECT_EQ(sequential,
            "public class n1 {\n"
            "  public void n2() {\n"
            "    /* hole */\n"
            "  }\n"
            "  short n3;\n"
            "}\n");

  const std::string role = RenderSource(text, NamingMode::kRole);
  EXPECT_EQ(Identifiers(role), (std::vector<std::string>{"C1", "m1", "v1"}));
  ExpectBalanced(role);
}

TEST(RenderTest, NoNameMeansNoIdentifiers) {
  const std::string source = RenderSource("{ PLACEHOLDER }", NamingMode::kSequential);
  EXPECT_TRUE(Identifiers(source).empty()) << source;
  EXPECT_EQ(source, "{\n  /* hole */\n}\n");
}

TEST(RenderTest, Command) {
  const Result r = RunCli({"render", "--text", "protected class NAME { boolean NAME ; }"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "protected class n1 {\n  boolean n2;\n}\n");
  EXPECT_EQ(RunCli({"render"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"render", "--text", "int", "--naming", "fancy"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"render", "--id", "3"}).code, kExitConfig);
}

// Snapshot with the reference class blocks admitted on top of the seeds.
std::filesystem::path ReferenceSnapshot(const std::filesystem::path& dir) {
  const Alphabet alphabet = Alphabet::Default();
  Repository repo(alphabet);
  std::uint64_t iteration = 0;
  const auto add = [&](const char* text, std::uint32_t value) {
    const std::vector<BlockId> parents{0, 1};
    return *repo.Insert(alphabet.Tokenize(text), value, parents, ++iteration);
  };
  add("short NAME ;", 1);
  add("public void NAME", 1);
  add("protected class NAME { PLACEHOLDER }", 2);
  add("public class NAME { PLACEHOLDER }", 2);
  add("public void NAME ( ) { PLACEHOLDER }", 3);
  add("public class NAME { public void NAME ( ) { PLACEHOLDER } short NAME ; }", 6);
  add("protected class NAME { boolean NAME ; public void NAME ( ) { PLACEHOLDER } }", 6);
  const auto path = dir / "ref.snap";
  WriteSnapshot(repo, path);
  return path;
}

TEST(InspectTest, MinValueFilter) {
  const auto dir = testing::ScratchDir();
  const auto path = ReferenceSnapshot(dir);
  const Snapshot snapshot = ReadSnapshot(path);
  const auto ids = FilterBlocks(snapshot.repository, {2, std::nullopt});
  ASSERT_EQ(ids.size(), 5u);
  const std::size_t seeds = snapshot.repository.seed_count();
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], seeds + 2 + i);

  const Result r = RunCli({"inspect", "--snapshot", path.string(), "--min-value", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_NE(r.out.find("public void NAME ( ) { PLACEHOLDER }"), std::string::npos);
  EXPECT_EQ(r.out.find("short NAME ;\n"), std::string::npos);

  // Render a block by id straight from the snapshot.
  const Result rendered = RunCli({"render", "--snapshot", path.string(), "--id",
                                  std::to_string(seeds + 3)});
  ASSERT_EQ(rendered.code, kExitOk) << rendered.err;
  EXPECT_EQ(rendered.out, "public class n1 {\n  /* hole */\n}\n");
  EXPECT_EQ(RunCli({"render", "--snapshot", path.string(), "--id", "99999"}).code, kExitConfig);
}

TEST(InspectTest, SeedOnlyRepository) {
  const auto dir = testing::ScratchDir();
  WriteSnapshot(Repository(Alphabet::Default()), dir / "seeds.snap");
  const Snapshot snapshot = ReadSnapshot(dir / "seeds.snap");
  EXPECT_EQ(FilterBlocks(snapshot.repository, {}).size(), Alphabet::Default().size());
}

TEST(InspectTest, GenerationZeroIsTheSeedSet) {
  const auto dir = testing::ScratchDir();
  const Result run = RunCli({"run", "--seed", "3", "--iterations", "1e5", "--alphabet", "minimal",
                             "--snapshot", (dir / "run.snap").string(), "--quiet"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  const Snapshot snapshot = ReadSnapshot(dir / "run.snap");
  ASSERT_GT(snapshot.repository.size(), snapshot.repository.seed_count());
  const auto ids = FilterBlocks(snapshot.repository, {std::nullopt, 0});
  EXPECT_EQ(ids.size(), Alphabet::Minimal().size());
  for (BlockId id : ids) EXPECT_TRUE(snapshot.repository.block(id).is_seed());

  const Result r = RunCli({"inspect", "--snapshot", (dir / "run.snap").string(),
                           "--generation", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'),
            static_cast<long>(Alphabet::Minimal().size()) + 1);
}

TEST(VerifyTest, CleanAndTamperedLogs) {
  const auto dir = testing::ScratchDir();
  const auto log_path = (dir / "run.jsonl").string();
  ASSERT_EQ(RunCli({"run", "--seed", "8", "--iterations", "2e5", "--log", log_path, "--quiet"})
                .code,
            kExitOk);
  const Result clean = RunCli({"verify", "--log", log_path});
  EXPECT_EQ(clean.code, kExitOk) << clean.err;
  EXPECT_NE(clean.out.find(" 0 mismatches"), std::string::npos) << clean.out;

  EventLog log = ReadEventLog(log_path);
  ASSERT_FALSE(log.events.empty());
  log.events.front().value += 1;
  std::string text = FormatHeader(*log.header) + "\n";
  for (const auto& e : log.events) text += FormatEvent(e) + "\n";
  testing::WriteFile(dir / "tampered.jsonl", text);
  const Result tampered = RunCli({"verify", "--log", (dir / "tampered.jsonl").string()});
  EXPECT_EQ(tampered.code, kExitConfig);
  EXPECT_NE(tampered.err.find("mismatch at iteration"), std::string::npos);

  const std::vector<DiscoveryEvent> cyclic = {{5, 30, "int NAME ;", 1, {31, 2}, 1, {}}};
  EventLog bad{std::nullopt, cyclic};
  EXPECT_THROW(VerifyLog(bad, Classifier(PatternSet::Builtin())), CorruptFileError);
}

TEST(DumpCommandsTest, PatternsAndAlphabet) {
  const Result patterns = RunCli({"patterns"});
  ASSERT_EQ(patterns.code, kExitOk);
  EXPECT_EQ(patterns.out, PatternSet::Builtin().Dump());
  const Result alphabet = RunCli({"alphabet", "--alphabet", "minimal"});
  ASSERT_EQ(alphabet.code, kExitOk);
  EXPECT_EQ(Alphabet::Parse(alphabet.out), Alphabet::Minimal());

  const auto dir = testing::ScratchDir();
  testing::WriteFile(dir / "bad.tsv", "broken\tclass_def\t2\t(unclosed\n");
  const Result bad = RunCli({"patterns", "--patterns", (dir / "bad.tsv").string()});
  EXPECT_EQ(bad.code, kExitConfig);
  EXPECT_NE(bad.err.find("broken"), std::string::npos) << bad.err;
}

}  // namespace
}  // namespace combevo::cli
