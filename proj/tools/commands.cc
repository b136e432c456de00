#include "commands.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "combevo/error.h"

namespace combevo::cli {
namespace {

std::vector<std::string_view> SplitCanonical(std::string_view canonical) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start < canonical.size()) {
    std::size_t end = canonical.find(' ', start);
    if (end == std::string_view::npos) end = canonical.size();
    if (end > start) tokens.push_back(canonical.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

bool IsPrimitiveType(std::string_view token) {
  for (std::string_view type : {"boolean", "byte", "char", "double", "float", "int", "long", "short"}) {
    if (token == type) return true;
  }
  return false;
}

bool IsWordLike(std::string_view token) {
  const auto c = static_cast<unsigned char>(token.front());
  return std::isalnum(c) || c == '_' || c == '$';
}

class SourceWriter {
 public:
  void Word(std::string_view text) {
    if (!line_.empty() && NeedsSpace(text)) line_ += ' ';
    line_ += text;
    previous_ = text;
  }

  void Open() {
    Word("{");
    Flush();
    ++depth_;
  }

  void Close() {
    Flush();
    if (depth_ > 0) --depth_;
    line_ = "}";
    Flush();
  }

  void Hole() {
    Flush();
    line_ = kHoleMarker;
    Flush();
  }

  void Flush() {
    if (line_.empty()) return;
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
    out_ += line_;
    out_ += '\n';
    line_.clear();
    previous_ = {};
  }

  std::string Finish() {
    Flush();
    return std::move(out_);
  }

 private:
  bool NeedsSpace(std::string_view next) const {
    if (next == ";" || next == "," || next == ")" || next == ".") return false;
    if (previous_ == "(" || previous_ == ".") return false;
    if (next == "(" && !previous_.empty() && IsWordLike(previous_) && previous_ != "if" &&
        previous_ != "for" && previous_ != "while" && previous_ != "switch") {
      return false;
    }
    return true;
  }

  std::string out_;
  std::string line_;
  std::string_view previous_;
  int depth_ = 0;
};

// Token strings for generated names need stable storage while the writer
// holds views into them.
struct NameGenerator {
  explicit NameGenerator(NamingMode mode) : mode(mode) {}

  std::string Next(std::string_view previous) {
    if (mode == NamingMode::kSequential) return "n" + std::to_string(++counts['n']);
    char role = 'n';
    if (previous == "class" || previous == "interface" || previous == "enum") {
      role = 'C';
    } else if (previous == "void") {
      role = 'm';
    } else if (IsPrimitiveType(previous) || previous == "String") {
      role = 'v';
    }
    return std::string(1, role) + std::to_string(++counts[role]);
  }

  NamingMode mode;
  std::map<char, int> counts;
};

std::string FormatCount(std::uint64_t value) { return std::to_string(value); }

}  // namespace

std::string ResolveConfigPath(std::string_view name) {
  const std::string path(name);
  if (name.empty() || name == "builtin" || name == "default" || name == "minimal" ||
      name == "java" || name == "java-minimal") {
    return path;
  }
  if (std::filesystem::exists(path)) return path;
  if (const char* dir = std::getenv(kConfigDirEnv); dir != nullptr && *dir != '\0') {
    const auto candidate = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(candidate)) return candidate.string();
  }
  return path;
}

std::uint64_t ParseCount(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw ParseError("empty count");
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ParseError("count out of range: " + s);
    }
  }
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a count: " + s);
  }
  if (used != s.size() || !(value >= 0) || value > 1.8e19 || std::floor(value) != value) {
    throw ParseError("not a non-negative integral count: " + s);
  }
  return static_cast<std::uint64_t>(value);
}

int ExitCodeFor(const std::exception& error) {
  if (dynamic_cast<const IoError*>(&error) != nullptr ||
      dynamic_cast<const CorruptFileError*>(&error) != nullptr) {
    return kExitIo;
  }
  return kExitConfig;
}

void PrintRunReport(const RunReport& report, std::ostream& out) {
  const auto row = [&out](std::string_view key, const std::string& value) {
    out << std::left << std::setw(22) << key << value << '\n';
  };
  std::ostringstream rate;
  rate << std::fixed << std::setprecision(0) << report.iterations_per_second;
  std::ostringstream elapsed;
  elapsed << std::fixed << std::setprecision(3) << report.elapsed_seconds << " s";
  row("iterations", FormatCount(report.total_iterations));
  row("admitted", FormatCount(report.admitted_count));
  row("discarded", FormatCount(report.discard_count));
  row("max value", std::to_string(report.max_value_reached));
  row("repository size", std::to_string(report.repository_size));
  row("elapsed", elapsed.str());
  row("iterations/second", rate.str());
  row("resumed", report.resumed ? "yes (from iteration " + FormatCount(report.resumed_at) + ")" : "no");
  out << "first iteration at value\n";
  out << "  value  iteration\n";
  for (const auto& [value, iteration] : report.first_iteration_at_value) {
    out << "  " << std::left << std::setw(7) << value << iteration << '\n';
  }
}

LogStats ComputeStats(std::span<const DiscoveryEvent> events) {
  LogStats stats;
  stats.points.reserve(events.size());
  for (const auto& event : events) {
    stats.points.push_back({event.iteration, event.value});
    ++stats.count_by_value[event.value];
  }
  stats.milestones = Milestones(events);
  return stats;
}

void WritePlotCsv(const LogStats& stats, std::ostream& out) {
  out << "iteration,value\n";
  for (const auto& point : stats.points) out << point.iteration << ',' << point.value << '\n';
}

void WriteMilestoneTable(const LogStats& stats, std::ostream& out) {
  out << "events " << stats.points.size() << '\n';
  out << "value  first_iteration  count\n";
  for (const auto& [value, iteration] : stats.milestones) {
    out << std::left << std::setw(7) << value << std::setw(17) << iteration
        << stats.count_by_value.at(value) << '\n';
  }
}

std::optional<NamingMode> ParseNamingMode(std::string_view text) {
  if (text == "sequential") return NamingMode::kSequential;
  if (text == "role") return NamingMode::kRole;
  return std::nullopt;
}

std::string RenderSource(std::span<const std::string_view> tokens, NamingMode mode) {
  SourceWriter writer;
  NameGenerator names(mode);
  std::vector<std::string> generated;
  generated.reserve(tokens.size());
  std::string_view previous;
  for (std::string_view token : tokens) {
    if (token == kNameText) {
      generated.push_back(names.Next(previous));
      writer.Word(generated.back());
    } else if (token == kPlaceholderText) {
      writer.Hole();
    } else if (token == "{") {
      writer.Open();
    } else if (token == "}") {
      writer.Close();
    } else if (token == ";") {
      writer.Word(token);
      writer.Flush();
    } else {
      writer.Word(token);
    }
    previous = token;
  }
  return writer.Finish();
}

std::string RenderSource(std::string_view canonical, NamingMode mode) {
  const auto tokens = SplitCanonical(canonical);
  if (tokens.empty()) throw ValidationError("nothing to render");
  return RenderSource(tokens, mode);
}

std::vector<BlockId> FilterBlocks(const Repository& repo, const InspectFilter& filter) {
  std::vector<BlockId> ids;
  for (const auto& block : repo.blocks()) {
    if (filter.min_value && block.value < *filter.min_value) continue;
    if (filter.generation && block.generation != *filter.generation) continue;
    ids.push_back(block.id);
  }
  return ids;
}

void WriteBlockTable(const Repository& repo, std::span<const BlockId> ids, std::ostream& out) {
  out << std::left << std::setw(8) << "id" << std::setw(7) << "value" << std::setw(5) << "gen"
      << std::setw(12) << "iteration" << std::setw(24) << "parents" << "text" << '\n';
  for (BlockId id : ids) {
    const CodeBlock& block = repo.block(id);
    std::string parents = "-";
    if (!block.parents.empty()) {
      parents.clear();
      for (std::size_t i = 0; i < block.parents.size(); ++i) {
        if (i != 0) parents += ',';
        parents += std::to_string(block.parents[i]);
      }
    }
    out << std::left << std::setw(8) << block.id << std::setw(7) << block.value << std::setw(5)
        << block.generation << std::setw(12) << block.discovered_at << std::setw(24) << parents
        << repo.alphabet().Render(block.tokens) << '\n';
  }
}

std::vector<VerifyMismatch> VerifyLog(const EventLog& log, const Classifier& classifier) {
  std::vector<VerifyMismatch> mismatches;
  for (const auto& event : log.events) {
    for (BlockId parent : event.parents) {
      if (parent >= event.block_id) {
        throw CorruptFileError("event at iteration " + std::to_string(event.iteration) +
                               " names parent " + std::to_string(parent) +
                               " that is not older than block " + std::to_string(event.block_id));
      }
    }
    const std::uint32_t recomputed = classifier.Score(event.canonical_text);
    if (recomputed != event.value) {
      mismatches.push_back({event.iteration, event.block_id, event.value, recomputed});
    }
  }
  return mismatches;
}

int Main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Combinatorial evolution of code blocks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "combevo 0.1.0");

  // run
  RunConfig config;
  std::string iterations = "1000000";
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a simulation and stream discoveries to an event log");
  run->add_option("--seed", config.rng_seed, "RNG seed")->capture_default_str();
  run->add_option("--iterations", iterations, "Iterations to execute (accepts 1e7)")
      ->capture_default_str();
  run->add_option("--max-arity", config.max_arity, "Largest number of blocks per combination")
      ->capture_default_str();
  run->add_option("--nest-prob", config.nest_probability, "Probability of nesting into a placeholder")
      ->capture_default_str();
  run->add_option("--alphabet", config.alphabet_path,
                  "Alphabet file, or builtin / minimal")->capture_default_str();
  run->add_option("--patterns", config.pattern_set_path, "Pattern file, or builtin")
      ->capture_default_str();
  run->add_option("--log", config.event_log_path, "Event log path (JSON lines)");
  run->add_option("--snapshot-every", config.snapshot_every, "Snapshot period in iterations (0 = never)");
  run->add_option("--snapshot", config.snapshot_path, "Snapshot path (default: <log>.snapshot)");
  run->add_option("--resume", config.resume_from, "Continue from a run snapshot");
  run->add_option("--preload", config.preload_path, "File of canonical block texts added as seeds");
  run->add_option("--discard-trace", config.discard_trace_path,
                  "Write every Nth discarded candidate here");
  run->add_option("--discard-trace-period", config.discard_trace_period, "N for --discard-trace")
      ->capture_default_str();
  run->add_flag("--log-timing", config.log_wall_clock,
                "Record wall-clock offsets in the log (breaks byte determinism)");
  run->add_flag("--quiet", quiet, "Do not print the summary");

  // stats
  std::string stats_log;
  std::string stats_csv = "-";
  auto* stats = app.add_subcommand("stats", "Plot data (iteration,value) and milestones from a log");
  stats->add_option("--log", stats_log, "Event log")->required();
  stats->add_option("--csv", stats_csv, "CSV output path, '-' for standard output")
      ->capture_default_str();

  // render
  std::string render_snapshot;
  std::optional<BlockId> render_id;
  std::string render_text;
  std::string render_naming = "sequential";
  auto* render = app.add_subcommand("render", "Render a block as indented source text");
  render->add_option("--snapshot", render_snapshot, "Snapshot holding the block");
  render->add_option("--id", render_id, "Block id (needs --snapshot)");
  render->add_option("--text", render_text, "Canonical block text instead of an id");
  render->add_option("--naming", render_naming, "sequential or role")->capture_default_str();

  // inspect
  std::string inspect_snapshot;
  InspectFilter filter;
  auto* inspect = app.add_subcommand("inspect", "List blocks of a snapshot");
  inspect->add_option("--snapshot", inspect_snapshot, "Snapshot file")->required();
  inspect->add_option("--min-value", filter.min_value, "Only blocks with value >= N");
  inspect->add_option("--generation", filter.generation, "Only blocks of generation G");

  // verify
  std::string verify_log;
  std::string verify_patterns = "builtin";
  auto* verify = app.add_subcommand("verify", "Replay a log through the classifier");
  verify->add_option("--log", verify_log, "Event log")->required();
  verify->add_option("--patterns", verify_patterns, "Pattern file, or builtin")->capture_default_str();

  // patterns / alphabet dumps
  std::string dump_patterns = "builtin";
  auto* patterns = app.add_subcommand("patterns", "Print a pattern set in file format");
  patterns->add_option("--patterns", dump_patterns, "Pattern file, or builtin")->capture_default_str();
  std::string dump_alphabet = "builtin";
  auto* alphabet = app.add_subcommand("alphabet", "Print an alphabet in file format");
  alphabet->add_option("--alphabet", dump_alphabet, "Alphabet file, builtin or minimal")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      config.max_iterations = ParseCount(iterations);
      config.alphabet_path = ResolveConfigPath(config.alphabet_path);
      config.pattern_set_path = ResolveConfigPath(config.pattern_set_path);
      Engine engine = Engine::FromConfig(config);
      const RunReport report = engine.Run();
      if (!quiet) PrintRunReport(report, out);
    } else if (stats->parsed()) {
      const EventLog log = ReadEventLog(stats_log);
      const LogStats result = ComputeStats(log.events);
      if (stats_csv == "-") {
        WritePlotCsv(result, out);
        WriteMilestoneTable(result, err);
      } else {
        std::ofstream csv(stats_csv, std::ios::binary | std::ios::trunc);
        WritePlotCsv(result, csv);
        csv.flush();
        if (!csv) throw IoError("cannot write " + stats_csv);
        WriteMilestoneTable(result, out);
      }
    } else if (render->parsed()) {
      const auto mode = ParseNamingMode(render_naming);
      if (!mode) throw ParseError("unknown naming mode '" + render_naming + "'");
      std::string text = render_text;
      if (render_id) {
        if (render_snapshot.empty()) throw ParseError("--id needs --snapshot");
        const Snapshot snapshot = ReadSnapshot(render_snapshot);
        if (*render_id >= snapshot.repository.size()) {
          throw ValidationError("unknown block id " + std::to_string(*render_id));
        }
        text = snapshot.repository.alphabet().Render(snapshot.repository.block(*render_id).tokens);
      } else if (text.empty()) {
        throw ParseError("render needs --text or --snapshot with --id");
      }
      out << RenderSource(text, *mode);
    } else if (inspect->parsed()) {
      const Snapshot snapshot = ReadSnapshot(inspect_snapshot);
      const auto ids = FilterBlocks(snapshot.repository, filter);
      WriteBlockTable(snapshot.repository, ids, out);
    } else if (verify->parsed()) {
      const EventLog log = ReadEventLog(verify_log);
      const Classifier classifier(PatternSet::Resolve(ResolveConfigPath(verify_patterns)));
      if (log.header && log.header->patterns_hash != HexHash(classifier.patterns().Hash())) {
        err << "warning: log was written with a different pattern set\n";
      }
      const auto mismatches = VerifyLog(log, classifier);
      for (const auto& m : mismatches) {
        err << "mismatch at iteration " << m.iteration << " block " << m.block_id << ": logged "
            << m.logged_value << ", recomputed " << m.recomputed_value << '\n';
      }
      out << log.events.size() << " events, " << mismatches.size() << " mismatches\n";
      if (!mismatches.empty()) return kExitConfig;
    } else if (patterns->parsed()) {
      out << PatternSet::Resolve(ResolveConfigPath(dump_patterns)).Dump();
    } else if (alphabet->parsed()) {
      out << Alphabet::Resolve(ResolveConfigPath(dump_alphabet)).Serialize();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace combevo::cli
