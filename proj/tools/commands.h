#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combevo/classifier.h"
#include "combevo/engine.h"
#include "combevo/event_log.h"
#include "combevo/repository.h"

namespace combevo::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

// Directory searched for relative --alphabet / --patterns names that do not
// exist relative to the working directory.
inline constexpr const char* kConfigDirEnv = "COMBEVO_CONFIG_DIR";

std::string ResolveConfigPath(std::string_view name);

// Accepts plain integers and integral scientific notation ("1e7").
// Throws ParseError.
std::uint64_t ParseCount(std::string_view text);

int ExitCodeFor(const std::exception& error);

// run ----------------------------------------------------------------------

void PrintRunReport(const RunReport& report, std::ostream& out);

// stats --------------------------------------------------------------------

struct PlotPoint {
  std::uint64_t iteration;
  std::uint32_t value;

  friend bool operator==(const PlotPoint&, const PlotPoint&) = default;
};

struct LogStats {
  std::vector<PlotPoint> points;
  std::map<std::uint32_t, std::uint64_t> milestones;
  std::map<std::uint32_t, std::uint64_t> count_by_value;
};

LogStats ComputeStats(std::span<const DiscoveryEvent> events);

// Header `iteration,value`, one row per event.
void WritePlotCsv(const LogStats& stats, std::ostream& out);
void WriteMilestoneTable(const LogStats& stats, std::ostream& out);

// render -------------------------------------------------------------------

enum class NamingMode {
  kSequential,  // n1, n2, ... left to right
  kRole,        // C1 for classes, m1 for methods, v1 for variables, n1 otherwise
};

std::optional<NamingMode> ParseNamingMode(std::string_view text);

inline constexpr std::string_view kHoleMarker = "/* hole */";

// Java-style source text: NAME becomes a fresh identifier, PLACEHOLDER an
// empty body comment, and braces open indented blocks.
std::string RenderSource(std::span<const std::string_view> tokens, NamingMode mode);
std::string RenderSource(std::string_view canonical, NamingMode mode);

// inspect ------------------------------------------------------------------

struct InspectFilter {
  std::optional<std::uint32_t> min_value;
  std::optional<std::uint32_t> generation;
};

std::vector<BlockId> FilterBlocks(const Repository& repo, const InspectFilter& filter);
void WriteBlockTable(const Repository& repo, std::span<const BlockId> ids, std::ostream& out);

// verify -------------------------------------------------------------------

struct VerifyMismatch {
  std::uint64_t iteration;
  BlockId block_id;
  std::uint32_t logged_value;
  std::uint32_t recomputed_value;
};

// Recomputes every event's value and checks lineage: parents must refer to
// earlier blocks. Returns the events whose value disagrees.
std::vector<VerifyMismatch> VerifyLog(const EventLog& log, const Classifier& classifier);

// Entry point used by main(); returns the process exit code.
int Main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace combevo::cli
