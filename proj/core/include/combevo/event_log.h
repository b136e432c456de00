#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combevo/code_block.h"

namespace combevo {

// One admitted block. wall_clock_offset is time since the run started; it is
// only written to the log when timing is enabled, because it would break
// byte-for-byte reproducibility.
struct DiscoveryEvent {
  std::uint64_t iteration = 0;
  BlockId block_id = 0;
  std::string canonical_text;
  std::uint32_t value = 0;
  std::vector<BlockId> parents;
  std::uint32_t generation = 0;
  std::optional<std::chrono::microseconds> wall_clock_offset;

  friend bool operator==(const DiscoveryEvent&, const DiscoveryEvent&) = default;
};

// First line of every event log.
struct EventLogHeader {
  std::string alphabet_hash;  // 16 hex digits
  std::string patterns_hash;  // 16 hex digits
  std::uint64_t rng_seed = 0;
  std::uint64_t max_iterations = 0;
  int max_arity = 0;
  double nest_probability = 0;

  friend bool operator==(const EventLogHeader&, const EventLogHeader&) = default;
};

inline constexpr std::string_view kEventLogFormat = "combevo-events";
inline constexpr int kEventLogVersion = 1;

// JSON Lines: a header record, then one record per event with keys in the
// fixed order iteration, block, value, generation, parents, text
// [, wall_us]. Serialization is deterministic.
std::string FormatHeader(const EventLogHeader& header);
std::string FormatEvent(const DiscoveryEvent& event);

// Append-only writer. Throws IoError on any failed write.
class EventLogWriter {
 public:
  EventLogWriter() = default;
  // Truncates and writes the header.
  EventLogWriter(const std::filesystem::path& path, const EventLogHeader& header);

  void Write(const DiscoveryEvent& event);
  void Flush();
  bool is_open() const { return out_.is_open(); }
  std::uint64_t events_written() const { return events_written_; }

  // Opens an existing log for appending after dropping every event with
  // iteration > keep_through. The existing header must match `header` in
  // every field except max_iterations; the rewritten log carries `header`.
  static EventLogWriter ResumeAfter(const std::filesystem::path& path,
                                    const EventLogHeader& header, std::uint64_t keep_through);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t events_written_ = 0;
};

struct EventLog {
  std::optional<EventLogHeader> header;
  std::vector<DiscoveryEvent> events;
};

// Accepts logs with or without a header line. Throws IoError if unreadable
// and CorruptFileError (with line number) on malformed records or
// non-increasing iterations.
EventLog ReadEventLog(const std::filesystem::path& path);
EventLog ParseEventLog(std::string_view text, std::string_view source = "<log>");

// value -> first iteration at which a block of that value was admitted.
std::map<std::uint32_t, std::uint64_t> Milestones(std::span<const DiscoveryEvent> events);

std::string HexHash(std::uint64_t hash);

}  // namespace combevo
