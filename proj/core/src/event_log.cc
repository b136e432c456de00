#include "combevo/event_log.h"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "combevo/error.h"

namespace combevo {
namespace {

using OrderedJson = nlohmann::ordered_json;

OrderedJson HeaderJson(const EventLogHeader& header) {
  OrderedJson j;
  j["format"] = kEventLogFormat;
  j["version"] = kEventLogVersion;
  j["alphabet_hash"] = header.alphabet_hash;
  j["patterns_hash"] = header.patterns_hash;
  j["seed"] = header.rng_seed;
  j["max_iterations"] = header.max_iterations;
  j["max_arity"] = header.max_arity;
  j["nest_probability"] = header.nest_probability;
  return j;
}

template <typename T>
T Get(const OrderedJson& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw CorruptFileError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(where + ": field '" + key + "': " + e.what());
  }
}

EventLogHeader ParseHeader(const OrderedJson& j, const std::string& where) {
  if (Get<std::string>(j, "format", where) != kEventLogFormat) {
    throw CorruptFileError(where + ": not a combevo event log");
  }
  if (Get<int>(j, "version", where) != kEventLogVersion) {
    throw CorruptFileError(where + ": unsupported event log version");
  }
  EventLogHeader header;
  header.alphabet_hash = Get<std::string>(j, "alphabet_hash", where);
  header.patterns_hash = Get<std::string>(j, "patterns_hash", where);
  header.rng_seed = Get<std::uint64_t>(j, "seed", where);
  header.max_iterations = Get<std::uint64_t>(j, "max_iterations", where);
  header.max_arity = Get<int>(j, "max_arity", where);
  header.nest_probability = Get<double>(j, "nest_probability", where);
  return header;
}

DiscoveryEvent ParseEvent(const OrderedJson& j, const std::string& where) {
  DiscoveryEvent event;
  event.iteration = Get<std::uint64_t>(j, "iteration", where);
  event.block_id = Get<BlockId>(j, "block", where);
  event.value = Get<std::uint32_t>(j, "value", where);
  event.generation = Get<std::uint32_t>(j, "generation", where);
  event.parents = Get<std::vector<BlockId>>(j, "parents", where);
  event.canonical_text = Get<std::string>(j, "text", where);
  if (j.contains("wall_us")) {
    event.wall_clock_offset = std::chrono::microseconds(Get<std::int64_t>(j, "wall_us", where));
  }
  if (event.value == 0) throw CorruptFileError(where + ": event with value 0");
  if (event.canonical_text.empty()) throw CorruptFileError(where + ": event without text");
  return event;
}

}  // namespace

std::string HexHash(std::uint64_t hash) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string FormatHeader(const EventLogHeader& header) { return HeaderJson(header).dump(); }

std::string FormatEvent(const DiscoveryEvent& event) {
  OrderedJson j;
  j["iteration"] = event.iteration;
  j["block"] = event.block_id;
  j["value"] = event.value;
  j["generation"] = event.generation;
  j["parents"] = event.parents;
  j["text"] = event.canonical_text;
  if (event.wall_clock_offset) j["wall_us"] = event.wall_clock_offset->count();
  return j.dump();
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path, const EventLogHeader& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open event log " + path.string() + " for writing");
  out_ << FormatHeader(header) << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
}

void EventLogWriter::Write(const DiscoveryEvent& event) {
  out_ << FormatEvent(event) << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
  ++events_written_;
}

void EventLogWriter::Flush() {
  out_.flush();
  if (!out_) throw IoError("flush failed: " + path_.string());
}

EventLogWriter EventLogWriter::ResumeAfter(const std::filesystem::path& path,
                                           const EventLogHeader& header,
                                           std::uint64_t keep_through) {
  EventLog existing = ReadEventLog(path);
  // A resumed run may extend the iteration budget; everything else that
  // shapes the random stream must match.
  EventLogHeader comparable = header;
  if (existing.header) comparable.max_iterations = existing.header->max_iterations;
  if (existing.header && !(*existing.header == comparable)) {
    throw ValidationError(path.string() + ": existing log was written with a different configuration");
  }
  EventLogWriter writer(path, header);
  for (const auto& event : existing.events) {
    if (event.iteration > keep_through) break;
    writer.Write(event);
  }
  writer.Flush();
  return writer;
}

EventLog ParseEventLog(std::string_view text, std::string_view source) {
  EventLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t last_iteration = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    OrderedJson j;
    try {
      j = OrderedJson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorruptFileError(where + ": " + e.what());
    }
    if (!j.is_object()) throw CorruptFileError(where + ": record is not an object");
    if (j.contains("format")) {
      if (log.header || !log.events.empty()) {
        throw CorruptFileError(where + ": header record after the first line");
      }
      log.header = ParseHeader(j, where);
      continue;
    }
    DiscoveryEvent event = ParseEvent(j, where);
    if (!log.events.empty() && event.iteration <= last_iteration) {
      throw CorruptFileError(where + ": iterations must be strictly increasing");
    }
    last_iteration = event.iteration;
    log.events.push_back(std::move(event));
  }
  return log;
}

EventLog ReadEventLog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read event log " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseEventLog(buffer.str(), path.string());
}

std::map<std::uint32_t, std::uint64_t> Milestones(std::span<const DiscoveryEvent> events) {
  std::map<std::uint32_t, std::uint64_t> first;
  for (const auto& event : events) first.emplace(event.value, event.iteration);
  return first;
}

}  // namespace combevo
