#include "combevo/engine.h"

#include <fstream>
#include <sstream>

#include "combevo/error.h"

namespace combevo {

void RunConfig::Validate() const {
  if (max_arity < kMinArity) {
    throw ValidationError("max_arity must be >= 2 (a combination needs at least two blocks), got " +
                          std::to_string(max_arity));
  }
  if (max_iterations == 0) throw ValidationError("max_iterations must be positive");
  if (!(nest_probability >= 0.0 && nest_probability <= 1.0)) {
    throw ValidationError("nest_probability must lie in [0, 1]");
  }
  if (discard_trace_period == 0) throw ValidationError("discard_trace_period must be positive");
  if (snapshot_every > 0 && EffectiveSnapshotPath().empty()) {
    throw ValidationError("snapshot_every needs a snapshot path or an event log path");
  }
}

std::string RunConfig::EffectiveSnapshotPath() const {
  if (!snapshot_path.empty()) return snapshot_path;
  if (event_log_path.empty()) return {};
  return event_log_path + ".snapshot";
}

std::optional<DiscoveryEvent> Step(Repository& repo, const Classifier& classifier,
                                   const StepOptions& options, Rng& rng,
                                   std::uint64_t iteration, StepScratch& scratch) {
  const int arity = ChooseArity(rng, options.max_arity);
  repo.Sample(rng, static_cast<std::size_t>(arity), scratch.selected);
  scratch.parts.clear();
  for (BlockId id : scratch.selected) scratch.parts.emplace_back(repo.block(id).tokens);
  const CombineOptions combine{repo.alphabet().placeholder(), options.nest_probability};
  Combine(scratch.parts, combine, rng, scratch.candidate);
  repo.alphabet().RenderInto(scratch.candidate, scratch.text);

  const std::uint32_t value = classifier.Score(scratch.text);
  if (value == 0) return std::nullopt;
  const auto id = repo.Insert(scratch.candidate, value, scratch.selected, iteration);
  if (!id) return std::nullopt;

  const CodeBlock& block = repo.block(*id);
  DiscoveryEvent event;
  event.iteration = iteration;
  event.block_id = *id;
  event.canonical_text = scratch.text;
  event.value = value;
  event.parents = block.parents;
  event.generation = block.generation;
  return event;
}

Engine::Engine(Alphabet alphabet, PatternSet patterns, RunConfig config)
    : config_(std::move(config)),
      repo_(std::move(alphabet)),
      classifier_(std::move(patterns)),
      rng_(config_.rng_seed) {
  config_.Validate();
  if (!config_.preload_path.empty()) Preload(config_.preload_path);
}

Engine::Engine(Snapshot snapshot, PatternSet patterns, RunConfig config)
    : config_(std::move(config)),
      repo_(std::move(snapshot.repository)),
      classifier_(std::move(patterns)),
      rng_(config_.rng_seed) {
  config_.Validate();
  if (!snapshot.cursor) {
    throw ValidationError("snapshot has no run cursor; only run snapshots can be resumed");
  }
  const RunCursor& cursor = *snapshot.cursor;
  if (cursor.rng_seed != config_.rng_seed) {
    throw ValidationError("snapshot was taken with seed " + std::to_string(cursor.rng_seed) +
                          ", not " + std::to_string(config_.rng_seed));
  }
  if (cursor.admitted + cursor.discarded != cursor.iteration) {
    throw ValidationError("snapshot cursor counters are inconsistent");
  }
  rng_ = Rng(cursor.rng_seed, cursor.rng_position);
  iteration_ = cursor.iteration;
  admitted_ = cursor.admitted;
  discarded_ = cursor.discarded;
  resumed_ = true;
  resumed_at_ = cursor.iteration;
}

Engine Engine::FromConfig(const RunConfig& config) {
  config.Validate();
  Alphabet alphabet = Alphabet::Resolve(config.alphabet_path);
  PatternSet patterns = PatternSet::Resolve(config.pattern_set_path);
  if (!config.resume_from.empty()) {
    return Engine(ReadSnapshot(config.resume_from, &alphabet), std::move(patterns), config);
  }
  return Engine(std::move(alphabet), std::move(patterns), config);
}

void Engine::Preload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read preload file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<TokenId> tokens = repo_.alphabet().Tokenize(line);
    const std::uint32_t value = classifier_.Score(line);
    const std::uint64_t weight = value > 0 ? value : repo_.alphabet().base_weight();
    repo_.AddSeed(std::move(tokens), value, weight);
  }
}

std::optional<DiscoveryEvent> Engine::StepOnce() {
  const StepOptions options{config_.max_arity, config_.nest_probability};
  ++iteration_;
  auto event = Step(repo_, classifier_, options, rng_, iteration_, scratch_);
  if (event) {
    ++admitted_;
  } else {
    ++discarded_;
  }
  return event;
}

RunCursor Engine::cursor() const {
  return RunCursor{iteration_, rng_.seed(), rng_.position(), admitted_, discarded_};
}

void Engine::WriteSnapshotTo(const std::filesystem::path& path) const {
  WriteSnapshot(repo_, path, cursor());
}

EventLogHeader Engine::LogHeader() const {
  EventLogHeader header;
  header.alphabet_hash = HexHash(repo_.alphabet().Hash());
  header.patterns_hash = HexHash(classifier_.patterns().Hash());
  header.rng_seed = config_.rng_seed;
  header.max_iterations = config_.max_iterations;
  header.max_arity = config_.max_arity;
  header.nest_probability = config_.nest_probability;
  return header;
}

RunReport Engine::Run(const std::function<void(const DiscoveryEvent&)>& on_event) {
  started_ = std::chrono::steady_clock::now();
  const std::uint64_t start_iteration = iteration_;
  const std::string snapshot_path = config_.EffectiveSnapshotPath();
  const bool snapshots = !snapshot_path.empty() &&
                         (config_.snapshot_every > 0 || !config_.snapshot_path.empty());

  EventLogWriter log;
  if (!config_.event_log_path.empty()) {
    if (resumed_ && std::filesystem::exists(config_.event_log_path)) {
      log = EventLogWriter::ResumeAfter(config_.event_log_path, LogHeader(), iteration_);
    } else {
      log = EventLogWriter(config_.event_log_path, LogHeader());
    }
  }
  std::ofstream discard_trace;
  if (!config_.discard_trace_path.empty()) {
    discard_trace.open(config_.discard_trace_path, std::ios::binary | std::ios::trunc);
    if (!discard_trace) throw IoError("cannot open discard trace " + config_.discard_trace_path);
  }

  try {
    while (iteration_ < config_.max_iterations) {
      auto event = StepOnce();
      if (event) {
        if (config_.log_wall_clock) {
          event->wall_clock_offset = std::chrono::duration_cast<std::chrono::microseconds>(
              std::chrono::steady_clock::now() - started_);
        }
        if (log.is_open()) log.Write(*event);
        if (on_event) on_event(*event);
      } else if (discard_trace.is_open() && discarded_ % config_.discard_trace_period == 0) {
        discard_trace << iteration_ << '\t' << scratch_.text << '\n';
        if (!discard_trace) throw IoError("write failed: " + config_.discard_trace_path);
      }
      if (snapshots && config_.snapshot_every > 0 && iteration_ % config_.snapshot_every == 0) {
        if (log.is_open()) log.Flush();
        WriteSnapshotTo(snapshot_path);
      }
    }
    if (log.is_open()) log.Flush();
    if (snapshots) WriteSnapshotTo(snapshot_path);
  } catch (const IoError&) {
    try {
      if (log.is_open()) log.Flush();
      if (!snapshot_path.empty()) WriteSnapshotTo(snapshot_path);
    } catch (const Error&) {
      // The original failure is the one worth reporting.
    }
    throw;
  }

  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_);
  RunReport report;
  report.total_iterations = iteration_;
  report.admitted_count = admitted_;
  report.discard_count = discarded_;
  report.max_value_reached = repo_.max_value();
  for (const auto& block : repo_.blocks()) {
    if (!block.is_seed()) report.first_iteration_at_value.emplace(block.value, block.discovered_at);
  }
  report.elapsed_seconds = elapsed.count();
  const std::uint64_t ran = iteration_ - start_iteration;
  report.iterations_per_second = elapsed.count() > 0 ? static_cast<double>(ran) / elapsed.count() : 0;
  report.resumed = resumed_;
  report.resumed_at = resumed_at_;
  report.repository_size = repo_.size();
  return report;
}

}  // namespace combevo
