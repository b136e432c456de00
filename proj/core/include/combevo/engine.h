#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combevo/alphabet.h"
#include "combevo/classifier.h"
#include "combevo/combinator.h"
#include "combevo/event_log.h"
#include "combevo/repository.h"
#include "combevo/rng.h"

namespace combevo {

inline constexpr std::uint64_t kDefaultDiscardTracePeriod = 1'000'000;

struct RunConfig {
  std::uint64_t rng_seed = 0;
  std::uint64_t max_iterations = 1'000'000;
  int max_arity = kDefaultMaxArity;
  double nest_probability = kDefaultNestProbability;
  std::string alphabet_path = "builtin";
  std::string pattern_set_path = "builtin";
  std::string event_log_path;     // empty: no log
  std::uint64_t snapshot_every = 0;  // 0: never
  std::string snapshot_path;      // empty: event_log_path + ".snapshot"
  std::string resume_from;        // snapshot to continue from
  std::string preload_path;       // canonical block texts added as extra seeds
  std::string discard_trace_path;  // empty: no discard trace
  std::uint64_t discard_trace_period = kDefaultDiscardTracePeriod;
  bool log_wall_clock = false;

  // Throws ValidationError.
  void Validate() const;
  std::string EffectiveSnapshotPath() const;
};

struct RunReport {
  std::uint64_t total_iterations = 0;
  std::uint64_t admitted_count = 0;
  std::uint64_t discard_count = 0;
  std::uint32_t max_value_reached = 0;
  std::map<std::uint32_t, std::uint64_t> first_iteration_at_value;
  double iterations_per_second = 0;
  double elapsed_seconds = 0;
  bool resumed = false;
  std::uint64_t resumed_at = 0;
  std::size_t repository_size = 0;
};

struct StepOptions {
  int max_arity = kDefaultMaxArity;
  double nest_probability = kDefaultNestProbability;
};

// Reusable buffers for Step; avoids per-iteration allocation.
struct StepScratch {
  std::vector<BlockId> selected;
  std::vector<std::span<const TokenId>> parts;
  std::vector<TokenId> candidate;
  std::string text;
};

// One iteration: draw the arity, sample that many blocks by weight, combine
// them, classify the result and admit it if it scores >= 1 and is new.
// Returns the event on admission, nullopt on discard. Candidate text is left
// in scratch.text either way.
std::optional<DiscoveryEvent> Step(Repository& repo, const Classifier& classifier,
                                   const StepOptions& options, Rng& rng,
                                   std::uint64_t iteration, StepScratch& scratch);

// Owns a run's state: repository, classifier, random stream and counters.
class Engine {
 public:
  // Fresh run: seeds the repository from the alphabet (plus any preload).
  Engine(Alphabet alphabet, PatternSet patterns, RunConfig config);
  // Continues from a snapshot written by a previous run with a cursor.
  Engine(Snapshot snapshot, PatternSet patterns, RunConfig config);

  // Convenience: resolves alphabet/pattern paths and resume settings.
  static Engine FromConfig(const RunConfig& config);

  // Executes the remaining iterations up to config.max_iterations, streaming
  // events to the log (if configured) and to `on_event` (if set). On an I/O
  // failure the log is flushed, a snapshot is attempted, and the error is
  // rethrown.
  RunReport Run(const std::function<void(const DiscoveryEvent&)>& on_event = {});

  // Single iteration without logging; advances the counters.
  std::optional<DiscoveryEvent> StepOnce();

  void WriteSnapshotTo(const std::filesystem::path& path) const;
  RunCursor cursor() const;

  const Repository& repository() const { return repo_; }
  Repository& mutable_repository() { return repo_; }
  const Classifier& classifier() const { return classifier_; }
  const RunConfig& config() const { return config_; }
  std::uint64_t iteration() const { return iteration_; }
  EventLogHeader LogHeader() const;

 private:
  void Preload(const std::filesystem::path& path);

  RunConfig config_;
  Repository repo_;
  Classifier classifier_;
  Rng rng_;
  StepScratch scratch_;
  std::uint64_t iteration_ = 0;
  std::uint64_t admitted_ = 0;
  std::uint64_t discarded_ = 0;
  bool resumed_ = false;
  std::uint64_t resumed_at_ = 0;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace combevo
