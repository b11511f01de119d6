#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssbft/adversary.hpp"
#include "ssbft/cores.hpp"
#include "ssbft/env.hpp"

namespace ssbft {

struct TrialConfig {
  Params params;
  Policy adversary = Policy::kSilent;
  InjectMode inject = InjectMode::kNone;
  CoreKind core = CoreKind::kStub;
  std::uint32_t dmax = 3;
  std::uint64_t rounds = 500;
};

// Per correct node, per round.
struct NodeRecord {
  NodeId id = 0;
  std::uint64_t index_start = 0;
  std::uint64_t index_end = 0;
  MaybeValue mvc;                // floating output after this round's pulse
  std::optional<Value> input;    // value proposed to the MVC (phase 0 only)
  bool raw_delivered = false;    // wasDelivered() of the current object at phase 0
  std::vector<std::uint32_t> recycled;  // slots reset from a non-fresh state
  std::uint32_t non_fresh = 0;
  std::vector<bool> live;        // non-fresh slots
  std::uint32_t tainted = 0;     // non-fresh slots still carrying injected state
  std::vector<bool> delivered;   // delivered[] of the current object
};

struct RoundRecord {
  Round round = 0;
  Phase phase = 0;
  Bit coin = 0;
  std::vector<NodeRecord> nodes;
  std::uint64_t digest = 0;  // over every envelope sent this round
  // Slots recycled this round at some correct node after being read by some but not
  // all correct nodes.
  std::uint32_t unread_recycles = 0;
  std::uint32_t completed = 0;  // instances read by every correct node, then recycled
  std::vector<std::string> order;  // event order within the round
};

struct Trace {
  TrialConfig config;
  std::vector<NodeId> byzantine;
  std::vector<std::string> corruption_log;
  std::vector<RoundRecord> rounds;
};

struct CorViolations {
  std::uint64_t agreement = 0;
  std::uint64_t validity1 = 0;
  std::uint64_t validity2 = 0;
  std::uint64_t assumption1 = 0;
  std::uint64_t window = 0;

  std::uint64_t total() const { return agreement + validity1 + validity2 + assumption1 + window; }
};

struct Metrics {
  std::uint64_t seed = 0;
  std::optional<Round> stabilization_round;
  std::optional<Round> core_stabilization_round;
  std::optional<std::uint64_t> cycles_to_index_agreement;
  CorViolations cor;
  std::uint64_t instances_completed = 0;
  // Phase-0 captures from round 2*kappa on that break agreement or validity.
  std::uint64_t capture_violations = 0;
  // After the first agreed cycle end at or past round 2*kappa: cycle ends whose index
  // does not follow (v + inc) mod I at every correct node.
  std::uint64_t closure_violations = 0;
  std::uint64_t closure_cycles = 0;
  std::uint64_t closure_increments = 0;
  // Cycles that start with disagreeing indices, and how many of them end agreed.
  std::uint64_t unequal_cycles = 0;
  std::uint64_t converged_cycles = 0;
  std::uint32_t max_non_fresh = 0;  // post-stabilization
};

// Rejects invalid configurations with ParamError listing every violation.
void check_config(const TrialConfig& config);

Trace run_trial(const TrialConfig& config);

// kCore: agreed in-range indices, closure steps and legal MVC captures.
// kFull: additionally, every slot is live at all correct nodes or at none, which is
// what recycling agreement needs.
enum class Legality { kCore, kFull };

/// First round of the final suffix in which every round is legal; nullopt when that
/// suffix is shorter than one cycle.
std::optional<Round> measure_stabilization(const Trace& trace, Legality scope = Legality::kFull);

Metrics compute_metrics(const Trace& trace);

// CSV output. Columns are fixed; see README.
std::string csv_header();
std::string csv_row(const TrialConfig& config, const Metrics& m);
void write_summary(std::ostream& os, const std::vector<Metrics>& all);

// One line per round, byte-stable for a given configuration.
void write_trace(std::ostream& os, const Trace& trace);

}  // namespace ssbft
