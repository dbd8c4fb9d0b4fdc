#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvx/rational.hpp"
#include "nvx/trace.hpp"

namespace nvx {

enum class SyncMode { Strict, Selective };

struct SimulationConfig {
  SyncMode mode = SyncMode::Strict;
  std::uint64_t ring_capacity = 16;  // selective mode only
  std::uint64_t handshake_cost = 1;
  std::vector<SyscallClass> selected = {SyscallClass::IoWrite};
  std::uint64_t scheduler_seed = 0;
};

enum class SyncAction { LockstepSync, BufferedSync, Ignore, OutOfWindow };

SyncAction classify_event(const Syscall& syscall, bool in_window, const SimulationConfig& config);

enum class Verdict { Clean, Alert };
enum class DivergenceKind { Sequence, Argument };

struct AlertInfo {
  DivergenceKind kind = DivergenceKind::Sequence;
  int variant = 0;
  std::uint64_t ordinal = 0;
  std::string unit;  // empty when no report write is involved
};

struct GapStat {
  std::uint64_t max = 0;
  Rational mean;
};

struct SimulationReport {
  Verdict verdict = Verdict::Clean;
  AlertInfo alert;
  std::vector<std::uint64_t> finish;  // per variant: own event costs + own handshakes
  std::uint64_t o_bunshin = 0;
  std::uint64_t o_sync = 0;
  std::vector<GapStat> gaps;  // per variant; index 0 stays zero
  std::uint64_t locks_replayed = 0;
};

// Raw measurements the metric pass folds into a report. All per-variant
// vectors are indexed by variant.
struct ExecutionRecord {
  int n = 0;
  std::vector<std::uint64_t> busy;
  std::vector<std::uint64_t> waiting;
  std::vector<std::uint64_t> handshake_ticks;
  std::vector<std::vector<std::uint64_t>> gap_samples;
  std::vector<std::uint64_t> order_log;                    // appended egids
  std::vector<std::vector<std::uint64_t>> consumed_order;  // replayed egids
  std::uint64_t locks_replayed = 0;
  std::vector<std::string> protocol;  // step log, in execution order
};

// finish, o-sync = handshakes + waiting, o-bunshin = max(finish) + o-sync,
// gap stats, locks replayed. The verdict is the engine's to set.
SimulationReport compute_metrics(const ExecutionRecord& record);

// Deterministic virtual-time simulation of the leader-follower protocol.
// variants[0] leads. extra_units widens the report-digest vocabulary used to
// name the detecting unit. record_out, when given, receives the raw trace.
SimulationReport run_simulation(const std::vector<VariantTrace>& variants,
                                const SimulationConfig& config,
                                const std::vector<std::string>& extra_units = {},
                                ExecutionRecord* record_out = nullptr);

std::string serialize_report(const SimulationReport& report);
SimulationReport parse_report(const std::string& text);

}  // namespace nvx
