#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nvx/partition.hpp"
#include "nvx/profile.hpp"

namespace nvx {

enum class SyscallClass { IoWrite, IoOther, MemMgmt, Virtual };
enum class LockOp { MutexLock, MutexUnlock, CondWait, CondSignal, Barrier };

struct Compute {
  std::uint64_t cost = 0;
};
struct Check {
  std::string unit;
  std::uint64_t cost = 0;
};
struct Syscall {
  std::uint64_t number = 0;
  SyscallClass cls = SyscallClass::IoOther;
  std::uint64_t arg_digest = 0;
  std::uint64_t result_digest = 0;
  std::uint64_t cost = 0;
};
struct Lock {
  std::string lock_id;
  LockOp op = LockOp::MutexLock;
  std::uint64_t cost = 0;
};
struct Fork {
  std::string child;
};
struct MainEnter {};
struct ExitBegin {};
struct Vuln {
  std::string unit;
};

using Event = std::variant<Compute, Check, Syscall, Lock, Fork, MainEnter, ExitBegin, Vuln>;

struct TraceSection {
  std::string id;
  std::vector<Event> events;
};

// sections[0] is the root process program; the rest are fork targets. Every
// non-root section is the target of at least one fork and the fork graph is
// acyclic, so each section is reachable from the root.
struct BaseTrace {
  std::vector<TraceSection> sections;

  const TraceSection* find(const std::string& id) const;
};

struct VariantTrace {
  int variant_index = 0;
  std::vector<TraceSection> sections;

  const TraceSection* find(const std::string& id) const;
};

const char* syscall_class_token(SyscallClass cls);
const char* lock_op_token(LockOp op);

BaseTrace parse_trace(const std::string& text);
std::string serialize_trace(const BaseTrace& trace);

VariantTrace parse_variant(const std::string& text, int variant_index);
std::string serialize_variant(const VariantTrace& variant);

// Keeps CHECK events whose unit the plan assigns to this variant and drops
// the rest. An assigned VULN expands to the report write and truncates the
// section; a foreign VULN disappears. Sections the root can no longer reach
// are pruned.
VariantTrace synthesize_variant(const BaseTrace& base, const PartitionPlan& plan,
                                int variant_index);

// Total CHECK cost per unit over all sections in first-appearance order;
// units seen only in VULN events appear with cost 0. Residual is 0.
OverheadProfile profile_from_trace(const BaseTrace& trace);

struct WorkloadParams {
  std::uint64_t unit_count = 1;
  std::uint64_t event_count = 0;
  std::uint32_t syscall_ratio_bp = 0;  // basis points, 0..10000
  std::uint32_t lock_ratio_bp = 0;
  enum class CostDist { Uniform, HeavyTail };
  CostDist dist = CostDist::Uniform;
  std::vector<std::string> vuln_units;
  std::uint64_t fork_count = 0;
  std::uint64_t seed = 0;
};

BaseTrace generate_trace(const WorkloadParams& params);

}  // namespace nvx
