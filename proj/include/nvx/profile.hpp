#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nvx {

enum class UnitKind { CodeUnit, Sanitizer };

struct ProtectionUnit {
  std::string id;
  UnitKind kind = UnitKind::CodeUnit;
};

// One profiling run: per-unit costs in listed order plus the run's total.
// The total covers everything the profiler saw, so total >= sum(entries).
struct ProfileRun {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::uint64_t total = 0;
};

struct UnitOverhead {
  ProtectionUnit unit;
  std::uint64_t overhead = 0;
};

// Distributable per-unit overheads. The residual is carried for reporting
// but never partitioned.
struct OverheadProfile {
  std::vector<UnitOverhead> units;
  std::uint64_t residual = 0;

  std::uint64_t o_total() const;
};

// Conflicts are stored normalized (low id first) and deduplicated, in first
// appearance order.
struct SanitizerCatalog {
  std::vector<UnitOverhead> sanitizers;
  std::vector<std::pair<std::string, std::string>> conflicts;
  std::int64_t synergy = 0;
};

OverheadProfile load_profile(const std::string& text);
std::string serialize_profile(const OverheadProfile& profile);

ProfileRun load_run(const std::string& text);
std::string serialize_run(const ProfileRun& run);

// Instrumented cost minus baseline cost per unit, clamped at zero; units the
// instrumented run adds count at full cost. The residual is whatever part of
// the total slowdown the per-unit deltas fail to explain.
OverheadProfile derive_overhead(const ProfileRun& baseline, const ProfileRun& instrumented);

SanitizerCatalog load_catalog(const std::string& text);
std::string serialize_catalog(const SanitizerCatalog& catalog);

}  // namespace nvx
