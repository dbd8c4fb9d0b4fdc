#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nvx/profile.hpp"
#include "nvx/rational.hpp"

namespace nvx {

struct WeightedUnit {
  std::string id;
  std::uint64_t cost = 0;
};

using ConflictPairs = std::vector<std::pair<std::string, std::string>>;

std::vector<WeightedUnit> profile_units(const OverheadProfile& profile);
std::vector<WeightedUnit> catalog_units(const SanitizerCatalog& catalog);

// Assignment keeps the input unit order; loads index variants 0..n-1.
// Every input unit appears exactly once, so variants are disjoint and the
// loads sum to the input's total by construction.
struct PartitionPlan {
  int n = 1;
  std::vector<std::pair<std::string, int>> assignment;
  std::vector<std::uint64_t> loads;

  std::vector<int> empty_variants() const;
  std::unordered_map<std::string, int> assignment_map() const;
};

// objective = sum over variants of |load - total/n|, exact; makespan = max load.
struct PlanScore {
  Rational objective;
  std::uint64_t makespan = 0;
  Rational target;
};

enum class ViolationKind {
  Coverage,          // input unit missing from the assignment
  ExtraUnit,         // assigned unit not in the input
  BadIndex,          // variant index outside [0, n)
  LoadMismatch,      // stored load differs from the assignment's sum
  LoadConservation,  // stored loads do not sum to the input total
  Conflict,          // conflicting units co-resident
};

struct Violation {
  ViolationKind kind;
  std::string a;  // unit id, or variant index rendered as text
  std::string b;  // second unit id for Conflict
};

std::string violation_to_string(const Violation& v);

// Longest-processing-time greedy: costs descending (ties by id ascending),
// each unit to the least-loaded conflict-feasible variant (ties by lowest
// index). Deterministic; empty variants allowed.
PartitionPlan plan_partition(const std::vector<WeightedUnit>& units, int n,
                             const ConflictPairs& conflicts = {});

// Exhaustive minimum of the fairness objective over all conflict-feasible
// assignments, ties broken by lexicographically smallest assignment vector.
// Guarded at 15 units.
PartitionPlan oracle_partition(const std::vector<WeightedUnit>& units, int n,
                               const ConflictPairs& conflicts = {});

PlanScore evaluate_plan(const PartitionPlan& plan, const std::vector<WeightedUnit>& units);

// Empty result means the plan is valid for the given units and conflicts.
std::vector<Violation> validate_plan(const PartitionPlan& plan,
                                     const std::vector<WeightedUnit>& units,
                                     const ConflictPairs& conflicts = {});

PartitionPlan parse_plan(const std::string& text);
std::string serialize_plan(const PartitionPlan& plan);

}  // namespace nvx
