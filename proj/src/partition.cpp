#include "nvx/partition.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "nvx/text.hpp"

namespace nvx {

std::vector<WeightedUnit> profile_units(const OverheadProfile& profile) {
  std::vector<WeightedUnit> units;
  units.reserve(profile.units.size());
  for (const auto& u : profile.units) units.push_back({u.unit.id, u.overhead});
  return units;
}

std::vector<WeightedUnit> catalog_units(const SanitizerCatalog& catalog) {
  std::vector<WeightedUnit> units;
  units.reserve(catalog.sanitizers.size());
  for (const auto& s : catalog.sanitizers) units.push_back({s.unit.id, s.overhead});
  return units;
}

std::vector<int> PartitionPlan::empty_variants() const {
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (const auto& [id, idx] : assignment) {
    if (idx >= 0 && idx < n) used[static_cast<size_t>(idx)] = true;
  }
  std::vector<int> empty;
  for (int i = 0; i < n; ++i) {
    if (!used[static_cast<size_t>(i)]) empty.push_back(i);
  }
  return empty;
}

std::unordered_map<std::string, int> PartitionPlan::assignment_map() const {
  std::unordered_map<std::string, int> map;
  map.reserve(assignment.size());
  for (const auto& [id, idx] : assignment) map.emplace(id, idx);
  return map;
}

std::string violation_to_string(const Violation& v) {
  switch (v.kind) {
    case ViolationKind::Coverage: return "COVERAGE " + v.a;
    case ViolationKind::ExtraUnit: return "EXTRA_UNIT " + v.a;
    case ViolationKind::BadIndex: return "BAD_INDEX " + v.a;
    case ViolationKind::LoadMismatch: return "LOAD_MISMATCH variant " + v.a;
    case ViolationKind::LoadConservation: return "LOAD_CONSERVATION " + v.a;
    case ViolationKind::Conflict: return "CONFLICT " + v.a + " " + v.b;
  }
  return "UNKNOWN";
}

namespace {

// Adjacency over unit indexes. Validates ids along the way.
struct ConflictGraph {
  std::unordered_map<std::string, size_t> index_of;
  std::vector<std::vector<size_t>> adj;
};

ConflictGraph build_conflict_graph(const std::vector<WeightedUnit>& units,
                                   const ConflictPairs& conflicts) {
  ConflictGraph g;
  g.adj.resize(units.size());
  for (size_t i = 0; i < units.size(); ++i) {
    if (!g.index_of.emplace(units[i].id, i).second) {
      throw Error(ErrorCode::DuplicateUnit, "duplicate unit '" + units[i].id + "'");
    }
  }
  for (const auto& [a, b] : conflicts) {
    if (a == b) {
      throw Error(ErrorCode::SelfConflict, "unit '" + a + "' conflicts with itself");
    }
    auto ia = g.index_of.find(a);
    auto ib = g.index_of.find(b);
    if (ia == g.index_of.end() || ib == g.index_of.end()) {
      throw Error(ErrorCode::UnknownIdInConflict,
                  "conflict (" + a + ", " + b + ") references a unit not in the input");
    }
    g.adj[ia->second].push_back(ib->second);
    g.adj[ib->second].push_back(ia->second);
  }
  return g;
}

PartitionPlan make_plan(const std::vector<WeightedUnit>& units, int n,
                        const std::vector<int>& bin_of) {
  PartitionPlan plan;
  plan.n = n;
  plan.loads.assign(static_cast<size_t>(n), 0);
  plan.assignment.reserve(units.size());
  for (size_t i = 0; i < units.size(); ++i) {
    plan.assignment.emplace_back(units[i].id, bin_of[i]);
    plan.loads[static_cast<size_t>(bin_of[i])] += units[i].cost;
  }
  return plan;
}

}  // namespace

PartitionPlan plan_partition(const std::vector<WeightedUnit>& units, int n,
                             const ConflictPairs& conflicts) {
  if (n < 1) throw Error(ErrorCode::BadParams, "variant count must be >= 1");
  ConflictGraph g = build_conflict_graph(units, conflicts);

  std::vector<size_t> order(units.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (units[a].cost != units[b].cost) return units[a].cost > units[b].cost;
    return units[a].id < units[b].id;
  });

  std::vector<int> bin_of(units.size(), -1);
  std::vector<std::uint64_t> loads(static_cast<size_t>(n), 0);
  for (size_t i : order) {
    int best = -1;
    for (int b = 0; b < n; ++b) {
      bool feasible = true;
      for (size_t v : g.adj[i]) {
        if (bin_of[v] == b) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      if (best == -1 || loads[static_cast<size_t>(b)] < loads[static_cast<size_t>(best)]) {
        best = b;
      }
    }
    if (best == -1) {
      throw Error(ErrorCode::Infeasible,
                  "no conflict-feasible variant for unit '" + units[i].id + "'");
    }
    bin_of[i] = best;
    loads[static_cast<size_t>(best)] += units[i].cost;
  }
  return make_plan(units, n, bin_of);
}

PartitionPlan oracle_partition(const std::vector<WeightedUnit>& units, int n,
                               const ConflictPairs& conflicts) {
  if (n < 1) throw Error(ErrorCode::BadParams, "variant count must be >= 1");
  if (units.size() > 15) {
    throw Error(ErrorCode::TooLarge,
                "exhaustive search is guarded at 15 units, got " + std::to_string(units.size()));
  }
  ConflictGraph g = build_conflict_graph(units, conflicts);

  const size_t m = units.size();
  const std::uint64_t nn = static_cast<std::uint64_t>(n);
  std::uint64_t total = 0;
  for (const auto& u : units) total += u.cost;

  // Assignment vectors are enumerated in lexicographic order restricted to
  // canonical labelings (each new variant index is the smallest unused one).
  // Relabeling variants changes neither the objective nor feasibility, and
  // the lexicographically smallest optimum is itself canonical, so the first
  // optimum found under strict improvement is the required tie-break winner.
  std::vector<int> a(m, -1);
  std::vector<std::uint64_t> loads(static_cast<size_t>(n), 0);
  std::vector<int> best_a;
  std::uint64_t best_obj = 0;  // objective scaled by n to stay integral
  bool found = false;

  auto scaled_objective = [&]() {
    std::uint64_t obj = 0;
    for (std::uint64_t load : loads) {
      std::uint64_t scaled = nn * load;
      obj += scaled > total ? scaled - total : total - scaled;
    }
    return obj;
  };

  auto recurse = [&](auto&& self, size_t i, int max_label) -> void {
    if (i == m) {
      std::uint64_t obj = scaled_objective();
      if (!found || obj < best_obj) {
        found = true;
        best_obj = obj;
        best_a = a;
      }
      return;
    }
    if (found) {
      // Loads only grow, so overshoot is a lower bound on the final
      // objective; pruning on >= keeps the first (lex-least) optimum.
      std::uint64_t lower = 0;
      for (std::uint64_t load : loads) {
        std::uint64_t scaled = nn * load;
        if (scaled > total) lower += scaled - total;
      }
      if (lower >= best_obj) return;
    }
    int limit = std::min(n - 1, max_label + 1);
    for (int b = 0; b <= limit; ++b) {
      bool feasible = true;
      for (size_t v : g.adj[i]) {
        if (a[v] == b) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      a[i] = b;
      loads[static_cast<size_t>(b)] += units[i].cost;
      self(self, i + 1, std::max(max_label, b));
      loads[static_cast<size_t>(b)] -= units[i].cost;
      a[i] = -1;
    }
  };
  recurse(recurse, 0, -1);

  if (!found) {
    throw Error(ErrorCode::Infeasible, "no conflict-feasible assignment exists");
  }
  return make_plan(units, n, best_a);
}

PlanScore evaluate_plan(const PartitionPlan& plan, const std::vector<WeightedUnit>& units) {
  std::unordered_map<std::string, std::uint64_t> cost_of;
  for (const auto& u : units) {
    if (!cost_of.emplace(u.id, u.cost).second) {
      throw Error(ErrorCode::DuplicateUnit, "duplicate unit '" + u.id + "'");
    }
  }
  if (plan.assignment.size() != units.size()) {
    throw Error(ErrorCode::PlanMismatch, "plan covers " + std::to_string(plan.assignment.size()) +
                                             " units, input has " + std::to_string(units.size()));
  }
  std::vector<std::uint64_t> loads(static_cast<size_t>(plan.n), 0);
  std::unordered_set<std::string> seen;
  for (const auto& [id, idx] : plan.assignment) {
    auto it = cost_of.find(id);
    if (it == cost_of.end() || !seen.insert(id).second) {
      throw Error(ErrorCode::PlanMismatch, "plan unit '" + id + "' does not match the input");
    }
    if (idx < 0 || idx >= plan.n) {
      throw Error(ErrorCode::PlanMismatch, "unit '" + id + "' assigned outside [0, n)");
    }
    loads[static_cast<size_t>(idx)] += it->second;
  }

  std::uint64_t total = 0;
  for (const auto& u : units) total += u.cost;

  PlanScore score;
  score.target = Rational(static_cast<std::int64_t>(total), plan.n);
  score.objective = Rational(0);
  for (std::uint64_t load : loads) {
    Rational l(static_cast<std::int64_t>(load));
    score.objective = score.objective + (l < score.target ? score.target - l : l - score.target);
    score.makespan = std::max(score.makespan, load);
  }
  return score;
}

std::vector<Violation> validate_plan(const PartitionPlan& plan,
                                     const std::vector<WeightedUnit>& units,
                                     const ConflictPairs& conflicts) {
  std::vector<Violation> out;

  std::unordered_map<std::string, std::uint64_t> cost_of;
  for (const auto& u : units) cost_of.emplace(u.id, u.cost);
  auto assigned = plan.assignment_map();

  for (const auto& u : units) {
    if (!assigned.count(u.id)) out.push_back({ViolationKind::Coverage, u.id, ""});
  }
  for (const auto& [id, idx] : plan.assignment) {
    if (!cost_of.count(id)) out.push_back({ViolationKind::ExtraUnit, id, ""});
    if (idx < 0 || idx >= plan.n) out.push_back({ViolationKind::BadIndex, id, ""});
  }

  std::vector<std::uint64_t> actual(static_cast<size_t>(plan.n), 0);
  for (const auto& [id, idx] : plan.assignment) {
    auto it = cost_of.find(id);
    if (it != cost_of.end() && idx >= 0 && idx < plan.n) {
      actual[static_cast<size_t>(idx)] += it->second;
    }
  }
  if (plan.loads.size() != static_cast<size_t>(plan.n)) {
    out.push_back({ViolationKind::LoadMismatch,
                   "count " + std::to_string(plan.loads.size()) + " expected " +
                       std::to_string(plan.n),
                   ""});
  } else {
    for (int i = 0; i < plan.n; ++i) {
      if (plan.loads[static_cast<size_t>(i)] != actual[static_cast<size_t>(i)]) {
        out.push_back({ViolationKind::LoadMismatch, std::to_string(i), ""});
      }
    }
  }

  std::uint64_t total = 0;
  for (const auto& u : units) total += u.cost;
  std::uint64_t load_sum = 0;
  for (std::uint64_t load : plan.loads) load_sum += load;
  if (load_sum != total) {
    out.push_back({ViolationKind::LoadConservation,
                   "loads sum to " + std::to_string(load_sum) + ", input total is " +
                       std::to_string(total),
                   ""});
  }

  for (const auto& [a, b] : conflicts) {
    auto ia = assigned.find(a);
    auto ib = assigned.find(b);
    if (ia != assigned.end() && ib != assigned.end() && ia->second == ib->second) {
      out.push_back({ViolationKind::Conflict, a, b});
    }
  }
  return out;
}

PartitionPlan parse_plan(const std::string& text) {
  auto lines = scan_lines(text);
  expect_version_header(lines, "plan");

  PartitionPlan plan;
  bool has_n = false;
  std::unordered_set<std::string> seen_units;
  std::vector<bool> seen_load;

  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& kw = line.tok(0);
    if (kw == "n") {
      if (line.size() != 2) syntax_error(line, "expected 'n <uint>'");
      if (has_n) syntax_error(line, "duplicate 'n'");
      std::uint64_t n = parse_u64(line, line.tok(1));
      if (n < 1 || n > 1000000) syntax_error(line, "variant count out of range");
      plan.n = static_cast<int>(n);
      plan.loads.assign(n, 0);
      seen_load.assign(n, false);
      has_n = true;
    } else if (kw == "assign") {
      if (!has_n) syntax_error(line, "'assign' before 'n'");
      if (line.size() != 3) syntax_error(line, "expected 'assign <unit-id> <variant-index>'");
      std::uint64_t idx = parse_u64(line, line.tok(2));
      if (idx >= static_cast<std::uint64_t>(plan.n)) {
        syntax_error(line, "variant index " + line.tok(2) + " out of range");
      }
      if (!seen_units.insert(line.tok(1)).second) {
        fail_at(ErrorCode::DuplicateUnit, line, "duplicate assignment for '" + line.tok(1) + "'");
      }
      plan.assignment.emplace_back(line.tok(1), static_cast<int>(idx));
    } else if (kw == "load") {
      if (!has_n) syntax_error(line, "'load' before 'n'");
      if (line.size() != 3) syntax_error(line, "expected 'load <variant-index> <uint>'");
      std::uint64_t idx = parse_u64(line, line.tok(1));
      if (idx >= static_cast<std::uint64_t>(plan.n)) {
        syntax_error(line, "variant index " + line.tok(1) + " out of range");
      }
      if (seen_load[idx]) syntax_error(line, "duplicate load for variant " + line.tok(1));
      seen_load[idx] = true;
      plan.loads[idx] = parse_cost(line, line.tok(2));
    } else {
      syntax_error(line, "unknown directive '" + kw + "'");
    }
  }

  if (!has_n) throw Error(ErrorCode::Syntax, "plan document is missing 'n <uint>'");
  for (int i = 0; i < plan.n; ++i) {
    if (!seen_load[static_cast<size_t>(i)]) {
      throw Error(ErrorCode::Syntax, "missing load for variant " + std::to_string(i));
    }
  }
  return plan;
}

std::string serialize_plan(const PartitionPlan& plan) {
  std::ostringstream out;
  out << "plan-version 1\n";
  out << "n " << plan.n << "\n";
  for (const auto& [id, idx] : plan.assignment) {
    out << "assign " << id << " " << idx << "\n";
  }
  for (size_t i = 0; i < plan.loads.size(); ++i) {
    out << "load " << i << " " << plan.loads[i] << "\n";
  }
  return out.str();
}

}  // namespace nvx
