#include "nvx/profile.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "nvx/text.hpp"

namespace nvx {

std::uint64_t OverheadProfile::o_total() const {
  std::uint64_t sum = 0;
  for (const auto& u : units) sum += u.overhead;
  return sum;
}

namespace {

// Shared scanner for the two profile document forms. Runs carry `total`,
// overhead profiles carry `residual`; each form rejects the other's keyword.
struct ProfileDoc {
  std::vector<std::pair<std::string, std::uint64_t>> units;
  bool has_residual = false;
  std::uint64_t residual = 0;
  bool has_total = false;
  std::uint64_t total = 0;
};

ProfileDoc scan_profile_doc(const std::string& text, bool run_form) {
  auto lines = scan_lines(text);
  expect_version_header(lines, "profile");

  ProfileDoc doc;
  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& kw = line.tok(0);
    if (kw == "unit") {
      if (line.size() != 4 || line.tok(2) != "cost") {
        syntax_error(line, "expected 'unit <id> cost <uint>'");
      }
      if (!seen.insert(line.tok(1)).second) {
        fail_at(ErrorCode::DuplicateUnit, line, "duplicate unit '" + line.tok(1) + "'");
      }
      doc.units.emplace_back(line.tok(1), parse_cost(line, line.tok(3)));
    } else if (kw == "residual") {
      if (run_form) syntax_error(line, "'residual' is not part of a run document");
      if (line.size() != 2) syntax_error(line, "expected 'residual <uint>'");
      if (doc.has_residual) syntax_error(line, "duplicate 'residual'");
      doc.has_residual = true;
      doc.residual = parse_cost(line, line.tok(1));
    } else if (kw == "total") {
      if (!run_form) syntax_error(line, "'total' is not part of a profile document");
      if (line.size() != 2) syntax_error(line, "expected 'total <uint>'");
      if (doc.has_total) syntax_error(line, "duplicate 'total'");
      doc.has_total = true;
      doc.total = parse_cost(line, line.tok(1));
    } else {
      syntax_error(line, "unknown directive '" + kw + "'");
    }
  }
  return doc;
}

}  // namespace

OverheadProfile load_profile(const std::string& text) {
  ProfileDoc doc = scan_profile_doc(text, /*run_form=*/false);
  OverheadProfile profile;
  profile.residual = doc.residual;
  for (auto& [id, cost] : doc.units) {
    profile.units.push_back({{id, UnitKind::CodeUnit}, cost});
  }
  return profile;
}

std::string serialize_profile(const OverheadProfile& profile) {
  std::ostringstream out;
  out << "profile-version 1\n";
  for (const auto& u : profile.units) {
    out << "unit " << u.unit.id << " cost " << u.overhead << "\n";
  }
  out << "residual " << profile.residual << "\n";
  return out.str();
}

ProfileRun load_run(const std::string& text) {
  ProfileDoc doc = scan_profile_doc(text, /*run_form=*/true);
  if (!doc.has_total) {
    throw Error(ErrorCode::Syntax, "run document is missing 'total <uint>'");
  }
  std::uint64_t sum = 0;
  for (auto& [id, cost] : doc.units) sum += cost;
  if (doc.total < sum) {
    throw Error(ErrorCode::Syntax, "total " + std::to_string(doc.total) +
                                       " is below the unit sum " + std::to_string(sum));
  }
  ProfileRun run;
  run.entries = std::move(doc.units);
  run.total = doc.total;
  return run;
}

std::string serialize_run(const ProfileRun& run) {
  std::ostringstream out;
  out << "profile-version 1\n";
  for (const auto& [id, cost] : run.entries) {
    out << "unit " << id << " cost " << cost << "\n";
  }
  out << "total " << run.total << "\n";
  return out.str();
}

OverheadProfile derive_overhead(const ProfileRun& baseline, const ProfileRun& instrumented) {
  std::unordered_map<std::string, std::uint64_t> instr;
  for (const auto& [id, cost] : instrumented.entries) instr.emplace(id, cost);

  OverheadProfile profile;
  std::unordered_set<std::string> from_baseline;
  for (const auto& [id, base_cost] : baseline.entries) {
    auto it = instr.find(id);
    if (it == instr.end()) {
      throw Error(ErrorCode::MissingUnit,
                  "baseline unit '" + id + "' is absent from the instrumented run");
    }
    std::uint64_t delta = it->second > base_cost ? it->second - base_cost : 0;
    profile.units.push_back({{id, UnitKind::CodeUnit}, delta});
    from_baseline.insert(id);
  }
  // Units only the instrumented run knows count at full cost, after the
  // baseline units, in instrumented order.
  for (const auto& [id, cost] : instrumented.entries) {
    if (!from_baseline.count(id)) {
      profile.units.push_back({{id, UnitKind::CodeUnit}, cost});
    }
  }

  std::int64_t total_delta =
      static_cast<std::int64_t>(instrumented.total) - static_cast<std::int64_t>(baseline.total);
  std::int64_t attributed = static_cast<std::int64_t>(profile.o_total());
  profile.residual =
      total_delta > attributed ? static_cast<std::uint64_t>(total_delta - attributed) : 0;
  return profile;
}

SanitizerCatalog load_catalog(const std::string& text) {
  auto lines = scan_lines(text);
  expect_version_header(lines, "catalog");

  SanitizerCatalog catalog;
  std::unordered_set<std::string> ids;
  std::vector<std::pair<std::pair<std::string, std::string>, Line>> pending_conflicts;
  bool has_synergy = false;

  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& kw = line.tok(0);
    if (kw == "san") {
      if (line.size() != 4 || line.tok(2) != "cost") {
        syntax_error(line, "expected 'san <id> cost <uint>'");
      }
      if (!ids.insert(line.tok(1)).second) {
        fail_at(ErrorCode::DuplicateUnit, line, "duplicate sanitizer '" + line.tok(1) + "'");
      }
      catalog.sanitizers.push_back(
          {{line.tok(1), UnitKind::Sanitizer}, parse_cost(line, line.tok(3))});
    } else if (kw == "conflict") {
      if (line.size() != 3) syntax_error(line, "expected 'conflict <id> <id>'");
      if (line.tok(1) == line.tok(2)) {
        fail_at(ErrorCode::SelfConflict, line,
                "sanitizer '" + line.tok(1) + "' conflicts with itself");
      }
      auto pair = std::minmax(line.tok(1), line.tok(2));
      pending_conflicts.push_back({{pair.first, pair.second}, line});
    } else if (kw == "synergy") {
      if (line.size() != 2) syntax_error(line, "expected 'synergy <int>'");
      if (has_synergy) syntax_error(line, "duplicate 'synergy'");
      has_synergy = true;
      catalog.synergy = parse_i64(line, line.tok(1));
    } else {
      syntax_error(line, "unknown directive '" + kw + "'");
    }
  }

  // Conflicts may mention sanitizers listed later in the document, so
  // resolve them after the full pass.
  std::unordered_set<std::string> dedupe;
  for (auto& [pair, line] : pending_conflicts) {
    for (const std::string& id : {pair.first, pair.second}) {
      if (!ids.count(id)) {
        fail_at(ErrorCode::UnknownIdInConflict, line,
                "conflict references unknown sanitizer '" + id + "'");
      }
    }
    if (dedupe.insert(pair.first + "\x1f" + pair.second).second) {
      catalog.conflicts.push_back(pair);
    }
  }
  return catalog;
}

std::string serialize_catalog(const SanitizerCatalog& catalog) {
  std::ostringstream out;
  out << "catalog-version 1\n";
  for (const auto& s : catalog.sanitizers) {
    out << "san " << s.unit.id << " cost " << s.overhead << "\n";
  }
  for (const auto& [a, b] : catalog.conflicts) {
    out << "conflict " << a << " " << b << "\n";
  }
  out << "synergy " << catalog.synergy << "\n";
  return out.str();
}

}  // namespace nvx
