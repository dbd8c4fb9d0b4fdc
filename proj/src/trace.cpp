#include "nvx/trace.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "nvx/digest.hpp"
#include "nvx/text.hpp"

namespace nvx {

const TraceSection* BaseTrace::find(const std::string& id) const {
  for (const auto& s : sections) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const TraceSection* VariantTrace::find(const std::string& id) const {
  for (const auto& s : sections) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const char* syscall_class_token(SyscallClass cls) {
  switch (cls) {
    case SyscallClass::IoWrite: return "iow";
    case SyscallClass::IoOther: return "ioo";
    case SyscallClass::MemMgmt: return "mem";
    case SyscallClass::Virtual: return "virt";
  }
  return "?";
}

const char* lock_op_token(LockOp op) {
  switch (op) {
    case LockOp::MutexLock: return "mutex-lock";
    case LockOp::MutexUnlock: return "mutex-unlock";
    case LockOp::CondWait: return "cond-wait";
    case LockOp::CondSignal: return "cond-signal";
    case LockOp::Barrier: return "barrier";
  }
  return "?";
}

namespace {

SyscallClass parse_class_token(const Line& line, const std::string& token) {
  if (token == "iow") return SyscallClass::IoWrite;
  if (token == "ioo") return SyscallClass::IoOther;
  if (token == "mem") return SyscallClass::MemMgmt;
  if (token == "virt") return SyscallClass::Virtual;
  syntax_error(line, "unknown syscall class '" + token + "'");
}

LockOp parse_lock_op(const Line& line, const std::string& token) {
  if (token == "mutex-lock") return LockOp::MutexLock;
  if (token == "mutex-unlock") return LockOp::MutexUnlock;
  if (token == "cond-wait") return LockOp::CondWait;
  if (token == "cond-signal") return LockOp::CondSignal;
  if (token == "barrier") return LockOp::Barrier;
  syntax_error(line, "unknown lock op '" + token + "'");
}

Event parse_event(const Line& line) {
  const std::string& kw = line.tok(0);
  if (kw == "compute") {
    if (line.size() != 2) syntax_error(line, "expected 'compute <cost>'");
    return Compute{parse_cost(line, line.tok(1))};
  }
  if (kw == "check") {
    if (line.size() != 3) syntax_error(line, "expected 'check <unit-id> <cost>'");
    return Check{line.tok(1), parse_cost(line, line.tok(2))};
  }
  if (kw == "syscall") {
    if (line.size() != 6) {
      syntax_error(line, "expected 'syscall <num> <class> <arg-digest> <result-digest> <cost>'");
    }
    Syscall s;
    s.number = parse_u64(line, line.tok(1));
    s.cls = parse_class_token(line, line.tok(2));
    s.arg_digest = parse_hex16(line, line.tok(3));
    s.result_digest = parse_hex16(line, line.tok(4));
    s.cost = parse_cost(line, line.tok(5));
    return s;
  }
  if (kw == "lock") {
    if (line.size() != 4) syntax_error(line, "expected 'lock <lock-id> <op> <cost>'");
    return Lock{line.tok(1), parse_lock_op(line, line.tok(2)), parse_cost(line, line.tok(3))};
  }
  if (kw == "fork") {
    if (line.size() != 2) syntax_error(line, "expected 'fork <trace-id>'");
    return Fork{line.tok(1)};
  }
  if (kw == "main-enter") {
    if (line.size() != 1) syntax_error(line, "'main-enter' takes no arguments");
    return MainEnter{};
  }
  if (kw == "exit-begin") {
    if (line.size() != 1) syntax_error(line, "'exit-begin' takes no arguments");
    return ExitBegin{};
  }
  if (kw == "vuln") {
    if (line.size() != 2) syntax_error(line, "expected 'vuln <unit-id>'");
    return Vuln{line.tok(1)};
  }
  syntax_error(line, "unknown event '" + kw + "'");
}

void check_window_markers(const TraceSection& sec) {
  bool seen_main = false;
  bool seen_exit = false;
  for (const auto& ev : sec.events) {
    if (std::holds_alternative<MainEnter>(ev)) {
      if (seen_main) {
        throw Error(ErrorCode::WindowViolation,
                    "section '" + sec.id + "' has more than one main-enter");
      }
      if (seen_exit) {
        throw Error(ErrorCode::WindowViolation,
                    "section '" + sec.id + "' has exit-begin before main-enter");
      }
      seen_main = true;
    } else if (std::holds_alternative<ExitBegin>(ev)) {
      if (seen_exit) {
        throw Error(ErrorCode::WindowViolation,
                    "section '" + sec.id + "' has more than one exit-begin");
      }
      seen_exit = true;
    }
  }
  if (!seen_main && seen_exit) {
    throw Error(ErrorCode::WindowViolation,
                "section '" + sec.id + "' has exit-begin before main-enter");
  }
  if (!seen_main) {
    throw Error(ErrorCode::WindowViolation, "section '" + sec.id + "' has no main-enter");
  }
}

void check_fork_graph(const std::vector<TraceSection>& sections) {
  std::unordered_map<std::string, size_t> index_of;
  for (size_t i = 0; i < sections.size(); ++i) index_of.emplace(sections[i].id, i);

  std::vector<std::vector<size_t>> targets(sections.size());
  std::vector<int> in_degree(sections.size(), 0);
  for (size_t i = 0; i < sections.size(); ++i) {
    for (const auto& ev : sections[i].events) {
      if (const Fork* f = std::get_if<Fork>(&ev)) {
        auto it = index_of.find(f->child);
        if (it == index_of.end()) {
          throw Error(ErrorCode::DanglingFork,
                      "fork target '" + f->child + "' has no trace section");
        }
        targets[i].push_back(it->second);
        ++in_degree[it->second];
      }
    }
  }

  // Every non-root section must be forked from somewhere; with the graph
  // acyclic this makes every section reachable from the root.
  for (size_t i = 1; i < sections.size(); ++i) {
    if (in_degree[i] == 0) {
      throw Error(ErrorCode::Syntax, "section '" + sections[i].id + "' is never forked");
    }
  }

  // DFS cycle check over the whole graph.
  std::vector<int> state(sections.size(), 0);  // 0 new, 1 on stack, 2 done
  auto dfs = [&](auto&& self, size_t i) -> void {
    state[i] = 1;
    for (size_t t : targets[i]) {
      if (state[t] == 1) {
        throw Error(ErrorCode::DanglingFork, "fork cycle through section '" + sections[t].id + "'");
      }
      if (state[t] == 0) self(self, t);
    }
    state[i] = 2;
  };
  for (size_t i = 0; i < sections.size(); ++i) {
    if (state[i] == 0) dfs(dfs, i);
  }
}

std::vector<TraceSection> parse_sections(const std::string& text) {
  auto lines = scan_lines(text);
  expect_version_header(lines, "trace");

  std::vector<TraceSection> sections;
  std::unordered_set<std::string> ids;
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (line.tok(0) == "trace") {
      if (line.size() != 2) syntax_error(line, "expected 'trace <id>'");
      if (!ids.insert(line.tok(1)).second) {
        syntax_error(line, "duplicate trace section '" + line.tok(1) + "'");
      }
      sections.push_back({line.tok(1), {}});
    } else {
      if (sections.empty()) {
        // Events before any header form an implicit root.
        ids.insert("main");
        sections.push_back({"main", {}});
      }
      sections.back().events.push_back(parse_event(line));
    }
  }
  if (sections.empty()) {
    throw Error(ErrorCode::Syntax, "trace document has no events");
  }

  for (const auto& sec : sections) check_window_markers(sec);
  check_fork_graph(sections);
  return sections;
}

std::string serialize_sections(const std::vector<TraceSection>& sections) {
  std::ostringstream out;
  out << "trace-version 1\n";
  for (const auto& sec : sections) {
    out << "trace " << sec.id << "\n";
    for (const auto& ev : sec.events) {
      if (const Compute* c = std::get_if<Compute>(&ev)) {
        out << "compute " << c->cost << "\n";
      } else if (const Check* c = std::get_if<Check>(&ev)) {
        out << "check " << c->unit << " " << c->cost << "\n";
      } else if (const Syscall* s = std::get_if<Syscall>(&ev)) {
        out << "syscall " << s->number << " " << syscall_class_token(s->cls) << " "
            << to_hex16(s->arg_digest) << " " << to_hex16(s->result_digest) << " " << s->cost
            << "\n";
      } else if (const Lock* l = std::get_if<Lock>(&ev)) {
        out << "lock " << l->lock_id << " " << lock_op_token(l->op) << " " << l->cost << "\n";
      } else if (const Fork* f = std::get_if<Fork>(&ev)) {
        out << "fork " << f->child << "\n";
      } else if (std::holds_alternative<MainEnter>(ev)) {
        out << "main-enter\n";
      } else if (std::holds_alternative<ExitBegin>(ev)) {
        out << "exit-begin\n";
      } else if (const Vuln* v = std::get_if<Vuln>(&ev)) {
        out << "vuln " << v->unit << "\n";
      }
    }
  }
  return out.str();
}

void prune_unreachable(std::vector<TraceSection>& sections) {
  if (sections.empty()) return;
  std::unordered_map<std::string, size_t> index_of;
  for (size_t i = 0; i < sections.size(); ++i) index_of.emplace(sections[i].id, i);

  std::vector<bool> reachable(sections.size(), false);
  std::vector<size_t> work{0};
  reachable[0] = true;
  while (!work.empty()) {
    size_t i = work.back();
    work.pop_back();
    for (const auto& ev : sections[i].events) {
      if (const Fork* f = std::get_if<Fork>(&ev)) {
        size_t t = index_of.at(f->child);
        if (!reachable[t]) {
          reachable[t] = true;
          work.push_back(t);
        }
      }
    }
  }

  std::vector<TraceSection> kept;
  for (size_t i = 0; i < sections.size(); ++i) {
    if (reachable[i]) kept.push_back(std::move(sections[i]));
  }
  sections = std::move(kept);
}

}  // namespace

BaseTrace parse_trace(const std::string& text) {
  BaseTrace trace;
  trace.sections = parse_sections(text);
  return trace;
}

std::string serialize_trace(const BaseTrace& trace) { return serialize_sections(trace.sections); }

VariantTrace parse_variant(const std::string& text, int variant_index) {
  VariantTrace variant;
  variant.variant_index = variant_index;
  variant.sections = parse_sections(text);
  return variant;
}

std::string serialize_variant(const VariantTrace& variant) {
  return serialize_sections(variant.sections);
}

VariantTrace synthesize_variant(const BaseTrace& base, const PartitionPlan& plan,
                                int variant_index) {
  if (variant_index < 0 || variant_index >= plan.n) {
    throw Error(ErrorCode::BadParams, "variant index " + std::to_string(variant_index) +
                                          " outside [0, " + std::to_string(plan.n) + ")");
  }
  auto owner = plan.assignment_map();
  for (const auto& sec : base.sections) {
    for (const auto& ev : sec.events) {
      const std::string* unit = nullptr;
      if (const Check* c = std::get_if<Check>(&ev)) unit = &c->unit;
      if (const Vuln* v = std::get_if<Vuln>(&ev)) unit = &v->unit;
      if (unit && !owner.count(*unit)) {
        throw Error(ErrorCode::UncoveredUnit,
                    "unit '" + *unit + "' in the trace is not covered by the plan");
      }
    }
  }

  VariantTrace out;
  out.variant_index = variant_index;
  for (const auto& sec : base.sections) {
    TraceSection t;
    t.id = sec.id;
    for (const auto& ev : sec.events) {
      if (const Check* c = std::get_if<Check>(&ev)) {
        if (owner.at(c->unit) == variant_index) t.events.push_back(ev);
      } else if (const Vuln* v = std::get_if<Vuln>(&ev)) {
        if (owner.at(v->unit) == variant_index) {
          // The sanitizer fires: it writes its report and the process stops.
          std::uint64_t d = report_digest(v->unit);
          t.events.push_back(
              Syscall{kReportWriteSyscall, SyscallClass::IoWrite, d, d, kReportWriteCost});
          break;
        }
        // Unprotected here: the trigger passes silently.
      } else {
        t.events.push_back(ev);
      }
    }
    out.sections.push_back(std::move(t));
  }
  prune_unreachable(out.sections);
  return out;
}

OverheadProfile profile_from_trace(const BaseTrace& trace) {
  OverheadProfile profile;
  std::unordered_map<std::string, size_t> slot_of;
  auto slot = [&](const std::string& unit) {
    auto it = slot_of.find(unit);
    if (it != slot_of.end()) return it->second;
    slot_of.emplace(unit, profile.units.size());
    profile.units.push_back({{unit, UnitKind::CodeUnit}, 0});
    return profile.units.size() - 1;
  };
  for (const auto& sec : trace.sections) {
    for (const auto& ev : sec.events) {
      if (const Check* c = std::get_if<Check>(&ev)) {
        profile.units[slot(c->unit)].overhead += c->cost;
      } else if (const Vuln* v = std::get_if<Vuln>(&ev)) {
        slot(v->unit);
      }
    }
  }
  return profile;
}

}  // namespace nvx
