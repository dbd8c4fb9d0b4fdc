#include <string>
#include <unordered_set>
#include <vector>

#include "nvx/digest.hpp"
#include "nvx/error.hpp"
#include "nvx/rng.hpp"
#include "nvx/trace.hpp"

namespace nvx {

namespace {

constexpr std::uint64_t kMaxForks = 1000;

Syscall random_syscall(SplitMix64& rng) {
  Syscall s;
  s.number = 2 + rng.below(326);  // 1 is reserved for report writes
  std::uint64_t roll = rng.below(10);
  if (roll < 2) s.cls = SyscallClass::IoWrite;
  else if (roll < 7) s.cls = SyscallClass::IoOther;
  else if (roll < 9) s.cls = SyscallClass::MemMgmt;
  else s.cls = SyscallClass::Virtual;
  s.arg_digest = fnv1a64("arg:" + std::to_string(rng.next()));
  s.result_digest = fnv1a64("res:" + std::to_string(rng.next()));
  s.cost = rng.range(1, 9);
  return s;
}

std::vector<Event> random_body(SplitMix64& rng, const WorkloadParams& p, std::uint64_t count) {
  static const LockOp kOps[] = {LockOp::MutexLock, LockOp::MutexUnlock, LockOp::CondWait,
                                LockOp::CondSignal, LockOp::Barrier};
  std::vector<Event> body;
  body.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint64_t roll = rng.below(10000);
    if (roll < p.syscall_ratio_bp) {
      body.push_back(random_syscall(rng));
    } else if (roll < p.syscall_ratio_bp + p.lock_ratio_bp) {
      body.push_back(Lock{"lk" + std::to_string(rng.below(3)), kOps[rng.below(5)],
                          rng.range(1, 3)});
    } else if (rng.chance(1, 2)) {
      body.push_back(Check{"u" + std::to_string(rng.below(p.unit_count)), rng.range(1, 9)});
    } else {
      body.push_back(Compute{rng.range(1, 9)});
    }
  }
  return body;
}

// Splices inserts into body at the given original positions, preserving both
// orders. Positions may repeat.
std::vector<Event> splice(const std::vector<Event>& body,
                          const std::vector<std::pair<std::uint64_t, std::vector<Event>>>& at) {
  std::vector<Event> out;
  size_t next = 0;
  for (std::uint64_t pos = 0; pos <= body.size(); ++pos) {
    while (next < at.size() && at[next].first == pos) {
      out.insert(out.end(), at[next].second.begin(), at[next].second.end());
      ++next;
    }
    if (pos < body.size()) out.push_back(body[pos]);
  }
  return out;
}

}  // namespace

BaseTrace generate_trace(const WorkloadParams& p) {
  if (p.unit_count < 1) {
    throw Error(ErrorCode::BadParams, "unit count must be >= 1");
  }
  if (p.syscall_ratio_bp > 10000 || p.lock_ratio_bp > 10000 ||
      p.syscall_ratio_bp + p.lock_ratio_bp > 10000) {
    throw Error(ErrorCode::BadParams, "event ratios must lie in [0,1] and sum to at most 1");
  }
  if (p.fork_count > kMaxForks) {
    throw Error(ErrorCode::BadParams, "fork count is capped at " + std::to_string(kMaxForks));
  }
  std::unordered_set<std::string> known_units;
  for (std::uint64_t i = 0; i < p.unit_count; ++i) known_units.insert("u" + std::to_string(i));
  for (const auto& unit : p.vuln_units) {
    if (!known_units.count(unit)) {
      throw Error(ErrorCode::BadParams,
                  "vuln unit '" + unit + "' is outside the generated unit set");
    }
  }

  SplitMix64 rng(p.seed);
  std::vector<Event> root_body = random_body(rng, p, p.event_count);

  // Children are spliced in at evenly spread points, then generated in id
  // order so the draw sequence is stable.
  std::vector<std::pair<std::uint64_t, std::vector<Event>>> fork_points;
  for (std::uint64_t j = 1; j <= p.fork_count; ++j) {
    std::uint64_t pos = j * root_body.size() / (p.fork_count + 1);
    fork_points.push_back({pos, {Fork{"t" + std::to_string(j)}}});
  }
  root_body = splice(root_body, fork_points);

  std::vector<TraceSection> children;
  std::uint64_t child_len = 3 + p.event_count / 10;
  for (std::uint64_t j = 1; j <= p.fork_count; ++j) {
    TraceSection child;
    child.id = "t" + std::to_string(j);
    child.events.push_back(MainEnter{});
    auto body = random_body(rng, p, child_len);
    child.events.insert(child.events.end(), body.begin(), body.end());
    child.events.push_back(ExitBegin{});
    children.push_back(std::move(child));
  }

  // Each trigger sits behind its own freshly inserted synchronized syscall,
  // so triggers diverge at strictly increasing sync ordinals, and behind a
  // check on the same unit, so the unit is present in the trace's profile.
  std::vector<std::pair<std::uint64_t, std::vector<Event>>> vuln_points;
  std::uint64_t vuln_count = p.vuln_units.size();
  for (std::uint64_t i = 0; i < vuln_count; ++i) {
    std::uint64_t pos = (i + 1) * root_body.size() / (vuln_count + 1);
    Syscall separator = random_syscall(rng);
    separator.cls = SyscallClass::IoOther;
    vuln_points.push_back(
        {pos,
         {separator, Check{p.vuln_units[i], rng.range(1, 9)}, Vuln{p.vuln_units[i]}}});
  }
  root_body = splice(root_body, vuln_points);

  BaseTrace trace;
  TraceSection root;
  root.id = "main";
  root.events.push_back(MainEnter{});
  root.events.insert(root.events.end(), root_body.begin(), root_body.end());
  root.events.push_back(ExitBegin{});
  trace.sections.push_back(std::move(root));
  for (auto& child : children) trace.sections.push_back(std::move(child));

  if (p.dist == WorkloadParams::CostDist::HeavyTail) {
    // Concentrate at least 95% of the total check cost in u0: ensure a u0
    // check exists, then raise the first one until hot >= 19 * rest + 1.
    Check* first_hot = nullptr;
    std::uint64_t hot = 0;
    std::uint64_t rest = 0;
    for (auto& sec : trace.sections) {
      for (auto& ev : sec.events) {
        if (Check* c = std::get_if<Check>(&ev)) {
          if (c->unit == "u0") {
            if (!first_hot) first_hot = c;
            hot += c->cost;
          } else {
            rest += c->cost;
          }
        }
      }
    }
    if (!first_hot) {
      auto& root_events = trace.sections[0].events;
      root_events.insert(root_events.end() - 1, Check{"u0", 1});
      first_hot = std::get_if<Check>(&root_events[root_events.size() - 2]);
      hot = 1;
    }
    if (hot < 19 * rest + 1) first_hot->cost += 19 * rest + 1 - hot;
  }

  return trace;
}

}  // namespace nvx
