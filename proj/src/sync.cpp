#include "nvx/sync.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "nvx/digest.hpp"
#include "nvx/rng.hpp"
#include "nvx/text.hpp"

namespace nvx {

SyncAction classify_event(const Syscall& syscall, bool in_window,
                          const SimulationConfig& config) {
  if (!in_window) return SyncAction::OutOfWindow;
  if (syscall.cls == SyscallClass::MemMgmt) return SyncAction::Ignore;
  if (config.mode == SyncMode::Strict) return SyncAction::LockstepSync;
  for (SyscallClass c : config.selected) {
    if (c == syscall.cls) return SyncAction::LockstepSync;
  }
  return SyncAction::BufferedSync;
}

namespace {

constexpr size_t kMaxProcesses = 100000;

// One synchronized syscall the leader has completed, in stream order.
struct SyncRecord {
  std::uint64_t number = 0;
  std::uint64_t arg_digest = 0;
  std::uint64_t result_digest = 0;
  std::uint64_t avail_vt = 0;
  bool lockstep = false;
};

struct Group {
  std::uint64_t egid = 0;
  std::vector<int> member;  // per variant: pid, or -1 until spawned
  std::vector<SyncRecord> records;
  std::vector<std::uint64_t> cursor;  // per variant: consumed record count
  std::uint64_t ring_free_vt = 0;     // instant the ring last went non-full
};

struct Proc {
  int pid = 0;
  int variant = 0;
  std::uint64_t egid = 0;
  size_t group = 0;
  const TraceSection* section = nullptr;
  size_t ip = 0;
  std::uint64_t vt = 0;    // virtual clock including waits
  std::uint64_t busy = 0;  // own costs + own handshakes; the finish metric
  bool in_window = false;
  bool finished = false;
  std::uint64_t finish_vt = 0;
  std::uint64_t fork_ordinal = 0;
  std::uint64_t tiebreak = 0;
};

enum class OpKind {
  Local,
  ForkChild,
  LockAppend,
  LockReplay,
  LeaderLockstep,
  LeaderBuffered,
  Consume,
};

struct StepPlan {
  OpKind kind = OpKind::Local;
  std::uint64_t ready = 0;
};

struct PendingAlert {
  std::uint64_t at = 0;
  std::uint64_t egid = 0;
  AlertInfo info;
};

class Engine {
 public:
  Engine(const std::vector<VariantTrace>& variants, const SimulationConfig& config,
         const std::vector<std::string>& extra_units)
      : variants_(variants), config_(config), n_(static_cast<int>(variants.size())) {
    if (n_ < 2) {
      throw Error(ErrorCode::Config, "simulation needs at least 2 variants");
    }
    if (config.mode == SyncMode::Selective && config.ring_capacity < 1) {
      throw Error(ErrorCode::Config, "ring capacity must be >= 1 in selective mode");
    }
    for (const auto& variant : variants_) {
      for (const auto& sec : variant.sections) {
        for (const auto& ev : sec.events) {
          if (std::holds_alternative<Vuln>(ev)) {
            throw Error(ErrorCode::Config,
                        "trace still contains vuln events; synthesize variants first");
          }
          if (const Check* c = std::get_if<Check>(&ev)) {
            vocab_.emplace(report_digest(c->unit), c->unit);
          }
        }
      }
      if (variant.sections.empty()) {
        throw Error(ErrorCode::Config, "variant trace has no sections");
      }
    }
    for (const auto& unit : extra_units) vocab_.emplace(report_digest(unit), unit);

    record_.n = n_;
    record_.busy.assign(static_cast<size_t>(n_), 0);
    record_.waiting.assign(static_cast<size_t>(n_), 0);
    record_.handshake_ticks.assign(static_cast<size_t>(n_), 0);
    record_.gap_samples.resize(static_cast<size_t>(n_));
    record_.consumed_order.resize(static_cast<size_t>(n_));
    log_cursor_.assign(static_cast<size_t>(n_), 0);
    log_last_end_.assign(static_cast<size_t>(n_), 0);

    size_t root = make_group(1);
    for (int v = 0; v < n_; ++v) spawn(v, 1, root, &variants_[static_cast<size_t>(v)].sections[0], 0);
  }

  SimulationReport run() {
    while (!alert_) {
      std::optional<PendingAlert> alert = best_pending_alert();
      std::optional<int> pid = best_step_pid();
      // A detectable divergence fires before any step at the same instant:
      // comparison precedes execution.
      if (alert && (!pid || alert->at <= plan_of_.at(static_cast<size_t>(*pid)).ready)) {
        alert_ = alert->info;
        log("alert kind=" +
            std::string(alert->info.kind == DivergenceKind::Sequence ? "sequence" : "argument") +
            " variant=" + std::to_string(alert->info.variant) +
            " ordinal=" + std::to_string(alert->info.ordinal) +
            (alert->info.unit.empty() ? "" : " unit=" + alert->info.unit));
        break;
      }
      if (!pid) {
        bool all_done = true;
        for (const auto& p : procs_) {
          if (!p.finished) all_done = false;
        }
        if (all_done) break;
        // Quiescence with a leader parked at a sync barrier no follower can
        // ever reach is a divergence (the monitor's timeout), not a replay
        // deadlock. Pure lock-order deadlocks stay STALL.
        if (auto parked = quiescence_alert()) {
          alert_ = parked->info;
          break;
        }
        throw Error(ErrorCode::Stall, stall_message());
      }
      execute(*pid);
    }

    SimulationReport report = compute_metrics(record_);
    if (alert_) {
      report.verdict = Verdict::Alert;
      report.alert = *alert_;
    }
    return report;
  }

  ExecutionRecord take_record() { return std::move(record_); }

 private:
  const Event* next_event(const Proc& p) const { return &p.section->events[p.ip]; }

  size_t make_group(std::uint64_t egid) {
    Group g;
    g.egid = egid;
    g.member.assign(static_cast<size_t>(n_), -1);
    g.cursor.assign(static_cast<size_t>(n_), 0);
    groups_.push_back(std::move(g));
    group_index_.emplace(egid, groups_.size() - 1);
    return groups_.size() - 1;
  }

  void spawn(int variant, std::uint64_t egid, size_t group, const TraceSection* section,
             std::uint64_t vt) {
    if (procs_.size() >= kMaxProcesses) {
      throw Error(ErrorCode::TooLarge, "process cap exceeded");
    }
    Proc p;
    p.pid = static_cast<int>(procs_.size());
    p.variant = variant;
    p.egid = egid;
    p.group = group;
    p.section = section;
    p.vt = vt;
    p.tiebreak =
        SplitMix64(config_.scheduler_seed ^
                   (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(p.pid) + 1)))
            .next();
    if (groups_[group].member[static_cast<size_t>(variant)] != -1) {
      throw Error(ErrorCode::Config, "two processes of one variant in one execution group");
    }
    groups_[group].member[static_cast<size_t>(variant)] = p.pid;
    if (p.section->events.empty()) {
      p.finished = true;
      p.finish_vt = vt;
    }
    procs_.push_back(p);
    plan_of_.resize(procs_.size());
  }

  bool is_sync(const Proc& p, const Syscall& s) const {
    SyncAction a = classify_event(s, p.in_window, config_);
    return a == SyncAction::LockstepSync || a == SyncAction::BufferedSync;
  }

  // Follower "arrival": sitting at a synchronized syscall at stream position
  // equal to the group's cursor for its variant.
  const Syscall* arrival_syscall(const Proc& p) const {
    if (p.finished) return nullptr;
    const Syscall* s = std::get_if<Syscall>(next_event(p));
    if (!s || !is_sync(p, *s)) return nullptr;
    return s;
  }

  std::optional<StepPlan> step_of(const Proc& p) {
    const Event* e = next_event(p);
    if (std::holds_alternative<Compute>(*e) || std::holds_alternative<Check>(*e) ||
        std::holds_alternative<MainEnter>(*e) || std::holds_alternative<ExitBegin>(*e)) {
      return StepPlan{OpKind::Local, p.vt};
    }
    if (std::holds_alternative<Fork>(*e)) return StepPlan{OpKind::ForkChild, p.vt};
    if (std::holds_alternative<Lock>(*e)) {
      if (p.variant == 0) return StepPlan{OpKind::LockAppend, p.vt};
      std::uint64_t cur = log_cursor_[static_cast<size_t>(p.variant)];
      if (cur < record_.order_log.size() && record_.order_log[cur] == p.egid) {
        std::uint64_t ready = std::max({p.vt, log_append_vt_[cur],
                                        log_last_end_[static_cast<size_t>(p.variant)]});
        return StepPlan{OpKind::LockReplay, ready};
      }
      return std::nullopt;  // defer until the head matches
    }
    if (const Syscall* s = std::get_if<Syscall>(e)) {
      SyncAction action = classify_event(*s, p.in_window, config_);
      if (action == SyncAction::OutOfWindow || action == SyncAction::Ignore) {
        return StepPlan{OpKind::Local, p.vt};
      }
      Group& g = groups_[p.group];
      if (p.variant != 0) {
        std::uint64_t k = g.cursor[static_cast<size_t>(p.variant)];
        if (k < g.records.size()) {
          return StepPlan{OpKind::Consume, std::max(p.vt, g.records[k].avail_vt)};
        }
        return std::nullopt;  // leader has not reached this ordinal yet
      }
      if (action == SyncAction::LockstepSync) {
        std::uint64_t k = g.records.size();
        std::uint64_t ready = p.vt;
        for (int v = 1; v < n_; ++v) {
          int m = g.member[static_cast<size_t>(v)];
          if (m < 0) return std::nullopt;
          const Proc& f = procs_[static_cast<size_t>(m)];
          if (f.finished || g.cursor[static_cast<size_t>(v)] != k) return std::nullopt;
          const Syscall* fs = arrival_syscall(f);
          if (!fs) return std::nullopt;
          if (fs->number != s->number || fs->arg_digest != s->arg_digest) {
            return std::nullopt;  // divergence; surfaced as a pending alert
          }
          ready = std::max(ready, f.vt);
        }
        return StepPlan{OpKind::LeaderLockstep, ready};
      }
      // Buffered: blocked only while the ring is full.
      std::uint64_t min_cursor = g.records.size();
      for (int v = 1; v < n_; ++v) {
        int m = g.member[static_cast<size_t>(v)];
        std::uint64_t c = m < 0 ? 0 : g.cursor[static_cast<size_t>(v)];
        min_cursor = std::min(min_cursor, c);
      }
      if (g.records.size() - min_cursor >= config_.ring_capacity) return std::nullopt;
      return StepPlan{OpKind::LeaderBuffered, std::max(p.vt, g.ring_free_vt)};
    }
    throw Error(ErrorCode::Config, "unexpected event in simulation");
  }

  std::optional<int> best_step_pid() {
    std::optional<int> best;
    std::uint64_t best_ready = 0;
    std::uint64_t best_tb = 0;
    for (auto& p : procs_) {
      if (p.finished) continue;
      auto plan = step_of(p);
      if (!plan) continue;
      plan_of_[static_cast<size_t>(p.pid)] = *plan;
      if (!best || plan->ready < best_ready ||
          (plan->ready == best_ready &&
           (p.tiebreak < best_tb || (p.tiebreak == best_tb && p.pid < *best)))) {
        best = p.pid;
        best_ready = plan->ready;
        best_tb = p.tiebreak;
      }
    }
    return best;
  }

  void resolve_alert(const SyncRecord* leader_rec, const Syscall* leader_event,
                     const Syscall* follower_event, int follower_variant, AlertInfo& info) {
    std::uint64_t lnum = 0, larg = 0;
    bool has_leader = false;
    if (leader_rec) {
      has_leader = true;
      lnum = leader_rec->number;
      larg = leader_rec->arg_digest;
    } else if (leader_event) {
      has_leader = true;
      lnum = leader_event->number;
      larg = leader_event->arg_digest;
    }
    if (has_leader && lnum == kReportWriteSyscall) {
      auto it = vocab_.find(larg);
      if (it != vocab_.end()) {
        info.unit = it->second;
        info.variant = 0;
        return;
      }
    }
    if (follower_event && follower_event->number == kReportWriteSyscall) {
      auto it = vocab_.find(follower_event->arg_digest);
      if (it != vocab_.end()) {
        info.unit = it->second;
        info.variant = follower_variant;
        return;
      }
    }
    info.unit.clear();
    info.variant = follower_variant;
  }

  void consider(std::optional<PendingAlert>& best, PendingAlert candidate) {
    if (!best || candidate.at < best->at ||
        (candidate.at == best->at &&
         (candidate.egid < best->egid ||
          (candidate.egid == best->egid && candidate.info.variant < best->info.variant)))) {
      best = std::move(candidate);
    }
  }

  std::optional<PendingAlert> best_pending_alert() {
    std::optional<PendingAlert> best;
    for (const auto& g : groups_) {
      int lp = g.member[0];
      const Proc* leader = lp < 0 ? nullptr : &procs_[static_cast<size_t>(lp)];
      const Syscall* leader_arrival = nullptr;
      bool leader_lockstep = false;
      if (leader && !leader->finished) {
        leader_arrival = arrival_syscall(*leader);
        leader_lockstep =
            leader_arrival &&
            classify_event(*leader_arrival, leader->in_window, config_) ==
                SyncAction::LockstepSync;
      }
      for (int v = 1; v < n_; ++v) {
        int m = g.member[static_cast<size_t>(v)];
        if (m < 0) continue;
        const Proc& f = procs_[static_cast<size_t>(m)];
        std::uint64_t k = g.cursor[static_cast<size_t>(v)];
        if (f.finished) {
          // Follower ended while the leader stream continues.
          if (k < g.records.size()) {
            PendingAlert a;
            a.at = std::max(f.finish_vt, g.records[k].avail_vt);
            a.egid = g.egid;
            a.info.kind = DivergenceKind::Sequence;
            a.info.ordinal = k;
            resolve_alert(&g.records[k], nullptr, nullptr, v, a.info);
            consider(best, std::move(a));
          } else if (leader_lockstep && k == g.records.size()) {
            PendingAlert a;
            a.at = std::max(leader->vt, f.finish_vt);
            a.egid = g.egid;
            a.info.kind = DivergenceKind::Sequence;
            a.info.ordinal = k;
            resolve_alert(nullptr, leader_arrival, nullptr, v, a.info);
            consider(best, std::move(a));
          }
          continue;
        }
        const Syscall* fs = arrival_syscall(f);
        if (!fs || k < g.records.size()) continue;  // consume path handles produced records
        if (leader && leader->finished) {
          // Leader ended while this follower still expects a syscall.
          PendingAlert a;
          a.at = std::max(leader->finish_vt, f.vt);
          a.egid = g.egid;
          a.info.kind = DivergenceKind::Sequence;
          a.info.ordinal = k;
          resolve_alert(nullptr, nullptr, fs, v, a.info);
          consider(best, std::move(a));
        } else if (leader_lockstep && k == g.records.size()) {
          if (fs->number != leader_arrival->number ||
              fs->arg_digest != leader_arrival->arg_digest) {
            PendingAlert a;
            a.at = std::max(leader->vt, f.vt);
            a.egid = g.egid;
            a.info.kind = fs->number != leader_arrival->number ? DivergenceKind::Sequence
                                                               : DivergenceKind::Argument;
            a.info.ordinal = k;
            resolve_alert(nullptr, leader_arrival, fs, v, a.info);
            consider(best, std::move(a));
          }
        }
      }
    }
    return best;
  }

  // Only valid at quiescence: every follower of a parked leader is either
  // absent from the group or stuck before its arrival, so the barrier can
  // never complete.
  std::optional<PendingAlert> quiescence_alert() {
    std::optional<PendingAlert> best;
    for (const auto& g : groups_) {
      int lp = g.member[0];
      if (lp < 0) continue;
      const Proc& leader = procs_[static_cast<size_t>(lp)];
      if (leader.finished) continue;
      const Syscall* slot = arrival_syscall(leader);
      if (!slot) continue;
      for (int v = 1; v < n_; ++v) {
        int m = g.member[static_cast<size_t>(v)];
        PendingAlert a;
        a.egid = g.egid;
        a.info.kind = DivergenceKind::Sequence;
        if (m < 0) {
          a.at = leader.vt;
          a.info.ordinal = 0;  // the missing process never reached its first slot
        } else {
          const Proc& f = procs_[static_cast<size_t>(m)];
          if (f.finished || arrival_syscall(f)) continue;  // handled elsewhere
          a.at = std::max(leader.vt, f.vt);
          a.info.ordinal = g.cursor[static_cast<size_t>(v)];
        }
        resolve_alert(nullptr, slot, nullptr, v, a.info);
        consider(best, std::move(a));
      }
    }
    return best;
  }

  // pid-based: spawning a child may reallocate procs_.
  void execute(int pid) {
    const StepPlan plan = plan_of_[static_cast<size_t>(pid)];
    Proc& p = procs_[static_cast<size_t>(pid)];
    const Event* e = next_event(p);
    switch (plan.kind) {
      case OpKind::Local: {
        std::uint64_t cost = 0;
        if (const Compute* c = std::get_if<Compute>(e)) cost = c->cost;
        if (const Check* c = std::get_if<Check>(e)) cost = c->cost;
        if (const Syscall* s = std::get_if<Syscall>(e)) cost = s->cost;
        if (std::holds_alternative<MainEnter>(*e)) p.in_window = true;
        if (std::holds_alternative<ExitBegin>(*e)) p.in_window = false;
        p.vt += cost;
        p.busy += cost;
        record_.busy[static_cast<size_t>(p.variant)] += cost;
        break;
      }
      case OpKind::ForkChild: {
        const Fork& f = std::get<Fork>(*e);
        p.fork_ordinal += 1;
        auto key = std::make_pair(p.egid, p.fork_ordinal);
        auto it = egid_of_fork_.find(key);
        std::uint64_t child_egid;
        if (it == egid_of_fork_.end()) {
          child_egid = next_egid_++;
          egid_of_fork_.emplace(key, child_egid);
        } else {
          child_egid = it->second;
        }
        size_t gi;
        auto git = group_index_.find(child_egid);
        if (git == group_index_.end()) gi = make_group(child_egid);
        else gi = git->second;
        const TraceSection* section =
            variants_[static_cast<size_t>(p.variant)].find(f.child);
        if (!section) {
          throw Error(ErrorCode::Config, "fork target '" + f.child + "' missing from variant " +
                                             std::to_string(p.variant));
        }
        log("fork variant=" + std::to_string(p.variant) + " egid=" + std::to_string(p.egid) +
            " child-egid=" + std::to_string(child_egid) + " at=" + std::to_string(p.vt));
        int variant = p.variant;
        std::uint64_t vt = p.vt;
        spawn(variant, child_egid, gi, section, vt);
        break;
      }
      case OpKind::LockAppend: {
        const Lock& l = std::get<Lock>(*e);
        p.vt += l.cost;
        p.busy += l.cost;
        record_.busy[static_cast<size_t>(p.variant)] += l.cost;
        record_.order_log.push_back(p.egid);
        log_append_vt_.push_back(p.vt);
        log("lock-append egid=" + std::to_string(p.egid) + " at=" + std::to_string(p.vt));
        break;
      }
      case OpKind::LockReplay: {
        const Lock& l = std::get<Lock>(*e);
        std::uint64_t start = plan.ready;
        record_.waiting[static_cast<size_t>(p.variant)] += start - p.vt;
        p.vt = start + l.cost;
        p.busy += l.cost;
        record_.busy[static_cast<size_t>(p.variant)] += l.cost;
        log_cursor_[static_cast<size_t>(p.variant)] += 1;
        log_last_end_[static_cast<size_t>(p.variant)] = p.vt;
        record_.consumed_order[static_cast<size_t>(p.variant)].push_back(p.egid);
        record_.locks_replayed += 1;
        log("lock-replay variant=" + std::to_string(p.variant) +
            " egid=" + std::to_string(p.egid) + " at=" + std::to_string(p.vt));
        break;
      }
      case OpKind::LeaderLockstep: {
        const Syscall& s = std::get<Syscall>(*e);
        Group& g = groups_[p.group];
        std::uint64_t arrive = plan.ready;  // all followers arrived and agreed
        record_.waiting[0] += arrive - p.vt;
        p.vt = arrive + s.cost + config_.handshake_cost;
        p.busy += s.cost + config_.handshake_cost;
        record_.busy[0] += s.cost + config_.handshake_cost;
        record_.handshake_ticks[0] += config_.handshake_cost;
        g.records.push_back({s.number, s.arg_digest, s.result_digest, p.vt, true});
        log("lockstep-exec egid=" + std::to_string(g.egid) +
            " ordinal=" + std::to_string(g.records.size() - 1) + " num=" +
            std::to_string(s.number) + " at=" + std::to_string(p.vt));
        break;
      }
      case OpKind::LeaderBuffered: {
        const Syscall& s = std::get<Syscall>(*e);
        Group& g = groups_[p.group];
        std::uint64_t start = plan.ready;
        record_.waiting[0] += start - p.vt;
        p.vt = start + s.cost + config_.handshake_cost;
        p.busy += s.cost + config_.handshake_cost;
        record_.busy[0] += s.cost + config_.handshake_cost;
        record_.handshake_ticks[0] += config_.handshake_cost;
        g.records.push_back({s.number, s.arg_digest, s.result_digest, p.vt, false});
        log("produce egid=" + std::to_string(g.egid) +
            " ordinal=" + std::to_string(g.records.size() - 1) + " num=" +
            std::to_string(s.number) + " at=" + std::to_string(p.vt));
        break;
      }
      case OpKind::Consume: {
        const Syscall& s = std::get<Syscall>(*e);
        Group& g = groups_[p.group];
        std::uint64_t k = g.cursor[static_cast<size_t>(p.variant)];
        const SyncRecord& rec = g.records[k];
        if (rec.number != s.number || rec.arg_digest != s.arg_digest) {
          AlertInfo info;
          info.kind = rec.number != s.number ? DivergenceKind::Sequence
                                             : DivergenceKind::Argument;
          info.ordinal = k;
          resolve_alert(&rec, nullptr, &s, p.variant, info);
          alert_ = info;
          log("alert kind=" +
              std::string(info.kind == DivergenceKind::Sequence ? "sequence" : "argument") +
              " variant=" + std::to_string(info.variant) +
              " ordinal=" + std::to_string(info.ordinal) +
              (info.unit.empty() ? "" : " unit=" + info.unit));
          return;  // abort all: the engine loop stops here
        }
        std::uint64_t at = plan.ready;  // max(own vt, record availability)
        bool was_full = false;
        if (config_.mode == SyncMode::Selective) {
          std::uint64_t min_cursor = g.records.size();
          for (int v = 1; v < n_; ++v) {
            int m = g.member[static_cast<size_t>(v)];
            std::uint64_t c = m < 0 ? 0 : g.cursor[static_cast<size_t>(v)];
            min_cursor = std::min(min_cursor, c);
          }
          was_full = g.records.size() - min_cursor >= config_.ring_capacity;
        }
        record_.waiting[static_cast<size_t>(p.variant)] += at - p.vt;
        p.vt = at + config_.handshake_cost;
        p.busy += config_.handshake_cost;
        record_.busy[static_cast<size_t>(p.variant)] += config_.handshake_cost;
        record_.handshake_ticks[static_cast<size_t>(p.variant)] += config_.handshake_cost;
        g.cursor[static_cast<size_t>(p.variant)] += 1;
        if (was_full) {
          std::uint64_t min_cursor = g.records.size();
          for (int v = 1; v < n_; ++v) {
            int m = g.member[static_cast<size_t>(v)];
            std::uint64_t c = m < 0 ? 0 : g.cursor[static_cast<size_t>(v)];
            min_cursor = std::min(min_cursor, c);
          }
          if (g.records.size() - min_cursor < config_.ring_capacity) g.ring_free_vt = at;
        }
        // Gap: records available by the consume instant minus records consumed.
        std::uint64_t avail = 0;
        for (const auto& r : g.records) {
          if (r.avail_vt <= at) ++avail;
        }
        std::uint64_t consumed = g.cursor[static_cast<size_t>(p.variant)];
        std::uint64_t gap = avail > consumed ? avail - consumed : 0;
        record_.gap_samples[static_cast<size_t>(p.variant)].push_back(gap);
        log("consume variant=" + std::to_string(p.variant) + " egid=" + std::to_string(g.egid) +
            " ordinal=" + std::to_string(k) + " at=" + std::to_string(at) +
            " gap=" + std::to_string(gap));
        break;
      }
    }
    Proc& done = procs_[static_cast<size_t>(pid)];
    done.ip += 1;
    if (done.ip == done.section->events.size()) {
      done.finished = true;
      done.finish_vt = done.vt;
      log("finish variant=" + std::to_string(done.variant) +
          " egid=" + std::to_string(done.egid) + " at=" + std::to_string(done.vt));
    }
  }

  std::string stall_message() const {
    std::string msg = "execution stalled; blocked:";
    for (const auto& p : procs_) {
      if (p.finished) continue;
      const Event* e = &p.section->events[p.ip];
      const char* reason = "sync-slot";
      if (std::holds_alternative<Lock>(*e)) reason = "lock-order";
      msg += " variant " + std::to_string(p.variant) + " egid " + std::to_string(p.egid) +
             " (" + reason + ")";
    }
    return msg;
  }

  void log(std::string line) { record_.protocol.push_back(std::move(line)); }

  const std::vector<VariantTrace>& variants_;
  SimulationConfig config_;
  int n_;
  std::unordered_map<std::uint64_t, std::string> vocab_;
  std::vector<Proc> procs_;
  std::vector<StepPlan> plan_of_;
  std::vector<Group> groups_;
  std::unordered_map<std::uint64_t, size_t> group_index_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> egid_of_fork_;
  std::uint64_t next_egid_ = 2;
  std::vector<std::uint64_t> log_append_vt_;
  std::vector<std::uint64_t> log_cursor_;    // per variant
  std::vector<std::uint64_t> log_last_end_;  // per variant
  ExecutionRecord record_;
  std::optional<AlertInfo> alert_;
};

}  // namespace

SimulationReport compute_metrics(const ExecutionRecord& record) {
  SimulationReport report;
  report.finish = record.busy;
  std::uint64_t max_finish = 0;
  for (std::uint64_t f : report.finish) max_finish = std::max(max_finish, f);
  report.o_sync = 0;
  for (std::uint64_t h : record.handshake_ticks) report.o_sync += h;
  for (std::uint64_t w : record.waiting) report.o_sync += w;
  report.o_bunshin = max_finish + report.o_sync;
  report.gaps.resize(record.busy.size());
  for (size_t v = 0; v < record.gap_samples.size(); ++v) {
    const auto& samples = record.gap_samples[v];
    if (samples.empty()) continue;
    std::uint64_t sum = 0;
    for (std::uint64_t s : samples) {
      report.gaps[v].max = std::max(report.gaps[v].max, s);
      sum += s;
    }
    report.gaps[v].mean =
        Rational(static_cast<std::int64_t>(sum), static_cast<std::int64_t>(samples.size()));
  }
  report.locks_replayed = record.locks_replayed;
  return report;
}

SimulationReport run_simulation(const std::vector<VariantTrace>& variants,
                                const SimulationConfig& config,
                                const std::vector<std::string>& extra_units,
                                ExecutionRecord* record_out) {
  Engine engine(variants, config, extra_units);
  SimulationReport report = engine.run();
  if (record_out) *record_out = engine.take_record();
  return report;
}

std::string serialize_report(const SimulationReport& report) {
  std::ostringstream out;
  out << "report-version 1\n";
  if (report.verdict == Verdict::Clean) {
    out << "verdict clean\n";
  } else {
    out << "verdict alert kind="
        << (report.alert.kind == DivergenceKind::Sequence ? "sequence" : "argument")
        << " variant=" << report.alert.variant << " ordinal=" << report.alert.ordinal;
    if (!report.alert.unit.empty()) out << " unit=" << report.alert.unit;
    out << "\n";
  }
  for (size_t v = 0; v < report.finish.size(); ++v) {
    out << "finish " << v << " " << report.finish[v] << "\n";
  }
  out << "o-bunshin " << report.o_bunshin << "\n";
  out << "o-sync " << report.o_sync << "\n";
  for (size_t v = 1; v < report.gaps.size(); ++v) {
    out << "gap " << v << " max=" << report.gaps[v].max << " mean="
        << report.gaps[v].mean.to_string() << "\n";
  }
  out << "locks-replayed " << report.locks_replayed << "\n";
  return out.str();
}

namespace {

std::pair<std::string, std::string> split_kv(const Line& line, const std::string& token) {
  size_t eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 > token.size()) {
    syntax_error(line, "expected key=value, got '" + token + "'");
  }
  return {token.substr(0, eq), token.substr(eq + 1)};
}

Rational parse_rational(const Line& line, const std::string& token) {
  size_t slash = token.find('/');
  if (slash == std::string::npos) {
    return Rational(parse_i64(line, token));
  }
  std::int64_t num = parse_i64(line, token.substr(0, slash));
  std::int64_t den = parse_i64(line, token.substr(slash + 1));
  if (den <= 0) syntax_error(line, "denominator must be positive in '" + token + "'");
  return Rational(num, den);
}

}  // namespace

SimulationReport parse_report(const std::string& text) {
  auto lines = scan_lines(text);
  expect_version_header(lines, "report");

  SimulationReport report;
  bool has_verdict = false, has_bunshin = false, has_sync = false, has_locks = false;
  std::map<std::uint64_t, std::uint64_t> finish;
  std::map<std::uint64_t, GapStat> gaps;

  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& kw = line.tok(0);
    if (kw == "verdict") {
      if (has_verdict) syntax_error(line, "duplicate 'verdict'");
      has_verdict = true;
      if (line.size() >= 2 && line.tok(1) == "clean") {
        if (line.size() != 2) syntax_error(line, "expected 'verdict clean'");
        report.verdict = Verdict::Clean;
      } else if (line.size() >= 2 && line.tok(1) == "alert") {
        report.verdict = Verdict::Alert;
        bool has_kind = false, has_variant = false, has_ordinal = false;
        for (size_t t = 2; t < line.size(); ++t) {
          auto [key, value] = split_kv(line, line.tok(t));
          if (key == "kind") {
            if (value == "sequence") report.alert.kind = DivergenceKind::Sequence;
            else if (value == "argument") report.alert.kind = DivergenceKind::Argument;
            else syntax_error(line, "unknown divergence kind '" + value + "'");
            has_kind = true;
          } else if (key == "variant") {
            report.alert.variant = static_cast<int>(parse_u64(line, value));
            has_variant = true;
          } else if (key == "ordinal") {
            report.alert.ordinal = parse_u64(line, value);
            has_ordinal = true;
          } else if (key == "unit") {
            report.alert.unit = value;
          } else {
            syntax_error(line, "unknown alert field '" + key + "'");
          }
        }
        if (!has_kind || !has_variant || !has_ordinal) {
          syntax_error(line, "alert verdict needs kind, variant and ordinal");
        }
      } else {
        syntax_error(line, "expected 'verdict clean' or 'verdict alert ...'");
      }
    } else if (kw == "finish") {
      if (line.size() != 3) syntax_error(line, "expected 'finish <variant> <ticks>'");
      std::uint64_t v = parse_u64(line, line.tok(1));
      if (!finish.emplace(v, parse_u64(line, line.tok(2))).second) {
        syntax_error(line, "duplicate finish for variant " + line.tok(1));
      }
    } else if (kw == "o-bunshin") {
      if (line.size() != 2) syntax_error(line, "expected 'o-bunshin <ticks>'");
      if (has_bunshin) syntax_error(line, "duplicate 'o-bunshin'");
      has_bunshin = true;
      report.o_bunshin = parse_u64(line, line.tok(1));
    } else if (kw == "o-sync") {
      if (line.size() != 2) syntax_error(line, "expected 'o-sync <ticks>'");
      if (has_sync) syntax_error(line, "duplicate 'o-sync'");
      has_sync = true;
      report.o_sync = parse_u64(line, line.tok(1));
    } else if (kw == "gap") {
      if (line.size() != 4) syntax_error(line, "expected 'gap <variant> max=<n> mean=<r>'");
      std::uint64_t v = parse_u64(line, line.tok(1));
      GapStat stat;
      auto [k1, v1] = split_kv(line, line.tok(2));
      auto [k2, v2] = split_kv(line, line.tok(3));
      if (k1 != "max" || k2 != "mean") syntax_error(line, "expected max=<n> mean=<r>");
      stat.max = parse_u64(line, v1);
      stat.mean = parse_rational(line, v2);
      if (!gaps.emplace(v, stat).second) {
        syntax_error(line, "duplicate gap for variant " + line.tok(1));
      }
    } else if (kw == "locks-replayed") {
      if (line.size() != 2) syntax_error(line, "expected 'locks-replayed <n>'");
      if (has_locks) syntax_error(line, "duplicate 'locks-replayed'");
      has_locks = true;
      report.locks_replayed = parse_u64(line, line.tok(1));
    } else {
      syntax_error(line, "unknown directive '" + kw + "'");
    }
  }

  if (!has_verdict || !has_bunshin || !has_sync || !has_locks) {
    throw Error(ErrorCode::Syntax, "report is missing a required field");
  }
  report.finish.resize(finish.size());
  for (size_t v = 0; v < report.finish.size(); ++v) {
    auto it = finish.find(v);
    if (it == finish.end()) {
      throw Error(ErrorCode::Syntax, "missing finish for variant " + std::to_string(v));
    }
    report.finish[v] = it->second;
  }
  report.gaps.resize(report.finish.size());
  for (const auto& [v, stat] : gaps) {
    if (v == 0 || v >= report.finish.size()) {
      throw Error(ErrorCode::Syntax, "gap for unknown variant " + std::to_string(v));
    }
    report.gaps[v] = stat;
  }
  return report;
}

}  // namespace nvx
