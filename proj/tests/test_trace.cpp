#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "nvx/digest.hpp"
#include "nvx/text.hpp"
#include "nvx/trace.hpp"

using namespace nvx;

namespace {

// CHECK events as (unit, cost) -> count, across all sections.
std::map<std::pair<std::string, std::uint64_t>, int> check_multiset(
    const std::vector<TraceSection>& sections) {
  std::map<std::pair<std::string, std::uint64_t>, int> out;
  for (const auto& sec : sections) {
    for (const auto& ev : sec.events) {
      if (const Check* c = std::get_if<Check>(&ev)) out[{c->unit, c->cost}]++;
    }
  }
  return out;
}

int count_events(const std::vector<TraceSection>& sections) {
  int n = 0;
  for (const auto& sec : sections) n += static_cast<int>(sec.events.size());
  return n;
}

const std::string kKitchenSink =
    "trace-version 1\n"
    "trace main\n"
    "main-enter\n"
    "compute 4\n"
    "check u0 2\n"
    "syscall 17 iow 00000000000000ab 00000000000000cd 3\n"
    "syscall 18 ioo 0000000000000001 0000000000000002 1\n"
    "syscall 9 mem 0000000000000003 0000000000000004 1\n"
    "syscall 228 virt 0000000000000005 0000000000000006 2\n"
    "lock lk0 mutex-lock 1\n"
    "lock lk0 mutex-unlock 1\n"
    "lock cv cond-wait 2\n"
    "lock cv cond-signal 1\n"
    "lock bar barrier 3\n"
    "fork t1\n"
    "vuln u0\n"
    "exit-begin\n"
    "trace t1\n"
    "main-enter\n"
    "compute 1\n"
    "exit-begin\n";

}  // namespace

TEST_CASE("every event kind parses and re-serializes canonically") {
  auto trace = parse_trace(kKitchenSink);
  REQUIRE(trace.sections.size() == 2);
  CHECK(trace.sections[0].id == "main");
  CHECK(trace.sections[0].events.size() == 15);
  CHECK(trace.sections[1].id == "t1");
  CHECK(serialize_trace(trace) == kKitchenSink);
  CHECK(serialize_trace(parse_trace(serialize_trace(trace))) == serialize_trace(trace));
}

TEST_CASE("events before any header form an implicit main section") {
  auto trace = parse_trace(
      "trace-version 1\n"
      "main-enter\n"
      "compute 2\n"
      "exit-begin\n");
  REQUIRE(trace.sections.size() == 1);
  CHECK(trace.sections[0].id == "main");
  // canonical form writes the header explicitly
  CHECK(serialize_trace(trace) ==
        "trace-version 1\n"
        "trace main\n"
        "main-enter\n"
        "compute 2\n"
        "exit-begin\n");
}

TEST_CASE("comments and spacing do not survive the round trip") {
  auto trace = parse_trace(
      "# recorded workload\ntrace-version 1\n\ntrace main\n  main-enter\n"
      "compute 7   # hot loop\nexit-begin\n");
  CHECK(serialize_trace(trace) ==
        "trace-version 1\ntrace main\nmain-enter\ncompute 7\nexit-begin\n");
}

TEST_CASE("trace parsing errors") {
  CHECK(error_code_of([] { parse_trace(""); }) == ErrorCode::Syntax);
  CHECK(error_code_of([] { parse_trace("trace-version 1\n"); }) == ErrorCode::Syntax);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\nwarp 9\nexit-begin\n");
        }) == ErrorCode::Syntax);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\ncompute -3\nexit-begin\n");
        }) == ErrorCode::NegativeCost);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\nsyscall 1 iow 12 34 1\nexit-begin\n");
        }) == ErrorCode::Syntax);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\ntrace main\nmain-enter\nexit-begin\n"
                      "trace main\nmain-enter\nexit-begin\n");
        }) == ErrorCode::Syntax);
}

TEST_CASE("fork graph validation") {
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\nfork ghost\nexit-begin\n");
        }) == ErrorCode::DanglingFork);
  // orphan: t1 exists but nothing forks it
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\ntrace main\nmain-enter\nexit-begin\n"
                      "trace t1\nmain-enter\nexit-begin\n");
        }) == ErrorCode::Syntax);
  // cycle: t1 forks t2, t2 forks t1
  CHECK(error_code_of([] {
          parse_trace(
              "trace-version 1\ntrace main\nmain-enter\nfork t1\nexit-begin\n"
              "trace t1\nmain-enter\nfork t2\nexit-begin\n"
              "trace t2\nmain-enter\nfork t1\nexit-begin\n");
        }) == ErrorCode::DanglingFork);
  // diamond is fine: two forks of the same child id make two processes
  CHECK_NOTHROW(parse_trace(
      "trace-version 1\ntrace main\nmain-enter\nfork t1\nfork t1\nexit-begin\n"
      "trace t1\nmain-enter\nexit-begin\n"));
}

TEST_CASE("window marker validation") {
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\nmain-enter\nexit-begin\n");
        }) == ErrorCode::WindowViolation);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nexit-begin\nmain-enter\n");
        }) == ErrorCode::WindowViolation);
  CHECK(error_code_of([] {
          parse_trace("trace-version 1\nmain-enter\nexit-begin\nexit-begin\n");
        }) == ErrorCode::WindowViolation);
  CHECK(error_code_of([] { parse_trace("trace-version 1\ncompute 1\n"); }) ==
        ErrorCode::WindowViolation);
  // exit-begin is optional: a crashed process records none
  CHECK_NOTHROW(parse_trace("trace-version 1\nmain-enter\ncompute 1\n"));
}

TEST_CASE("synthesis splits checks by ownership and conserves them") {
  auto base = parse_trace(
      "trace-version 1\n"
      "main-enter\n"
      "check a 3\n"
      "compute 2\n"
      "check b 4\n"
      "check a 5\n"
      "syscall 7 ioo 0000000000000011 0000000000000022 1\n"
      "check c 6\n"
      "exit-begin\n");
  PartitionPlan plan;
  plan.n = 2;
  plan.assignment = {{"a", 0}, {"b", 1}, {"c", 1}};
  plan.loads = {8, 10};

  auto v0 = synthesize_variant(base, plan, 0);
  auto v1 = synthesize_variant(base, plan, 1);

  CHECK(check_multiset(v0.sections) ==
        std::map<std::pair<std::string, std::uint64_t>, int>{{{"a", 3}, 1}, {{"a", 5}, 1}});
  CHECK(check_multiset(v1.sections) ==
        std::map<std::pair<std::string, std::uint64_t>, int>{{{"b", 4}, 1}, {{"c", 6}, 1}});

  // union of variant checks == base checks
  auto uni = check_multiset(v0.sections);
  for (const auto& [k, c] : check_multiset(v1.sections)) uni[k] += c;
  CHECK(uni == check_multiset(base.sections));

  // the 4 non-check events are shared verbatim
  CHECK(count_events(v0.sections) == 6);
  CHECK(count_events(v1.sections) == 6);
}

TEST_CASE("synthesis rejects units the plan does not cover") {
  auto base = parse_trace("trace-version 1\nmain-enter\ncheck mystery 1\nexit-begin\n");
  PartitionPlan plan;
  plan.n = 2;
  plan.assignment = {{"known", 0}};
  plan.loads = {1, 0};
  CHECK(error_code_of([&] { synthesize_variant(base, plan, 0); }) == ErrorCode::UncoveredUnit);
}

TEST_CASE("synthesis bounds the variant index") {
  auto base = parse_trace("trace-version 1\nmain-enter\nexit-begin\n");
  PartitionPlan plan;
  plan.n = 2;
  plan.loads = {0, 0};
  CHECK(error_code_of([&] { synthesize_variant(base, plan, 2); }) == ErrorCode::BadParams);
  CHECK(error_code_of([&] { synthesize_variant(base, plan, -1); }) == ErrorCode::BadParams);
}

TEST_CASE("an owned vuln becomes a report write and truncates the section") {
  auto base = parse_trace(
      "trace-version 1\n"
      "main-enter\n"
      "check u3 4\n"
      "vuln u3\n"
      "compute 9\n"
      "exit-begin\n");
  PartitionPlan plan;
  plan.n = 2;
  plan.assignment = {{"u3", 1}};
  plan.loads = {0, 4};

  auto v1 = synthesize_variant(base, plan, 1);
  REQUIRE(v1.sections.size() == 1);
  const auto& events = v1.sections[0].events;
  REQUIRE(events.size() == 3);  // main-enter, check, report write; tail gone
  const Syscall* report = std::get_if<Syscall>(&events[2]);
  REQUIRE(report != nullptr);
  CHECK(report->number == kReportWriteSyscall);
  CHECK(report->cls == SyscallClass::IoWrite);
  CHECK(report->arg_digest == report_digest("u3"));
  CHECK(report->result_digest == report_digest("u3"));
  CHECK(report->cost == kReportWriteCost);

  // the unprotected variant drops both the check and the trigger
  auto v0 = synthesize_variant(base, plan, 0);
  REQUIRE(v0.sections[0].events.size() == 3);  // main-enter, compute, exit-begin
  CHECK(std::holds_alternative<Compute>(v0.sections[0].events[1]));

  // synthesized output re-parses cleanly even without exit-begin
  CHECK_NOTHROW(parse_variant(serialize_variant(v1), 1));
}

TEST_CASE("truncation prunes sections only reachable past the vuln") {
  auto base = parse_trace(
      "trace-version 1\n"
      "trace main\nmain-enter\ncheck u 1\nvuln u\nfork t1\nexit-begin\n"
      "trace t1\nmain-enter\ncompute 1\nexit-begin\n");
  PartitionPlan plan;
  plan.n = 2;
  plan.assignment = {{"u", 0}};
  plan.loads = {1, 0};

  auto v0 = synthesize_variant(base, plan, 0);  // truncated before the fork
  CHECK(v0.sections.size() == 1);
  auto v1 = synthesize_variant(base, plan, 1);  // keeps the fork and the child
  CHECK(v1.sections.size() == 2);
}

TEST_CASE("profile extraction sums check costs in first-appearance order") {
  auto base = parse_trace(
      "trace-version 1\n"
      "trace main\nmain-enter\ncheck b 2\ncheck a 3\nfork t1\ncheck b 4\nvuln ghost\nexit-begin\n"
      "trace t1\nmain-enter\ncheck a 1\nexit-begin\n");
  auto profile = profile_from_trace(base);
  REQUIRE(profile.units.size() == 3);
  CHECK(profile.units[0].unit.id == "b");
  CHECK(profile.units[0].overhead == 6);
  CHECK(profile.units[1].unit.id == "a");
  CHECK(profile.units[1].overhead == 4);
  CHECK(profile.units[2].unit.id == "ghost");  // vuln-only unit, zero cost
  CHECK(profile.units[2].overhead == 0);
  CHECK(profile.residual == 0);
}

TEST_CASE("generated workloads are deterministic per seed") {
  WorkloadParams params;
  params.unit_count = 5;
  params.event_count = 120;
  params.syscall_ratio_bp = 2500;
  params.lock_ratio_bp = 1000;
  params.fork_count = 2;
  params.seed = 99;
  auto a = serialize_trace(generate_trace(params));
  auto b = serialize_trace(generate_trace(params));
  CHECK(a == b);

  params.seed = 100;
  CHECK(serialize_trace(generate_trace(params)) != a);
}

TEST_CASE("generated workloads parse cleanly and respect structure") {
  WorkloadParams params;
  params.unit_count = 7;
  params.event_count = 300;
  params.syscall_ratio_bp = 3000;
  params.lock_ratio_bp = 500;
  params.fork_count = 3;
  params.seed = 7;
  auto trace = generate_trace(params);
  auto reparsed = parse_trace(serialize_trace(trace));
  CHECK(reparsed.sections.size() == 4);  // main + 3 children
  CHECK(reparsed.sections[0].id == "main");

  // all referenced units stay within u0..u6
  for (const auto& sec : reparsed.sections) {
    for (const auto& ev : sec.events) {
      if (const Check* c = std::get_if<Check>(&ev)) {
        CHECK(c->unit.size() >= 2);
        CHECK(c->unit[0] == 'u');
        CHECK(std::stoi(c->unit.substr(1)) < 7);
      }
    }
  }
}

TEST_CASE("vuln units appear in trace order with their paired checks") {
  WorkloadParams params;
  params.unit_count = 6;
  params.event_count = 200;
  params.syscall_ratio_bp = 2000;
  params.lock_ratio_bp = 500;
  params.vuln_units = {"u2", "u4"};
  params.seed = 13;
  auto trace = generate_trace(params);

  std::vector<std::string> vulns;
  for (const auto& ev : trace.sections[0].events) {
    if (const Vuln* v = std::get_if<Vuln>(&ev)) vulns.push_back(v->unit);
  }
  CHECK(vulns == std::vector<std::string>{"u2", "u4"});

  // each vuln directly follows a check of the same unit
  const auto& events = trace.sections[0].events;
  for (size_t i = 0; i < events.size(); ++i) {
    if (const Vuln* v = std::get_if<Vuln>(&events[i])) {
      REQUIRE(i > 0);
      const Check* c = std::get_if<Check>(&events[i - 1]);
      REQUIRE(c != nullptr);
      CHECK(c->unit == v->unit);
    }
  }
}

TEST_CASE("heavy-tail generation concentrates check cost in one unit") {
  WorkloadParams params;
  params.unit_count = 50;
  params.event_count = 600;
  params.syscall_ratio_bp = 1500;
  params.lock_ratio_bp = 500;
  params.dist = WorkloadParams::CostDist::HeavyTail;
  params.seed = 21;
  auto profile = profile_from_trace(generate_trace(params));
  std::uint64_t total = profile.o_total();
  std::uint64_t top = 0;
  for (const auto& u : profile.units) top = std::max(top, u.overhead);
  REQUIRE(total > 0);
  CHECK(top * 100 >= total * 95);
}

TEST_CASE("generator parameter validation") {
  WorkloadParams params;
  params.unit_count = 0;
  CHECK(error_code_of([&] { generate_trace(params); }) == ErrorCode::BadParams);

  params.unit_count = 3;
  params.syscall_ratio_bp = 9000;
  params.lock_ratio_bp = 2000;  // sum exceeds the whole
  CHECK(error_code_of([&] { generate_trace(params); }) == ErrorCode::BadParams);

  params.syscall_ratio_bp = 1000;
  params.lock_ratio_bp = 100;
  params.vuln_units = {"u9"};  // outside u0..u2
  CHECK(error_code_of([&] { generate_trace(params); }) == ErrorCode::BadParams);
}
