#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvx/error.hpp"
#include "nvx/partition.hpp"
#include "nvx/profile.hpp"
#include "nvx/sync.hpp"
#include "nvx/text.hpp"
#include "nvx/trace.hpp"

namespace fs = std::filesystem;
using namespace nvx;

namespace {

SyscallClass class_from_token(const std::string& token) {
  if (token == "iow") return SyscallClass::IoWrite;
  if (token == "ioo") return SyscallClass::IoOther;
  if (token == "virt") return SyscallClass::Virtual;
  if (token == "mem")
    throw Error(ErrorCode::Config, "mem-mgmt syscalls are ignored, not synchronized");
  throw Error(ErrorCode::Config, "unknown syscall class '" + token + "'");
}

std::vector<SyscallClass> parse_selected(const std::string& list) {
  std::vector<SyscallClass> classes;
  size_t pos = 0;
  while (pos <= list.size()) {
    size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    std::string token = list.substr(pos, comma - pos);
    if (token.empty()) throw Error(ErrorCode::Config, "empty class in '" + list + "'");
    classes.push_back(class_from_token(token));
    pos = comma + 1;
    if (comma == list.size()) break;
  }
  return classes;
}

std::uint64_t ratio_to_bp(double ratio, const std::string& flag) {
  if (ratio < 0.0 || ratio > 1.0) {
    throw Error(ErrorCode::BadParams, flag + " must lie in [0, 1]");
  }
  return static_cast<std::uint64_t>(ratio * 10000.0 + 0.5);
}

struct GenOpts {
  std::string out;
  std::string profile_out;
  std::uint64_t seed = 0;
  std::uint64_t units = 8;
  std::uint64_t events = 200;
  double syscall_ratio = 0.2;
  double lock_ratio = 0.1;
  bool heavy_tail = false;
  std::vector<std::string> vulns;
  std::uint64_t forks = 0;
};

int cmd_gen(const GenOpts& opt) {
  WorkloadParams params;
  params.unit_count = opt.units;
  params.event_count = opt.events;
  params.syscall_ratio_bp = ratio_to_bp(opt.syscall_ratio, "--syscall-ratio");
  params.lock_ratio_bp = ratio_to_bp(opt.lock_ratio, "--lock-ratio");
  params.dist = opt.heavy_tail ? WorkloadParams::CostDist::HeavyTail
                               : WorkloadParams::CostDist::Uniform;
  params.vuln_units = opt.vulns;
  params.fork_count = opt.forks;
  params.seed = opt.seed;

  BaseTrace trace = generate_trace(params);
  write_file(opt.out, serialize_trace(trace));
  size_t events = 0;
  for (const auto& sec : trace.sections) events += sec.events.size();
  std::cout << "trace " << opt.out << " sections=" << trace.sections.size()
            << " events=" << events << "\n";

  if (!opt.profile_out.empty()) {
    OverheadProfile profile = profile_from_trace(trace);
    write_file(opt.profile_out, serialize_profile(profile));
    std::cout << "profile " << opt.profile_out << " units=" << profile.units.size()
              << " o-total=" << profile.o_total() << "\n";
  }
  return 0;
}

struct PlanOpts {
  std::string input;
  std::string out;
  std::uint64_t n = 2;
  bool conflicts = false;
  bool oracle = false;
};

int cmd_plan(const PlanOpts& opt) {
  std::vector<WeightedUnit> units;
  ConflictPairs conflicts;
  std::string text = read_file(opt.input);
  if (opt.conflicts) {
    SanitizerCatalog catalog = load_catalog(text);
    units = catalog_units(catalog);
    conflicts = catalog.conflicts;
  } else {
    OverheadProfile profile = load_profile(text);
    units = profile_units(profile);
  }

  PartitionPlan plan = plan_partition(units, static_cast<int>(opt.n), conflicts);
  PlanScore score = evaluate_plan(plan, units);
  write_file(opt.out, serialize_plan(plan));
  std::cout << "plan " << opt.out << "\n";
  std::cout << "objective " << score.objective.to_string() << "\n";
  std::cout << "makespan " << score.makespan << "\n";
  std::cout << "target " << score.target.to_string() << "\n";

  if (opt.oracle) {
    PartitionPlan best = oracle_partition(units, static_cast<int>(opt.n), conflicts);
    PlanScore best_score = evaluate_plan(best, units);
    std::cout << "oracle-objective " << best_score.objective.to_string() << "\n";
    std::cout << "oracle-makespan " << best_score.makespan << "\n";
    Rational ratio = best_score.makespan == 0
                         ? Rational(1)
                         : Rational(static_cast<std::int64_t>(score.makespan),
                                    static_cast<std::int64_t>(best_score.makespan));
    std::cout << "makespan-ratio " << ratio.to_string() << "\n";
  }
  return 0;
}

struct SynthOpts {
  std::string trace_path;
  std::string plan_path;
  std::string out_dir = ".";
};

int cmd_synth(const SynthOpts& opt) {
  BaseTrace base = parse_trace(read_file(opt.trace_path));
  PartitionPlan plan = parse_plan(read_file(opt.plan_path));
  fs::create_directories(opt.out_dir);
  for (int v = 0; v < plan.n; ++v) {
    VariantTrace variant = synthesize_variant(base, plan, v);
    fs::path out = fs::path(opt.out_dir) / ("variant-" + std::to_string(v) + ".trace");
    write_file(out.string(), serialize_variant(variant));
    std::cout << "variant " << out.string() << "\n";
  }
  return 0;
}

struct SimOpts {
  std::string manifest;
  std::vector<std::string> variant_paths;
  std::string mode = "strict";
  std::uint64_t ring = 16;
  std::uint64_t handshake = 1;
  std::string selected = "iow";
  std::uint64_t seed = 0;
  std::string plan_path;
  std::string out;
};

// manifest-version 1 document: `variant <path>` per variant in index order,
// plus optional mode/ring/handshake/selected/seed/plan/out/n lines.
// Paths are resolved relative to the manifest's directory.
void apply_manifest(SimOpts& opt) {
  fs::path dir = fs::path(opt.manifest).parent_path();
  auto resolve = [&dir](const std::string& p) { return (dir / p).string(); };
  auto lines = scan_lines(read_file(opt.manifest));
  expect_version_header(lines, "manifest");
  std::optional<std::uint64_t> declared_n;
  std::map<std::string, bool> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& kw = line.tok(0);
    if (kw != "variant" && !seen.emplace(kw, true).second) {
      syntax_error(line, "duplicate '" + kw + "'");
    }
    if (kw == "variant") {
      if (line.size() != 2) syntax_error(line, "expected 'variant <path>'");
      opt.variant_paths.push_back(resolve(line.tok(1)));
    } else if (kw == "n") {
      if (line.size() != 2) syntax_error(line, "expected 'n <count>'");
      declared_n = parse_u64(line, line.tok(1));
    } else if (kw == "mode") {
      if (line.size() != 2 || (line.tok(1) != "strict" && line.tok(1) != "selective")) {
        syntax_error(line, "expected 'mode strict' or 'mode selective'");
      }
      opt.mode = line.tok(1);
    } else if (kw == "ring") {
      if (line.size() != 2) syntax_error(line, "expected 'ring <capacity>'");
      opt.ring = parse_u64(line, line.tok(1));
    } else if (kw == "handshake") {
      if (line.size() != 2) syntax_error(line, "expected 'handshake <cost>'");
      opt.handshake = parse_u64(line, line.tok(1));
    } else if (kw == "selected") {
      if (line.size() != 2) syntax_error(line, "expected 'selected <classes>'");
      opt.selected = line.tok(1);
    } else if (kw == "seed") {
      if (line.size() != 2) syntax_error(line, "expected 'seed <u64>'");
      opt.seed = parse_u64(line, line.tok(1));
    } else if (kw == "plan") {
      if (line.size() != 2) syntax_error(line, "expected 'plan <path>'");
      opt.plan_path = resolve(line.tok(1));
    } else if (kw == "out") {
      if (line.size() != 2) syntax_error(line, "expected 'out <path>'");
      if (opt.out.empty()) opt.out = resolve(line.tok(1));
    } else {
      syntax_error(line, "unknown directive '" + kw + "'");
    }
  }
  if (declared_n && *declared_n != opt.variant_paths.size()) {
    throw Error(ErrorCode::Config,
                "manifest declares n=" + std::to_string(*declared_n) + " but lists " +
                    std::to_string(opt.variant_paths.size()) + " variants");
  }
}

int cmd_simulate(SimOpts opt) {
  if (!opt.manifest.empty()) apply_manifest(opt);
  if (opt.variant_paths.size() < 2) {
    throw Error(ErrorCode::Config, "simulate needs at least 2 variant traces");
  }
  if (opt.out.empty()) {
    throw Error(ErrorCode::Config, "no report path: pass --out or a manifest 'out' line");
  }

  std::vector<VariantTrace> variants;
  for (size_t v = 0; v < opt.variant_paths.size(); ++v) {
    variants.push_back(
        parse_variant(read_file(opt.variant_paths[v]), static_cast<int>(v)));
  }

  SimulationConfig config;
  config.mode = opt.mode == "selective" ? SyncMode::Selective : SyncMode::Strict;
  config.ring_capacity = opt.ring;
  config.handshake_cost = opt.handshake;
  config.selected = parse_selected(opt.selected);
  config.scheduler_seed = opt.seed;

  std::vector<std::string> extra_units;
  if (!opt.plan_path.empty()) {
    PartitionPlan plan = parse_plan(read_file(opt.plan_path));
    for (const auto& [unit, variant] : plan.assignment) {
      (void)variant;
      extra_units.push_back(unit);
    }
  }

  SimulationReport report = run_simulation(variants, config, extra_units);
  write_file(opt.out, serialize_report(report));
  std::cout << "report " << opt.out << "\n";
  if (report.verdict == Verdict::Alert) {
    std::cout << "verdict alert\n";
    return 2;
  }
  std::cout << "verdict clean\n";
  return 0;
}

int cmd_report(const std::string& path) {
  SimulationReport report = parse_report(read_file(path));
  if (report.verdict == Verdict::Clean) {
    std::cout << "verdict: clean\n";
  } else {
    std::cout << "verdict: alert\n";
    std::cout << "  kind:    "
              << (report.alert.kind == DivergenceKind::Sequence ? "sequence" : "argument")
              << "\n";
    std::cout << "  variant: " << report.alert.variant << "\n";
    std::cout << "  ordinal: " << report.alert.ordinal << "\n";
    if (!report.alert.unit.empty()) std::cout << "  unit:    " << report.alert.unit << "\n";
  }
  std::cout << "variants: " << report.finish.size() << "\n";
  for (size_t v = 0; v < report.finish.size(); ++v) {
    std::cout << "finish " << v << ": " << report.finish[v] << " ticks\n";
  }
  std::cout << "o-bunshin: " << report.o_bunshin << " ticks\n";
  std::cout << "o-sync: " << report.o_sync << " ticks\n";
  for (size_t v = 1; v < report.gaps.size(); ++v) {
    std::cout << "gap " << v << ": max=" << report.gaps[v].max
              << " mean=" << report.gaps[v].mean.to_string() << "\n";
  }
  std::cout << "locks-replayed: " << report.locks_replayed << "\n";
  return 0;
}

int exit_code_for(const Error& err) {
  switch (err.code()) {
    case ErrorCode::Infeasible:
    case ErrorCode::TooLarge:
      return 4;
    case ErrorCode::Stall:
      return 5;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-version overhead planner and syscall-level execution simulator"};
  app.require_subcommand(1);

  GenOpts gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a seeded workload trace");
  gen_cmd->add_option("--out", gen.out, "trace output path")->required();
  gen_cmd->add_option("--seed", gen.seed, "workload seed");
  gen_cmd->add_option("--units", gen.units, "protection unit count");
  gen_cmd->add_option("--events", gen.events, "approximate body event count");
  gen_cmd->add_option("--syscall-ratio", gen.syscall_ratio, "fraction of body events that are syscalls");
  gen_cmd->add_option("--lock-ratio", gen.lock_ratio, "fraction of body events that are lock ops");
  gen_cmd->add_flag("--heavy-tail", gen.heavy_tail, "concentrate check cost in one unit");
  gen_cmd->add_option("--vuln", gen.vulns, "unit whose check trips (repeatable)");
  gen_cmd->add_option("--forks", gen.forks, "child process count");
  gen_cmd->add_option("--profile-out", gen.profile_out, "also emit the implied overhead profile");

  PlanOpts plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "partition units across variants");
  plan_cmd->add_option("input", plan.input, "overhead profile (or catalog with --conflicts)")
      ->required();
  plan_cmd->add_option("--n", plan.n, "variant count")->required();
  plan_cmd->add_option("--out", plan.out, "plan output path")->required();
  plan_cmd->add_flag("--conflicts", plan.conflicts, "input is a sanitizer catalog with conflict pairs");
  plan_cmd->add_flag("--oracle", plan.oracle, "also compute the exhaustive optimum (<= 15 units)");

  SynthOpts synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "synthesize variant traces from a plan");
  synth_cmd->add_option("trace", synth.trace_path, "base trace")->required();
  synth_cmd->add_option("plan", synth.plan_path, "partition plan")->required();
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory");

  SimOpts sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run the n-version execution engine");
  sim_cmd->add_option("--manifest", sim.manifest, "run manifest (variant/mode/... lines)");
  sim_cmd->add_option("--variant", sim.variant_paths, "variant trace path (repeat in index order)");
  sim_cmd->add_option("--mode", sim.mode, "strict or selective")
      ->check(CLI::IsMember({"strict", "selective"}));
  sim_cmd->add_option("--ring", sim.ring, "ring capacity (selective mode)");
  sim_cmd->add_option("--handshake", sim.handshake, "handshake cost in ticks");
  sim_cmd->add_option("--selected", sim.selected, "lockstep classes, e.g. iow or iow,ioo");
  sim_cmd->add_option("--seed", sim.seed, "scheduler tie-break seed");
  sim_cmd->add_option("--plan", sim.plan_path, "plan file for report-write attribution");
  sim_cmd->add_option("--out", sim.out, "report output path");

  std::string report_path;
  CLI::App* report_cmd = app.add_subcommand("report", "pretty-print a report file");
  report_cmd->add_option("report", report_path, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*plan_cmd) return cmd_plan(plan);
    if (*synth_cmd) return cmd_synth(synth);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*report_cmd) return cmd_report(report_path);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
