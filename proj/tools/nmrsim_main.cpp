// nmrsim: scenario-driven batch runner for pulse-synchronized mutual
// remainder protocols and their LCM-robot applications. Loads a scenario,
// simulates it per seed (or exhaustively), runs the configured trace
// checkers, and writes traces plus a machine-readable verdict report.
//
// Exit codes: 0 all checkers pass, 1 checker failure, 2 malformed input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmr/checkers.hpp"
#include "nmr/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::size_t kMaxTraceFiles = 16;
constexpr std::size_t kMaxDetailedRuns = 200;

std::string default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("NMRSIM_OUT_DIR")) return env;
  return "nmrsim-out";
}

ordered_json outcome_to_json(const nmr::CheckOutcome& outcome) {
  ordered_json j;
  j["id"] = outcome.id;
  j["pass"] = outcome.verdict.pass;
  j["prefix"] = outcome.prefix;
  j["violations"] = outcome.verdict.violation_count;
  j["prefix_violations"] = outcome.verdict.prefix_violation_count;
  j["checks"] = outcome.verdict.checks;
  if (outcome.measured_stabilization)
    j["stabilization_time"] = *outcome.measured_stabilization;
  else
    j["stabilization_time"] = nullptr;
  ordered_json samples = ordered_json::array();
  for (const auto& violation : outcome.verdict.violations) {
    if (samples.size() >= 5) break;
    samples.push_back({{"time", violation.time},
                       {"subjects", violation.subjects},
                       {"rule", violation.rule}});
  }
  j["violation_samples"] = std::move(samples);
  return j;
}

ordered_json summary_to_json(const nmr::RunSummary& summary) {
  ordered_json j;
  j["label"] = summary.label;
  j["seed"] = summary.seed;
  j["pass"] = summary.pass;
  j["events"] = summary.event_count;
  j["prefix"] = summary.prefix;
  j["maxn_bound"] = summary.maxn_bound;
  if (summary.maxn_stabilization_pulse)
    j["maxn_stabilization_pulse"] = *summary.maxn_stabilization_pulse;
  if (summary.stabilization)
    j["stabilization_time"] = *summary.stabilization;
  ordered_json checkers = ordered_json::array();
  for (const auto& outcome : summary.outcomes)
    checkers.push_back(outcome_to_json(outcome));
  j["checkers"] = std::move(checkers);
  return j;
}

ordered_json report_to_json(const nmr::Scenario& scenario,
                            const nmr::SweepReport& report) {
  ordered_json j;
  j["scenario"] = scenario.name;
  j["protocol"] = std::string(to_string(scenario.protocol));
  j["runs"] = report.runs;
  j["passed"] = report.passed;
  j["pass_rate"] = report.pass_rate();
  if (report.stabilization_max)
    j["stabilization_max"] = *report.stabilization_max;
  if (report.stabilization_mean)
    j["stabilization_mean"] = *report.stabilization_mean;
  ordered_json detail = ordered_json::array();
  for (const auto& summary : report.summaries) {
    if (detail.size() >= kMaxDetailedRuns && summary.pass) continue;
    detail.push_back(summary_to_json(summary));
  }
  j["runs_detail"] = std::move(detail);
  return j;
}

void print_summary(const nmr::Scenario& scenario,
                   const nmr::SweepReport& report, bool verbose) {
  std::cout << "scenario " << scenario.name << " ["
            << to_string(scenario.protocol) << "]: " << report.passed << "/"
            << report.runs << " runs pass";
  if (report.stabilization_max)
    std::cout << ", stabilization max=" << *report.stabilization_max
              << " mean=" << *report.stabilization_mean;
  std::cout << "\n";
  for (const auto& summary : report.summaries) {
    if (!verbose && summary.pass) continue;
    std::cout << "  " << summary.label << ": "
              << (summary.pass ? "pass" : "FAIL");
    for (const auto& outcome : summary.outcomes) {
      std::cout << "  " << outcome.id << "="
                << (outcome.verdict.pass ? "ok" : "violated");
      if (!outcome.verdict.pass)
        std::cout << "(" << outcome.verdict.violation_count << ")";
    }
    if (summary.maxn_stabilization_pulse)
      std::cout << "  maxn-stable@pulse " << *summary.maxn_stabilization_pulse;
    if (summary.stabilization)
      std::cout << "  stable@t=" << *summary.stabilization;
    std::cout << "\n";
  }
}

void write_artifacts(const nmr::Scenario& scenario,
                     const nmr::SweepReport& report, const fs::path& out_dir,
                     bool write_all_traces) {
  const fs::path dir = out_dir / scenario.name;
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << report_to_json(scenario, report).dump(2) << "\n";
  }
  std::size_t written = 0;
  for (const auto& failure : report.failures) {
    std::ofstream out(dir / (failure.summary.label + ".trace.jsonl"));
    failure.trace.write_jsonl(out);
    ++written;
  }
  if (!write_all_traces) return;
  // Enumerated cases cannot be re-run by seed; their failures (with traces)
  // were already written above.
  if (scenario.init.mode == nmr::InitSpec::Mode::kEnumerateAll) return;
  // Small runs also get their passing traces persisted for inspection.
  for (const auto& summary : report.summaries) {
    if (written >= kMaxTraceFiles) break;
    if (!summary.pass) continue;
    // Re-run to recover the trace; runs are deterministic.
    const auto artifacts = nmr::run_scenario_once(scenario, summary.seed, false);
    std::ofstream out(dir / (summary.label + ".trace.jsonl"));
    artifacts.trace.write_jsonl(out);
    ++written;
  }
}

struct RunFlags {
  std::string scenario_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::string seed_range;
  long horizon = 0;
  std::vector<std::string> checker_ids;
  int jobs = 1;
  bool verbose = false;
};

std::vector<std::uint64_t> expand_seed_range(const std::string& range) {
  const auto colon = range.find(':');
  if (colon == std::string::npos)
    throw nmr::InputError("seed range must look like A:B");
  const std::uint64_t from = std::stoull(range.substr(0, colon));
  const std::uint64_t to = std::stoull(range.substr(colon + 1));
  if (to < from) throw nmr::InputError("seed range end before start");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
  return seeds;
}

int do_run(const RunFlags& flags, bool sweep_mode) {
  nmr::Scenario scenario = nmr::load_scenario_file(flags.scenario_path);
  if (flags.horizon > 0) scenario.horizon = flags.horizon;
  if (!flags.checker_ids.empty()) {
    scenario.checkers.clear();
    for (const auto& id : flags.checker_ids)
      scenario.checkers.push_back({.id = id});
  }
  std::vector<std::uint64_t> seeds = scenario.seeds;
  if (!flags.seeds.empty()) seeds = flags.seeds;
  if (!flags.seed_range.empty()) seeds = expand_seed_range(flags.seed_range);

  nmr::SweepReport report;
  if (scenario.init.mode == nmr::InitSpec::Mode::kEnumerateAll) {
    scenario.seeds = seeds;
    report = nmr::run_enumerate_all(scenario);
  } else {
    report = nmr::sweep_scenario(scenario, seeds, flags.jobs);
  }
  print_summary(scenario, report, flags.verbose);
  const bool write_all = !sweep_mode && report.runs <= 16;
  write_artifacts(scenario, report, default_out_dir(flags.out_dir), write_all);
  return report.all_pass() ? 0 : 1;
}

struct CheckFlags {
  std::string trace_path;
  std::string checker_id;
  double prefix = 0.0;
  int l = 0;
  long window = 0;
  int modulus = 0;
  int look_light = -1;
  int move_light = -1;
  bool emit_json = false;
};

int do_check(const CheckFlags& flags) {
  std::ifstream in(flags.trace_path);
  if (!in) throw nmr::InputError("cannot open trace: " + flags.trace_path);
  const nmr::Trace trace = nmr::Trace::from_jsonl(in);

  nmr::Verdict verdict;
  if (flags.checker_id == "l-exclusion") {
    if (flags.l < 1) throw nmr::InputError("l-exclusion needs --l");
    verdict = nmr::check_l_exclusion(trace, flags.l, flags.prefix);
  } else if (flags.checker_id == "fairness") {
    if (flags.window < 1) throw nmr::InputError("fairness needs --window");
    nmr::FairnessOptions options;
    options.prefix = flags.prefix;
    options.window_pulses = nmr::uniform_windows(trace, flags.window);
    verdict = nmr::check_global_fairness(trace, options);
  } else if (flags.checker_id == "rendezvous") {
    verdict = nmr::check_local_rendezvous(trace, flags.prefix);
  } else if (flags.checker_id == "move-atomic") {
    verdict = nmr::check_move_atomic(trace, flags.prefix);
  } else if (flags.checker_id == "phase-recurrence") {
    if (flags.window < 1)
      throw nmr::InputError("phase-recurrence needs --window");
    nmr::RecurrenceOptions options;
    options.prefix = flags.prefix;
    options.window_pulses = nmr::uniform_windows(trace, flags.window);
    verdict = nmr::check_phase_recurrence(trace, options);
  } else if (flags.checker_id == "fsync") {
    nmr::FsyncOptions options;
    options.prefix = flags.prefix;
    if (flags.look_light >= 0) options.look_light = flags.look_light;
    if (flags.move_light >= 0) options.move_light = flags.move_light;
    verdict = nmr::check_fsync(trace, options);
  } else if (flags.checker_id == "agreement") {
    if (flags.modulus < 1) throw nmr::InputError("agreement needs --modulus");
    verdict = nmr::check_agreement(
        trace, {.prefix = flags.prefix, .modulus = flags.modulus});
  } else {
    throw nmr::InputError("unknown checker: " + flags.checker_id);
  }

  if (flags.emit_json) {
    ordered_json j;
    j["checker"] = flags.checker_id;
    j["pass"] = verdict.pass;
    j["violations"] = verdict.violation_count;
    j["prefix_violations"] = verdict.prefix_violation_count;
    j["checks"] = verdict.checks;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << flags.checker_id << ": "
              << (verdict.pass ? "pass" : "FAIL") << " ("
              << verdict.violation_count << " violations past prefix, "
              << verdict.checks << " checks)\n";
  }
  return verdict.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse-driven mutual remainder / LCM robot simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", run_flags.scenario_path, "scenario file")
        ->required();
    cmd->add_option("--seed", run_flags.seeds, "seed override (repeatable)");
    cmd->add_option("--seeds", run_flags.seed_range, "seed range A:B");
    cmd->add_option("--horizon", run_flags.horizon, "horizon override");
    cmd->add_option("--out", run_flags.out_dir,
                    "output directory (default $NMRSIM_OUT_DIR)");
    cmd->add_option("--checker", run_flags.checker_ids,
                    "checker id override (repeatable)");
    cmd->add_option("--jobs", run_flags.jobs, "parallel runs");
    cmd->add_flag("-v,--verbose", run_flags.verbose, "per-run detail");
  };
  auto* run_cmd = app.add_subcommand("run", "run a scenario and check it");
  add_run_flags(run_cmd);
  auto* sweep_cmd =
      app.add_subcommand("sweep", "seed sweep with aggregate report");
  add_run_flags(sweep_cmd);

  CheckFlags check_flags;
  auto* check_cmd =
      app.add_subcommand("check", "run one checker over a trace file");
  check_cmd->add_option("--trace", check_flags.trace_path, "JSONL trace")
      ->required();
  check_cmd->add_option("--checker", check_flags.checker_id, "checker id")
      ->required();
  check_cmd->add_option("--prefix", check_flags.prefix,
                        "stabilization prefix time");
  check_cmd->add_option("--l", check_flags.l, "l for l-exclusion");
  check_cmd->add_option("--window", check_flags.window, "window in pulses");
  check_cmd->add_option("--modulus", check_flags.modulus,
                        "cyclic modulus for agreement");
  check_cmd->add_option("--look-light", check_flags.look_light,
                        "expected light at LOOK");
  check_cmd->add_option("--move-light", check_flags.move_light,
                        "expected light at MOVE");
  check_cmd->add_flag("--json", check_flags.emit_json, "machine output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_flags, false);
    if (sweep_cmd->parsed()) return do_run(run_flags, true);
    if (check_cmd->parsed()) return do_check(check_flags);
  } catch (const nmr::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
