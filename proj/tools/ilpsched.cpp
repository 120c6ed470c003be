// ilpsched: run and compare ILP-aware co-scheduling policies on synthetic or
// trace-driven workloads. Subcommands: simulate, compare, gen-workload, oracle.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilpsched/core.hpp"
#include "ilpsched/metrics.hpp"
#include "ilpsched/scheduler.hpp"
#include "ilpsched/simulator.hpp"
#include "ilpsched/text.hpp"
#include "ilpsched/workload.hpp"

namespace {

using namespace ilpsched;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raw flag values; resolved into SystemConfig + workload after parsing.
struct CliConfig {
  std::uint32_t processors = 0;
  std::uint32_t slots = 0;
  double capacity = 0.0;
  double max_ilp = 0.0;
  bool max_ilp_set = false;
  std::uint64_t quantum = 100000;
  std::uint64_t window = 0;
  bool window_set = false;
  std::uint32_t bucket_factor = 4;
  std::uint32_t quanta = 10;
  std::uint64_t seed = 0;
  std::string counter_mode = "achieved";
  std::string workload;
  std::string trace;
  std::string out;
};

bool is_usage_error(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch:
    case Errc::window_too_large:
    case Errc::window_not_dividing_quantum:
    case Errc::non_positive_parameter:
    case Errc::capacity_below_max_ilp:
    case Errc::value_out_of_range:
    case Errc::unknown_policy:
    case Errc::instance_too_large:
    case Errc::spec_out_of_range:
      return true;
    default:
      return false;
  }
}

SystemConfig resolve_config(const CliConfig& cli) {
  SystemConfig config;
  config.processors_k = cli.processors;
  config.slots_per_processor_l = cli.slots;
  config.thread_count_n = cli.processors * cli.slots;
  config.issue_capacity_w = cli.capacity;
  config.max_ilp = cli.max_ilp_set ? cli.max_ilp : cli.capacity;
  config.quantum_cycles_q = cli.quantum;
  config.window_cycles_t = cli.window_set ? cli.window : cli.quantum / 4;
  config.bucket_factor_c = cli.bucket_factor;
  config.counter_mode = (cli.counter_mode == "demand") ? CounterMode::kDemand
                                                       : CounterMode::kAchieved;
  return validate_config(config);
}

// `kind:p1,p2,...` -> WorkloadSpec. Kinds: bimodal:high,low,fraction
// uniform:min,max  phased:level_a,level_b,phase_len_windows
WorkloadSpec parse_workload_spec(const std::string& text, std::uint32_t n_threads,
                                 std::uint64_t seed) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::size_t start = colon + 1;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto end = (comma == std::string::npos) ? text.size() : comma;
      const auto value = parse_double(std::string_view(text).substr(start, end - start));
      if (!value) {
        throw SchedError(Errc::spec_out_of_range,
                         "bad workload parameter in '" + text + "'");
      }
      params.push_back(*value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  WorkloadSpec spec;
  spec.n_threads = n_threads;
  spec.seed = seed;
  if (kind == "bimodal" && params.size() == 3) {
    spec.params = BimodalSpec{params[0], params[1], params[2]};
  } else if (kind == "uniform" && params.size() == 2) {
    spec.params = UniformSpec{params[0], params[1]};
  } else if (kind == "phased" && params.size() == 3) {
    if (params[2] < 1.0 || params[2] != static_cast<std::uint32_t>(params[2])) {
      throw SchedError(Errc::spec_out_of_range,
                       "phased phase length must be a positive window count");
    }
    spec.params = PhasedAlternatingSpec{params[0], params[1],
                                        static_cast<std::uint32_t>(params[2])};
  } else {
    throw SchedError(Errc::spec_out_of_range,
                     "unrecognized --workload '" + text +
                         "' (want bimodal:h,l,f | uniform:min,max | phased:a,b,len)");
  }
  return spec;
}

std::vector<PhaseProgram> resolve_programs(const CliConfig& cli,
                                           const SystemConfig& config) {
  if (cli.workload.empty() == cli.trace.empty()) {
    throw SchedError(Errc::spec_out_of_range,
                     "exactly one of --workload or --trace is required");
  }
  if (!cli.workload.empty()) {
    return generate(parse_workload_spec(cli.workload, config.thread_count_n, cli.seed),
                    config);
  }
  std::vector<PhaseProgram> programs =
      pad_to_config(load_trace(std::filesystem::path(cli.trace)), config);
  validate_programs(programs, config);
  return programs;
}

PolicyKind resolve_policy(const std::string& name) {
  const auto kind = parse_policy(name);
  if (!kind) {
    throw SchedError(Errc::unknown_policy,
                     "--policy '" + name +
                         "' (want ilp-serpentine | round-robin | random | "
                         "greedy-lpt | sorted-block)");
  }
  return *kind;
}

void print_summary_line(std::ostream& out, const ExperimentSummary& s) {
  out << "policy=" << policy_name(s.policy) << " quanta=" << s.quanta
      << " mean_imbalance=" << format_double(s.mean_imbalance)
      << " mean_utilization=" << format_double(s.mean_utilization)
      << " mean_oversubscription=" << format_double(s.mean_oversubscription)
      << " total_retired=" << format_double(s.total_retired) << '\n';
}

double ratio_of(double value, double base) {
  if (value == base) return 1.0;  // covers the 0/0 convention
  return value / base;
}

int cmd_simulate(const CliConfig& cli, const std::string& policy_name_arg) {
  const SystemConfig config = resolve_config(cli);
  const std::vector<PhaseProgram> programs = resolve_programs(cli, config);
  const PolicyKind policy = resolve_policy(policy_name_arg);

  const std::vector<QuantumRecord> records =
      run_simulation(programs, config, policy, cli.quanta, cli.seed);
  if (!cli.out.empty()) {
    std::ofstream out(cli.out, std::ios::binary);
    if (!out) {
      throw SchedError(Errc::io_error, "cannot open output file " + cli.out);
    }
    write_csv(records, out);
  }
  print_summary_line(std::cout, summarize(records, policy));
  return kExitOk;
}

int cmd_compare(const CliConfig& cli, const std::vector<std::string>& policy_names) {
  if (policy_names.size() < 2) {
    std::cerr << "compare requires at least two --policy values\n";
    return kExitUsage;
  }
  const SystemConfig config = resolve_config(cli);
  const std::vector<PhaseProgram> programs = resolve_programs(cli, config);

  std::vector<ExperimentSummary> summaries;
  for (const std::string& name : policy_names) {
    const PolicyKind policy = resolve_policy(name);
    const std::vector<QuantumRecord> records =
        run_simulation(programs, config, policy, cli.quanta, cli.seed);
    summaries.push_back(summarize(records, policy));
  }

  for (const ExperimentSummary& s : summaries) print_summary_line(std::cout, s);
  std::cout << "ratios vs " << policy_name(summaries[0].policy) << ":\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const ExperimentSummary& s = summaries[i];
    std::cout << "  " << policy_name(s.policy) << " retired_ratio="
              << format_double(ratio_of(s.total_retired, summaries[0].total_retired))
              << " utilization_ratio="
              << format_double(
                     ratio_of(s.mean_utilization, summaries[0].mean_utilization))
              << " imbalance_ratio="
              << format_double(
                     ratio_of(s.mean_imbalance, summaries[0].mean_imbalance))
              << '\n';
  }

  if (!cli.out.empty()) {
    std::ofstream out(cli.out, std::ios::binary);
    if (!out) {
      throw SchedError(Errc::io_error, "cannot open output file " + cli.out);
    }
    write_csv(std::span<const ExperimentSummary>(summaries), out);
  }
  return kExitOk;
}

int cmd_gen_workload(const CliConfig& cli) {
  if (cli.workload.empty()) {
    std::cerr << "gen-workload requires --workload\n";
    return kExitUsage;
  }
  if (cli.out.empty()) {
    std::cerr << "gen-workload requires --out\n";
    return kExitUsage;
  }
  const SystemConfig config = resolve_config(cli);
  const std::vector<PhaseProgram> programs =
      generate(parse_workload_spec(cli.workload, config.thread_count_n, cli.seed),
               config);
  save_trace(programs, std::filesystem::path(cli.out));
  std::cout << "wrote " << programs.size() << "-thread trace to " << cli.out << '\n';
  return kExitOk;
}

int cmd_oracle(const CliConfig& cli) {
  const SystemConfig config = resolve_config(cli);
  const std::vector<PhaseProgram> programs = resolve_programs(cli, config);

  // The oracle works on a static instance: each thread's ILP is its
  // program's initial demand.
  std::vector<ThreadDescriptor> threads;
  threads.reserve(programs.size());
  for (const PhaseProgram& p : programs) {
    threads.push_back({p.thread_id, p.phases.front().base_ilp});
  }

  const OptimalResult optimal = brute_force_optimal(threads, config);
  const double serpentine =
      imbalance(schedule_ilp_serpentine(threads, config), threads, config);
  std::cout << "optimal_imbalance=" << format_double(optimal.imbalance)
            << " serpentine_imbalance=" << format_double(serpentine)
            << " ratio=" << format_double(ratio_of(serpentine, optimal.imbalance))
            << '\n';
  return kExitOk;
}

void add_system_flags(CLI::App* cmd, CliConfig& cli) {
  cmd->add_option("--processors", cli.processors, "Processor count K")->required();
  cmd->add_option("--slots", cli.slots, "Hardware thread slots per processor L")
      ->required();
  cmd->add_option("--capacity", cli.capacity, "Issue capacity W in IPC per processor")
      ->required();
  auto* max_ilp = cmd->add_option("--max-ilp", cli.max_ilp,
                                  "Upper bound on a single thread's ILP "
                                  "(default: --capacity)");
  cmd->add_option("--quantum", cli.quantum, "Scheduling quantum length in cycles")
      ->capture_default_str();
  auto* window = cmd->add_option("--window", cli.window,
                                 "Counter measurement window T in cycles "
                                 "(default: quantum/4)");
  cmd->add_option("--bucket-factor", cli.bucket_factor,
                  "Bucket table size factor C (table has C*N entries)")
      ->capture_default_str();
  cmd->add_option("--quanta", cli.quanta, "Number of scheduling quanta to simulate")
      ->capture_default_str();
  cmd->add_option("--seed", cli.seed, "Deterministic seed")
      ->envname("ILPSCHED_SEED")
      ->capture_default_str();
  cmd->add_option("--counter-mode", cli.counter_mode,
                  "What the ILP counter measures: achieved or demand")
      ->check(CLI::IsMember({"achieved", "demand"}))
      ->capture_default_str();
  auto* workload = cmd->add_option(
      "--workload", cli.workload,
      "Synthetic workload spec: bimodal:h,l,f | uniform:min,max | phased:a,b,len");
  auto* trace = cmd->add_option("--trace", cli.trace, "Workload trace file to load");
  workload->excludes(trace);
  trace->excludes(workload);
  cmd->add_option("--out", cli.out, "Output file path");

  // Let handlers see whether optional values were supplied.
  cmd->parse_complete_callback([&cli, max_ilp, window] {
    cli.max_ilp_set = max_ilp->count() > 0;
    cli.window_set = window->count() > 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ILP-aware co-scheduling simulator and policy comparator"};
  app.require_subcommand(1);

  CliConfig cli;
  std::string simulate_policy = "ilp-serpentine";
  std::vector<std::string> compare_policies;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run one policy and emit per-quantum metrics");
  add_system_flags(simulate, cli);
  simulate->add_option("--policy", simulate_policy, "Scheduling policy")
      ->capture_default_str();

  CLI::App* compare = app.add_subcommand(
      "compare", "Run several policies on the identical workload and seed");
  add_system_flags(compare, cli);
  compare->add_option("--policy", compare_policies,
                      "Scheduling policy (repeat for each contender)")
      ->delimiter(',');

  CLI::App* gen = app.add_subcommand("gen-workload",
                                     "Write a synthetic workload as a trace file");
  add_system_flags(gen, cli);

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Compare serpentine imbalance against the exhaustive optimum");
  add_system_flags(oracle, cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(cli, simulate_policy);
    if (app.got_subcommand(compare)) return cmd_compare(cli, compare_policies);
    if (app.got_subcommand(gen)) return cmd_gen_workload(cli);
    if (app.got_subcommand(oracle)) return cmd_oracle(cli);
  } catch (const SchedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
