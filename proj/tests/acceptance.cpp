// Acceptance suite: eight gate checks for the scheduling artifact, each
// printed as one [PASS]/[FAIL] line. Exit code 0 only when all pass.
//
// Tolerances are pinned here, not tuned to runs: exact equality for bucket
// geometry, schedule validity, sort order, dominance comparisons, and CSV
// bytes; 1e-9 for per-quantum IPC and for the symmetric-input balance; a
// 2.6x doubling bound for the scaling check.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ilpsched/core.hpp"
#include "ilpsched/metrics.hpp"
#include "ilpsched/rng.hpp"
#include "ilpsched/scheduler.hpp"
#include "ilpsched/simulator.hpp"
#include "ilpsched/text.hpp"
#include "ilpsched/workload.hpp"

namespace {

using namespace ilpsched;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SystemConfig config_of(std::uint32_t k, std::uint32_t l, double w, double max_ilp,
                       std::uint64_t q, std::uint64_t t, std::uint32_t c) {
  SystemConfig config;
  config.processors_k = k;
  config.slots_per_processor_l = l;
  config.thread_count_n = k * l;
  config.issue_capacity_w = w;
  config.max_ilp = max_ilp;
  config.quantum_cycles_q = q;
  config.window_cycles_t = t;
  config.bucket_factor_c = c;
  return validate_config(config);
}

constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::kIlpSerpentine, PolicyKind::kRoundRobinById,
    PolicyKind::kRandomSeeded, PolicyKind::kGreedyLpt, PolicyKind::kSortedBlock};

// Shared instance family for criteria 2 and 3: N up to 256, K up to 32.
struct RandomInstance {
  SystemConfig config;
  std::vector<ThreadDescriptor> threads;
};

RandomInstance random_instance(int index) {
  SplitMix64 rng(mix_seed(0x5EED0002ull, static_cast<std::uint64_t>(index)));
  const auto k = static_cast<std::uint32_t>(1 + rng.next_below(32));
  const auto l = static_cast<std::uint32_t>(1 + rng.next_below(8));
  RandomInstance instance;
  instance.config = config_of(k, l, 4.0, 4.0, 1000, 250,
                              static_cast<std::uint32_t>(1 + rng.next_below(6)));
  instance.threads.reserve(k * l);
  for (std::uint32_t i = 0; i < k * l; ++i) {
    instance.threads.push_back({i, rng.next_real(0.0, 4.0)});
  }
  return instance;
}

std::vector<std::uint32_t> comparison_sort_oracle(
    std::vector<ThreadDescriptor> threads) {
  std::sort(threads.begin(), threads.end(),
            [](const ThreadDescriptor& a, const ThreadDescriptor& b) {
              if (a.ilp_counter != b.ilp_counter) {
                return a.ilp_counter > b.ilp_counter;
              }
              return a.thread_id > b.thread_id;
            });
  std::vector<std::uint32_t> ids;
  ids.reserve(threads.size());
  for (const ThreadDescriptor& t : threads) ids.push_back(t.thread_id);
  return ids;
}

// --- criterion 1: exact bucket geometry of the 128-thread worked example ---
Outcome check_bucket_example() {
  const SystemConfig config = config_of(32, 4, 4.0, 4.0, 100000, 25000, 4);
  SplitMix64 rng(1);
  std::vector<ThreadDescriptor> threads;
  threads.push_back({0, 0.005});
  for (std::uint32_t i = 1; i < 128; ++i) {
    threads.push_back({i, rng.next_real(0.0, 4.0)});
  }
  const BucketTable table = build_bucket_table(threads, config);

  if (table.num_buckets() != 512) {
    return {false, "expected 512 buckets, got " + std::to_string(table.num_buckets())};
  }
  if (table.step_size() != 0.0078125) {
    return {false, "expected step 0.0078125, got " + format_double(table.step_size())};
  }
  if (bucket_index(0.005, 4.0, 512) != 0) {
    return {false, "ILP 0.005 did not land in bucket 0"};
  }
  bool found = false;
  for (const auto& entry : table.bucket(0)) found |= (entry.thread_id == 0);
  if (!found) return {false, "thread with ILP 0.005 missing from bucket 0"};
  return {true, "512 buckets, step 0.0078125, ILP 0.005 in bucket 0"};
}

// --- criterion 2: every policy emits a bijective schedule, 1000 instances ---
Outcome check_schedule_validity() {
  std::size_t schedules = 0;
  for (int index = 0; index < 1000; ++index) {
    const RandomInstance instance = random_instance(index);
    for (const PolicyKind policy : kAllPolicies) {
      const Schedule schedule = schedule_baseline(
          policy, instance.threads, instance.config,
          mix_seed(static_cast<std::uint64_t>(index), schedules));
      if (!is_valid_schedule(schedule)) {
        return {false, std::string("policy ") + policy_name(policy) +
                           " produced an invalid schedule on instance " +
                           std::to_string(index)};
      }
      ++schedules;
    }
  }
  return {true, std::to_string(schedules) + " schedules, all bijective with L per processor"};
}

// --- criterion 3: bucket walk == comparison sort, incl. collision pile-ups ---
Outcome check_sort_equivalence() {
  for (int index = 0; index < 1000; ++index) {
    const RandomInstance instance = random_instance(index);
    const auto walk =
        descending_walk(build_bucket_table(instance.threads, instance.config));
    if (walk != comparison_sort_oracle(instance.threads)) {
      return {false, "order mismatch on instance " + std::to_string(index)};
    }
  }

  // Adversarial pile-up: 64 threads whose ILPs all fall inside one step.
  const SystemConfig config = config_of(8, 8, 4.0, 4.0, 1000, 250, 2);
  std::vector<ThreadDescriptor> crowded;
  for (std::uint32_t i = 0; i < 64; ++i) {
    crowded.push_back({i, 1.0 + 0.0001 * static_cast<double>(i % 16)});
  }
  const BucketTable table = build_bucket_table(crowded, config);
  std::size_t occupied = 0;
  for (std::size_t b = 0; b < table.num_buckets(); ++b) {
    occupied += table.bucket(b).empty() ? 0 : 1;
  }
  if (occupied != 1) {
    return {false, "adversarial input spread over " + std::to_string(occupied) +
                       " buckets instead of 1"};
  }
  if (descending_walk(table) != comparison_sort_oracle(crowded)) {
    return {false, "order mismatch on the single-bucket pile-up"};
  }

  std::vector<ThreadDescriptor> equal;
  for (std::uint32_t i = 0; i < 64; ++i) equal.push_back({i, 2.5});
  if (descending_walk(build_bucket_table(equal, config)) !=
      comparison_sort_oracle(equal)) {
    return {false, "order mismatch on all-equal input"};
  }
  return {true, "1002 instances match the comparison sort exactly"};
}

// --- criterion 4: optimal <= serpentine <= sorted-block; symmetric balance ---
Outcome check_balance_dominance() {
  // Dyadic counters (multiples of 2^-10): every load sum is exact, so the
  // dominance chain compares without tolerance.
  for (int index = 0; index < 220; ++index) {
    SplitMix64 rng(mix_seed(0x5EED0004ull, static_cast<std::uint64_t>(index)));
    const auto k = static_cast<std::uint32_t>(1 + rng.next_below(3));
    const auto l = static_cast<std::uint32_t>(1 + rng.next_below(12 / k));
    const SystemConfig config = config_of(k, l, 4.0, 4.0, 1000, 250, 4);
    std::vector<ThreadDescriptor> threads;
    for (std::uint32_t i = 0; i < k * l; ++i) {
      threads.push_back(
          {i, static_cast<double>(rng.next_below(4097)) / 1024.0});
    }
    const double optimal = brute_force_optimal(threads, config).imbalance;
    const double serpentine =
        imbalance(schedule_ilp_serpentine(threads, config), threads, config);
    const double blocks =
        imbalance(schedule_baseline(PolicyKind::kSortedBlock, threads, config, 0),
                  threads, config);
    if (!(optimal <= serpentine && serpentine <= blocks)) {
      return {false, "dominance broken on instance " + std::to_string(index) +
                         ": optimal " + format_double(optimal) + ", serpentine " +
                         format_double(serpentine) + ", blocks " +
                         format_double(blocks)};
    }
  }

  // Arithmetic progressions on two processors with an even slot count
  // balance exactly; tolerance pinned at 1e-9.
  for (int trial = 0; trial < 40; ++trial) {
    SplitMix64 rng(mix_seed(0x5EEDA4ull, static_cast<std::uint64_t>(trial)));
    const auto l = static_cast<std::uint32_t>(2 * (1 + rng.next_below(3)));
    const std::uint32_t n = 2 * l;
    const double base = static_cast<double>(rng.next_below(1025)) / 1024.0;
    const double step = static_cast<double>(rng.next_below(256)) / 1024.0;
    const SystemConfig config = config_of(2, l, 4.0, 4.0, 1000, 250, 4);
    std::vector<ThreadDescriptor> threads;
    for (std::uint32_t i = 0; i < n; ++i) {
      threads.push_back({i, base + step * static_cast<double>(i)});
    }
    const double spread =
        imbalance(schedule_ilp_serpentine(threads, config), threads, config);
    if (!(std::fabs(spread) <= 1e-9)) {
      return {false, "progression trial " + std::to_string(trial) +
                         " has spread " + format_double(spread)};
    }
  }
  return {true, "220 dominance instances and 40 progressions hold"};
}

// --- criterion 5: 5.0 vs 8.0 IPC on the bimodal pairing scenario ---
Outcome check_bimodal_throughput() {
  const SystemConfig config = config_of(2, 2, 4.0, 4.0, 1000, 250, 4);
  const auto programs = generate({BimodalSpec{3.5, 0.5, 0.5}, 4, 0}, config);
  const auto cycles = static_cast<double>(config.quantum_cycles_q);

  const auto rr =
      run_simulation(programs, config, PolicyKind::kRoundRobinById, 10, 7);
  const auto snake =
      run_simulation(programs, config, PolicyKind::kIlpSerpentine, 10, 7);

  double rr_total = 0.0;
  double snake_total = 0.0;
  for (std::size_t q = 0; q < 10; ++q) {
    const double rr_ipc = rr[q].total_retired / cycles;
    const double snake_ipc = snake[q].total_retired / cycles;
    rr_total += rr[q].total_retired;
    snake_total += snake[q].total_retired;
    if (std::fabs(rr_ipc - 5.0) > 1e-9) {
      return {false, "round-robin IPC " + format_double(rr_ipc) + " at quantum " +
                         std::to_string(q) + ", expected 5.0"};
    }
    const double expected = (q == 0) ? 5.0 : 8.0;  // quantum 0 bootstraps
    if (std::fabs(snake_ipc - expected) > 1e-9) {
      return {false, "serpentine IPC " + format_double(snake_ipc) +
                         " at quantum " + std::to_string(q) + ", expected " +
                         format_double(expected)};
    }
  }
  const double ratio = snake_total / rr_total;
  if (!(ratio >= 1.5)) {
    return {false, "retired ratio " + format_double(ratio) + " below 1.5"};
  }
  return {true, "5.0 vs 8.0 IPC sustained; retired ratio " + format_double(ratio)};
}

// --- criterion 6: water-filling never overshoots capacity or demand ---
Outcome check_contention_conservation() {
  std::size_t windows_checked = 0;
  for (int sim = 0; sim < 100; ++sim) {
    SplitMix64 rng(mix_seed(0x5EED0006ull, static_cast<std::uint64_t>(sim)));
    const auto k = static_cast<std::uint32_t>(1 + rng.next_below(4));
    const auto l = static_cast<std::uint32_t>(1 + rng.next_below(4));
    const double w = rng.next_below(2) == 0 ? 2.0 : 4.0;
    const SystemConfig config = config_of(k, l, w, w, 1000, 250, 4);

    WorkloadSpec spec;
    spec.n_threads = k * l;
    spec.seed = rng.next();
    switch (sim % 3) {
      case 0: spec.params = UniformSpec{0.0, w}; break;
      case 1: spec.params = BimodalSpec{w * 0.875, w * 0.125, 0.5}; break;
      default:
        spec.params = PhasedAlternatingSpec{
            w * 0.25, w * 0.75, static_cast<std::uint32_t>(1 + rng.next_below(3))};
    }
    const auto programs = generate(spec, config);
    const PolicyKind policy = kAllPolicies[sim % 5];

    std::string failure;
    run_simulation(programs, config, policy, 2, spec.seed,
                   [&](const WindowSample& sample) {
                     for (std::size_t p = 0; p < sample.per_processor_demand.size();
                          ++p) {
                       const double demand = sample.per_processor_demand[p];
                       const double achieved = sample.per_processor_achieved[p];
                       ++windows_checked;
                       if (achieved > w || achieved > demand) {
                         failure = "achieved " + format_double(achieved) +
                                   " above min(demand " + format_double(demand) +
                                   ", W " + format_double(w) + ")";
                       } else if (demand <= w && achieved != demand) {
                         failure = "uncontended demand " + format_double(demand) +
                                   " not met exactly (achieved " +
                                   format_double(achieved) + ")";
                       }
                     }
                   });
    if (!failure.empty()) {
      return {false, "simulation " + std::to_string(sim) + ": " + failure};
    }
  }
  return {true, std::to_string(windows_checked) +
                    " processor-windows conserve capacity exactly"};
}

// --- criterion 7: near-linear growth of the full scheduling pass ---
Outcome check_scaling() {
  using clock = std::chrono::steady_clock;
  constexpr std::uint32_t kMinExp = 10;
  constexpr std::uint32_t kMaxExp = 16;
  constexpr int kSweeps = 7;  // median of 7 per size

  struct SizeCase {
    SystemConfig config;
    std::vector<ThreadDescriptor> threads;
    std::uint32_t reps;
    std::vector<double> samples;
  };
  std::vector<SizeCase> cases;
  for (std::uint32_t exponent = kMinExp; exponent <= kMaxExp; ++exponent) {
    const std::uint32_t n = 1u << exponent;
    SizeCase c{config_of(32, n / 32, 4.0, 4.0, 1000, 250, 4), {}, 0, {}};
    SplitMix64 rng(mix_seed(0x5EED0007ull, exponent));
    c.threads.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      c.threads.push_back({i, rng.next_real(0.0, 4.0)});
    }
    c.reps = std::max(1u, (1u << 19) / n);
    cases.push_back(std::move(c));
  }

  // One sample = the mean over `reps` back-to-back calls. The produced
  // schedules stay alive until after the stop timestamp so the timed region
  // never returns memory to the OS and each call sees steady-state
  // allocation. Sweeps visit every size in turn so clock drift lands evenly
  // across sizes; the median then discards stray slow samples.
  std::uint64_t checksum = 0;
  std::vector<Schedule> hold;
  for (SizeCase& c : cases) {
    hold.reserve(c.reps);
    hold.push_back(schedule_ilp_serpentine(c.threads, c.config));  // warm
    hold.clear();
  }
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (SizeCase& c : cases) {
      hold.reserve(c.reps);
      const auto begin = clock::now();
      for (std::uint32_t r = 0; r < c.reps; ++r) {
        hold.push_back(schedule_ilp_serpentine(c.threads, c.config));
      }
      const auto end = clock::now();
      for (const Schedule& s : hold) checksum += s.thread_at(0, 0);
      hold.clear();
      c.samples.push_back(
          std::chrono::duration<double, std::nano>(end - begin).count() /
          static_cast<double>(c.reps));
    }
  }

  std::vector<double> medians;
  for (SizeCase& c : cases) {
    std::sort(c.samples.begin(), c.samples.end());
    medians.push_back(c.samples[kSweeps / 2]);
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    worst = std::max(worst, medians[i] / medians[i - 1]);
  }
  std::string detail = "median ns per call:";
  for (const double m : medians) detail += " " + std::to_string(std::llround(m));
  detail += "; worst doubling ratio " + format_double(worst) + " (checksum " +
            std::to_string(checksum % 97) + ")";
  return {worst <= 2.6, detail};
}

// --- criterion 8: byte-identical CSV from repeated CLI runs ---
Outcome check_csv_determinism(const std::string& cli_path) {
  if (cli_path.empty()) {
    return {false, "pass the simulator binary as argv[1]"};
  }
  const fs::path dir =
      fs::temp_directory_path() / ("ilpsched_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);

  auto run_once = [&](const fs::path& out) {
    const std::string command =
        cli_path +
        " simulate --processors 2 --slots 2 --capacity 4 --quanta 10"
        " --policy ilp-serpentine --workload bimodal:3.5,0.5,0.5 --seed 7"
        " --out " +
        out.string() + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };

  const fs::path first = dir / "first.csv";
  const fs::path second = dir / "second.csv";
  const int code_a = run_once(first);
  const int code_b = run_once(second);
  if (code_a != 0 || code_b != 0) {
    return {false, "simulate exited " + std::to_string(code_a) + " and " +
                       std::to_string(code_b)};
  }
  const std::string bytes = slurp(first);
  if (bytes.empty()) return {false, "no CSV bytes written"};
  if (bytes != slurp(second)) return {false, "reruns produced different bytes"};
  return {true, std::to_string(bytes.size()) + " CSV bytes identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli_path = argc > 1 ? argv[1] : "";
  bool all_pass = true;

  const auto report = [&](int number, const char* name, auto&& check) {
    using clock = std::chrono::steady_clock;
    const auto begin = clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        clock::now() - begin)
                        .count();
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << number
              << ": " << name << " - " << outcome.detail << " (" << ms << " ms)\n";
    all_pass = all_pass && outcome.pass;
  };

  report(1, "bucket table worked example", check_bucket_example);
  report(2, "policies produce bijective schedules", check_schedule_validity);
  report(3, "bucket walk equals comparison sort", check_sort_equivalence);
  report(4, "balance dominance and symmetric balance", check_balance_dominance);
  report(5, "bimodal contention throughput", check_bimodal_throughput);
  report(6, "contention-model conservation", check_contention_conservation);
  report(7, "near-linear scheduling cost", check_scaling);
  report(8, "byte-identical CSV across reruns",
         [&] { return check_csv_determinism(cli_path); });

  std::cout << (all_pass ? "acceptance: all 8 criteria passed"
                         : "acceptance: FAILURES present")
            << std::endl;
  return all_pass ? 0 : 1;
}
