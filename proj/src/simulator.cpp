#include "ilpsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ilpsched/rng.hpp"

namespace ilpsched {

namespace {

// Left-to-right sum of min(d, level) over the demands. Both the bisection
// below and run_quantum must total allocations in exactly this order so the
// capacity bound holds for the sums that actually get reported.
double filled_sum(std::span<const double> demands, double level) {
  double sum = 0.0;
  for (const double d : demands) sum += std::min(d, level);
  return sum;
}

}  // namespace

std::vector<double> water_fill(std::span<const double> demands, double capacity) {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw SchedError(Errc::value_out_of_range, "capacity must be positive");
  }
  double total = 0.0;
  double max_demand = 0.0;
  for (const double d : demands) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw SchedError(Errc::negative_demand,
                       "demand " + std::to_string(d) + " is not a nonnegative real");
    }
    total += d;
    max_demand = std::max(max_demand, d);
  }
  if (total <= capacity) {
    return std::vector<double>(demands.begin(), demands.end());
  }

  // Resolve the water level by bisection rather than a sorted closed form:
  // the invariant filled_sum(lo) <= capacity survives every rounding step,
  // so the returned allocations can never sum above capacity even in
  // floating point. The level lands within one ulp of the exact lambda.
  double lo = 0.0;
  double hi = max_demand;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (filled_sum(demands, mid) <= capacity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // The rounded sum can plateau, letting lo creep a few ulps past the true
  // level (e.g. [3,1,2] at capacity 4 wants exactly 1.5). Re-derive the level
  // from the saturated set; adopt it only when it reproduces the same
  // partition and still respects the capacity bound.
  double saturated = 0.0;
  std::size_t active = 0;
  for (const double d : demands) {
    if (d <= lo) {
      saturated += d;
    } else {
      ++active;
    }
  }
  if (active > 0) {
    const double level = (capacity - saturated) / static_cast<double>(active);
    bool consistent = level >= 0.0;
    for (const double d : demands) {
      consistent &= (d <= lo) ? (d <= level) : (d >= level);
    }
    if (consistent && filled_sum(demands, level) <= capacity) lo = level;
  }

  std::vector<double> allocation(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) {
    allocation[i] = std::min(demands[i], lo);
  }
  return allocation;
}

namespace {

void require_simulation_inputs(const Schedule& schedule,
                               const std::vector<ThreadRuntimeState>& states,
                               std::span<const PhaseProgram> programs,
                               const SystemConfig& config) {
  if (schedule.processors() != config.processors_k ||
      schedule.slots_per_processor() != config.slots_per_processor_l) {
    throw SchedError(Errc::state_mismatch, "schedule dimensions do not match config");
  }
  if (states.size() != config.thread_count_n) {
    throw SchedError(Errc::state_mismatch,
                     "expected " + std::to_string(config.thread_count_n) +
                         " thread states, got " + std::to_string(states.size()));
  }
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (states[t].thread_id != t) {
      throw SchedError(Errc::state_mismatch,
                       "state " + std::to_string(t) + " holds thread " +
                           std::to_string(states[t].thread_id));
    }
  }
  validate_programs(programs, config);
  if (!is_valid_schedule(schedule)) {
    throw SchedError(Errc::invariant_violation, "schedule is not a bijection");
  }
}

}  // namespace

QuantumRecord run_quantum(const Schedule& schedule,
                          std::vector<ThreadRuntimeState>& states,
                          std::span<const PhaseProgram> programs,
                          const SystemConfig& config,
                          std::uint32_t quantum_index,
                          const WindowObserver& observer) {
  require_simulation_inputs(schedule, states, programs, config);

  const std::uint32_t k = config.processors_k;
  const std::uint32_t l = config.slots_per_processor_l;
  const auto windows = static_cast<std::uint32_t>(config.windows_per_quantum());
  const auto window_cycles = static_cast<double>(config.window_cycles_t);

  QuantumRecord record;
  record.quantum_index = quantum_index;
  record.per_processor_demand.assign(k, 0.0);
  record.per_processor_achieved.assign(k, 0.0);

  std::vector<double> demands(l);
  std::vector<double> final_window_demand(config.thread_count_n, 0.0);
  std::vector<double> final_window_achieved(config.thread_count_n, 0.0);

  for (std::uint32_t w = 0; w < windows; ++w) {
    const bool final_window = (w + 1 == windows);
    WindowSample sample;
    if (observer) {
      sample.quantum_index = quantum_index;
      sample.window_index = w;
      sample.per_processor_demand.resize(k);
      sample.per_processor_achieved.resize(k);
    }
    for (std::uint32_t p = 0; p < k; ++p) {
      for (std::uint32_t s = 0; s < l; ++s) {
        const std::uint32_t tid = schedule.thread_at(p, s);
        demands[s] = programs[tid].ilp_at(states[tid].phase_cursor_cycles);
      }
      const std::vector<double> achieved =
          water_fill(demands, config.issue_capacity_w);

      double demand_sum = 0.0;
      double achieved_sum = 0.0;
      for (std::uint32_t s = 0; s < l; ++s) {
        const std::uint32_t tid = schedule.thread_at(p, s);
        states[tid].retired_instructions += achieved[s] * window_cycles;
        record.total_retired += achieved[s] * window_cycles;
        demand_sum += demands[s];
        achieved_sum += achieved[s];
        if (final_window) {
          final_window_demand[tid] = demands[s];
          final_window_achieved[tid] = achieved[s];
        }
      }
      record.per_processor_demand[p] += demand_sum;
      record.per_processor_achieved[p] += achieved_sum;
      if (observer) {
        sample.per_processor_demand[p] = demand_sum;
        sample.per_processor_achieved[p] = achieved_sum;
      }
    }
    for (ThreadRuntimeState& state : states) {
      state.phase_cursor_cycles = (state.phase_cursor_cycles + config.window_cycles_t) %
                                  programs[state.thread_id].total_cycles();
    }
    if (observer) observer(sample);
  }

  for (ThreadRuntimeState& state : states) {
    state.ilp_counter = (config.counter_mode == CounterMode::kAchieved)
                            ? final_window_achieved[state.thread_id]
                            : final_window_demand[state.thread_id];
  }

  double total_achieved_ipc = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::uint32_t p = 0; p < k; ++p) {
    record.per_processor_demand[p] /= windows;
    // Clamp away the accumulation ulp: a processor cannot beat its capacity.
    record.per_processor_achieved[p] =
        std::min(record.per_processor_achieved[p] / windows, config.issue_capacity_w);
    total_achieved_ipc += record.per_processor_achieved[p];
    lo = std::min(lo, record.per_processor_demand[p]);
    hi = std::max(hi, record.per_processor_demand[p]);
    record.oversubscription +=
        std::max(0.0, record.per_processor_demand[p] - config.issue_capacity_w);
  }
  record.imbalance = hi - lo;
  record.utilization = std::clamp(
      total_achieved_ipc / (k * config.issue_capacity_w), 0.0, 1.0);
  return record;
}

std::vector<QuantumRecord> run_simulation(std::span<const PhaseProgram> programs,
                                          const SystemConfig& config,
                                          PolicyKind policy,
                                          std::uint32_t num_quanta,
                                          std::uint64_t seed,
                                          const WindowObserver& observer) {
  validate_config(config);
  validate_programs(programs, config);
  if (num_quanta == 0) {
    throw SchedError(Errc::value_out_of_range, "num_quanta must be at least 1");
  }

  std::vector<ThreadRuntimeState> states(config.thread_count_n);
  std::vector<ThreadDescriptor> threads(config.thread_count_n);
  for (std::uint32_t t = 0; t < config.thread_count_n; ++t) {
    states[t].thread_id = t;
    threads[t].thread_id = t;
  }

  // Quantum 0 bootstrap: no counters have been measured yet.
  Schedule schedule =
      schedule_baseline(PolicyKind::kRoundRobinById, threads, config, seed);

  std::vector<QuantumRecord> records;
  records.reserve(num_quanta);
  for (std::uint32_t q = 0; q < num_quanta; ++q) {
    if (q > 0) {
      for (std::uint32_t t = 0; t < config.thread_count_n; ++t) {
        threads[t].ilp_counter = states[t].ilp_counter;
      }
      schedule = schedule_baseline(policy, threads, config, mix_seed(seed, q));
    }
    records.push_back(run_quantum(schedule, states, programs, config, q, observer));
  }
  return records;
}

}  // namespace ilpsched
