#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ilpsched/core.hpp"
#include "ilpsched/scheduler.hpp"
#include "ilpsched/workload.hpp"

namespace ilpsched {

/// Mutable per-thread simulation state; element t always describes thread t.
struct ThreadRuntimeState {
  std::uint32_t thread_id = 0;
  double retired_instructions = 0.0;
  std::uint64_t phase_cursor_cycles = 0;
  IlpValue ilp_counter = 0.0;
};

/// Aggregated metrics for one scheduling quantum. Demand and achieved are
/// time-averaged IPC per processor over the quantum's windows.
struct QuantumRecord {
  std::uint32_t quantum_index = 0;
  std::vector<double> per_processor_demand;
  std::vector<double> per_processor_achieved;
  double imbalance = 0.0;
  double oversubscription = 0.0;
  double total_retired = 0.0;
  double utilization = 0.0;

  bool operator==(const QuantumRecord&) const = default;
};

/// One measurement window as seen by a trace observer.
struct WindowSample {
  std::uint32_t quantum_index = 0;
  std::uint32_t window_index = 0;
  std::vector<double> per_processor_demand;
  std::vector<double> per_processor_achieved;
};

using WindowObserver = std::function<void(const WindowSample&)>;

/// Max-min fair split of a shared issue capacity: each demand receives
/// min(demand, lambda) with the water level lambda chosen so allocations sum
/// to min(sum demands, capacity). When the demands fit, they are returned
/// unchanged. Allocations never exceed demand and never sum above capacity.
std::vector<double> water_fill(std::span<const double> demands, double capacity);

/// Simulates one quantum as Q/T windows: per window, each processor
/// water-fills its co-scheduled demands, threads retire achieved * T
/// instructions, and phase cursors advance by T. Counters are re-measured
/// from the final window (achieved or demanded rate per counter_mode).
QuantumRecord run_quantum(const Schedule& schedule,
                          std::vector<ThreadRuntimeState>& states,
                          std::span<const PhaseProgram> programs,
                          const SystemConfig& config,
                          std::uint32_t quantum_index,
                          const WindowObserver& observer = {});

/// Full simulation loop. Quantum 0 runs under a round-robin bootstrap
/// schedule (no counters exist yet); every later quantum is scheduled by the
/// chosen policy from the counters measured at the end of the previous one.
std::vector<QuantumRecord> run_simulation(std::span<const PhaseProgram> programs,
                                          const SystemConfig& config,
                                          PolicyKind policy,
                                          std::uint32_t num_quanta,
                                          std::uint64_t seed,
                                          const WindowObserver& observer = {});

}  // namespace ilpsched
