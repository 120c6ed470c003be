#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ilpsched/error.hpp"

namespace ilpsched {

/// ILP demand / achieved throughput in instructions per cycle. Valid values
/// are finite and within [0, SystemConfig::max_ilp].
using IlpValue = double;

bool is_valid_ilp(IlpValue value, double max_ilp) noexcept;

/// What the emulated per-thread counter samples over the measurement window:
/// the rate the thread actually retired at (contention-limited) or the rate
/// it asked for.
enum class CounterMode { kAchieved, kDemand };

/// A schedulable thread: identity plus the ILP counter from the most recent
/// measurement window.
struct ThreadDescriptor {
  std::uint32_t thread_id = 0;
  IlpValue ilp_counter = 0.0;

  bool operator==(const ThreadDescriptor&) const = default;
};

/// Machine and policy parameters for one experiment. K processors expose L
/// hardware thread slots each and run exactly N = K*L threads; a processor
/// issues at most W IPC; the OS reschedules every Q cycles and counters
/// average over the final T-cycle window of each quantum.
struct SystemConfig {
  std::uint32_t processors_k = 0;
  std::uint32_t slots_per_processor_l = 0;
  std::uint32_t thread_count_n = 0;
  double issue_capacity_w = 0.0;
  double max_ilp = 0.0;
  std::uint64_t quantum_cycles_q = 0;
  std::uint64_t window_cycles_t = 0;
  std::uint32_t bucket_factor_c = 0;
  CounterMode counter_mode = CounterMode::kAchieved;

  std::uint64_t windows_per_quantum() const noexcept {
    return window_cycles_t == 0 ? 0 : quantum_cycles_q / window_cycles_t;
  }
};

/// Checks every SystemConfig invariant (N = K*L, 0 < T < Q, T | Q,
/// max_ilp <= W, all parameters positive and finite) and returns the config
/// unchanged. Throws SchedError naming the first violation otherwise.
SystemConfig validate_config(const SystemConfig& config);

inline constexpr std::uint32_t kNoThread = 0xffffffffu;

/// Bijective mapping of N thread ids onto the K*L (processor, slot) pairs of
/// one scheduling quantum. Constructed with every slot unassigned; policies
/// fill all of them. Immutable value semantics once built.
class Schedule {
 public:
  Schedule(std::uint32_t processors, std::uint32_t slots_per_processor)
      : processors_(processors),
        slots_(slots_per_processor),
        slot_to_thread_(static_cast<std::size_t>(processors) * slots_per_processor,
                        kNoThread) {}

  std::uint32_t processors() const noexcept { return processors_; }
  std::uint32_t slots_per_processor() const noexcept { return slots_; }
  std::uint32_t thread_count() const noexcept { return processors_ * slots_; }

  std::uint32_t thread_at(std::uint32_t processor, std::uint32_t slot) const {
    return slot_to_thread_[index(processor, slot)];
  }

  void assign(std::uint32_t processor, std::uint32_t slot, std::uint32_t thread_id) {
    slot_to_thread_[index(processor, slot)] = thread_id;
  }

  bool operator==(const Schedule&) const = default;

 private:
  std::size_t index(std::uint32_t processor, std::uint32_t slot) const {
    if (processor >= processors_ || slot >= slots_) {
      throw SchedError(Errc::index_out_of_range,
                       "schedule slot (" + std::to_string(processor) + "," +
                           std::to_string(slot) + ") out of range");
    }
    return static_cast<std::size_t>(processor) * slots_ + slot;
  }

  std::uint32_t processors_;
  std::uint32_t slots_;
  std::vector<std::uint32_t> slot_to_thread_;
};

/// Shared validator: every slot assigned and every thread id in [0, N)
/// appears exactly once.
bool is_valid_schedule(const Schedule& schedule);

/// ILP counters indexed by thread id. Throws InvariantViolation on duplicate
/// or out-of-range ids.
std::vector<double> ilp_by_thread(std::span<const ThreadDescriptor> threads);

/// Sum of the ILP counters of the L threads co-scheduled on one processor.
double cumulative_ilp(const Schedule& schedule,
                      std::span<const ThreadDescriptor> threads,
                      std::uint32_t processor_index);

}  // namespace ilpsched
