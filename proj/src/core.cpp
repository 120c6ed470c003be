#include "ilpsched/core.hpp"

#include <cmath>
#include <string>

namespace ilpsched {

bool is_valid_ilp(IlpValue value, double max_ilp) noexcept {
  return std::isfinite(value) && value >= 0.0 && value <= max_ilp;
}

SystemConfig validate_config(const SystemConfig& config) {
  const auto positive = [](bool ok, const char* name) {
    if (!ok) {
      throw SchedError(Errc::non_positive_parameter,
                       std::string(name) + " must be positive");
    }
  };
  positive(config.processors_k > 0, "processors_k");
  positive(config.slots_per_processor_l > 0, "slots_per_processor_l");
  positive(config.thread_count_n > 0, "thread_count_n");
  positive(std::isfinite(config.issue_capacity_w) && config.issue_capacity_w > 0.0,
           "issue_capacity_w");
  positive(std::isfinite(config.max_ilp) && config.max_ilp > 0.0, "max_ilp");
  positive(config.quantum_cycles_q > 0, "quantum_cycles_q");
  positive(config.window_cycles_t > 0, "window_cycles_t");
  positive(config.bucket_factor_c > 0, "bucket_factor_c");

  const std::uint64_t kl = static_cast<std::uint64_t>(config.processors_k) *
                           config.slots_per_processor_l;
  if (kl != config.thread_count_n) {
    throw SchedError(Errc::dimension_mismatch,
                     "thread_count_n = " + std::to_string(config.thread_count_n) +
                         " but K*L = " + std::to_string(kl));
  }
  if (config.window_cycles_t >= config.quantum_cycles_q) {
    throw SchedError(Errc::window_too_large,
                     "window_cycles_t = " + std::to_string(config.window_cycles_t) +
                         " must be less than quantum_cycles_q = " +
                         std::to_string(config.quantum_cycles_q));
  }
  if (config.quantum_cycles_q % config.window_cycles_t != 0) {
    throw SchedError(Errc::window_not_dividing_quantum,
                     "quantum_cycles_q = " + std::to_string(config.quantum_cycles_q) +
                         " is not a multiple of window_cycles_t = " +
                         std::to_string(config.window_cycles_t));
  }
  if (config.max_ilp > config.issue_capacity_w) {
    throw SchedError(Errc::capacity_below_max_ilp,
                     "max_ilp = " + std::to_string(config.max_ilp) +
                         " exceeds issue_capacity_w = " +
                         std::to_string(config.issue_capacity_w));
  }
  return config;
}

bool is_valid_schedule(const Schedule& schedule) {
  const std::uint32_t n = schedule.thread_count();
  std::vector<bool> seen(n, false);
  for (std::uint32_t p = 0; p < schedule.processors(); ++p) {
    for (std::uint32_t s = 0; s < schedule.slots_per_processor(); ++s) {
      const std::uint32_t tid = schedule.thread_at(p, s);
      if (tid >= n || seen[tid]) return false;
      seen[tid] = true;
    }
  }
  return true;
}

std::vector<double> ilp_by_thread(std::span<const ThreadDescriptor> threads) {
  std::vector<double> table(threads.size(), -1.0);
  for (const ThreadDescriptor& t : threads) {
    if (t.thread_id >= threads.size()) {
      throw SchedError(Errc::invariant_violation,
                       "thread id " + std::to_string(t.thread_id) +
                           " outside [0, " + std::to_string(threads.size()) + ")");
    }
    if (table[t.thread_id] >= 0.0) {
      throw SchedError(Errc::invariant_violation,
                       "duplicate thread id " + std::to_string(t.thread_id));
    }
    table[t.thread_id] = t.ilp_counter;
  }
  return table;
}

double cumulative_ilp(const Schedule& schedule,
                      std::span<const ThreadDescriptor> threads,
                      std::uint32_t processor_index) {
  if (processor_index >= schedule.processors()) {
    throw SchedError(Errc::index_out_of_range,
                     "processor " + std::to_string(processor_index) +
                         " >= K = " + std::to_string(schedule.processors()));
  }
  const std::vector<double> ilp = ilp_by_thread(threads);
  double sum = 0.0;
  for (std::uint32_t s = 0; s < schedule.slots_per_processor(); ++s) {
    sum += ilp[schedule.thread_at(processor_index, s)];
  }
  return sum;
}

}  // namespace ilpsched
