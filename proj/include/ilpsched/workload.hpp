#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "ilpsched/core.hpp"

namespace ilpsched {

/// One demand phase: the thread asks for base_ilp IPC for duration_cycles.
struct Phase {
  std::uint64_t duration_cycles = 0;
  IlpValue base_ilp = 0.0;

  bool operator==(const Phase&) const = default;
};

/// A thread's demand over time. Programs repeat from the first phase once
/// exhausted, so threads never leave the system.
struct PhaseProgram {
  std::uint32_t thread_id = 0;
  std::vector<Phase> phases;

  std::uint64_t total_cycles() const noexcept {
    std::uint64_t sum = 0;
    for (const Phase& p : phases) sum += p.duration_cycles;
    return sum;
  }

  /// Demand at a cycle offset into the (cyclic) program.
  IlpValue ilp_at(std::uint64_t cycle) const;

  bool operator==(const PhaseProgram&) const = default;
};

/// Fraction high_fraction of threads run constant high_ilp, the rest
/// constant low_ilp. High threads are striped evenly across the id space.
struct BimodalSpec {
  double high_ilp = 0.0;
  double low_ilp = 0.0;
  double high_fraction = 0.0;
};

/// Every thread runs a constant ILP drawn uniformly from [min_ilp, max_ilp].
struct UniformSpec {
  double min_ilp = 0.0;
  double max_ilp = 0.0;
};

/// Threads alternate between two ILP levels every phase_len_windows
/// measurement windows; odd ids start on the opposite level.
struct PhasedAlternatingSpec {
  double level_a = 0.0;
  double level_b = 0.0;
  std::uint32_t phase_len_windows = 1;
};

struct WorkloadSpec {
  std::variant<BimodalSpec, UniformSpec, PhasedAlternatingSpec> params;
  std::uint32_t n_threads = 0;
  std::uint64_t seed = 0;
};

/// Deterministic workload synthesis. Produces exactly N programs: n_threads
/// from the spec plus idle (ILP 0) padding so the K*L = N contract holds.
std::vector<PhaseProgram> generate(const WorkloadSpec& spec,
                                   const SystemConfig& config);

/// Pads a program list with idle threads up to N and checks ids are exactly
/// 0..count-1. Throws InvariantViolation when there are more programs than
/// slots or ids do not line up.
std::vector<PhaseProgram> pad_to_config(std::vector<PhaseProgram> programs,
                                        const SystemConfig& config);

/// Checks program invariants against a config (count, ids, positive
/// durations, ILP within [0, max_ilp]).
void validate_programs(std::span<const PhaseProgram> programs,
                       const SystemConfig& config);

/// Trace format: UTF-8 text, one phase per line,
/// `thread_id,duration_cycles,base_ilp`, lines grouped by thread in phase
/// order, `#` comment lines ignored. ILP values round-trip exactly.
std::vector<PhaseProgram> load_trace(const std::filesystem::path& path);
std::vector<PhaseProgram> load_trace(std::istream& in);

void save_trace(std::span<const PhaseProgram> programs,
                const std::filesystem::path& path);
void save_trace(std::span<const PhaseProgram> programs, std::ostream& out);

}  // namespace ilpsched
