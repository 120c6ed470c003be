#include "ilpsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ilpsched/rng.hpp"
#include "ilpsched/text.hpp"

namespace ilpsched {

IlpValue PhaseProgram::ilp_at(std::uint64_t cycle) const {
  const std::uint64_t total = total_cycles();
  std::uint64_t offset = cycle % total;
  for (const Phase& p : phases) {
    if (offset < p.duration_cycles) return p.base_ilp;
    offset -= p.duration_cycles;
  }
  return phases.back().base_ilp;  // unreachable for well-formed programs
}

namespace {

void require_ilp_range(double value, double max_ilp, const char* name) {
  if (!is_valid_ilp(value, max_ilp)) {
    throw SchedError(Errc::spec_out_of_range,
                     std::string(name) + " = " + format_double(value) +
                         " outside [0, " + format_double(max_ilp) + "]");
  }
}

std::vector<PhaseProgram> generate_bimodal(const BimodalSpec& spec,
                                           std::uint32_t n_threads,
                                           const SystemConfig& config) {
  require_ilp_range(spec.high_ilp, config.max_ilp, "high_ilp");
  require_ilp_range(spec.low_ilp, config.max_ilp, "low_ilp");
  if (!(spec.high_fraction >= 0.0) || spec.high_fraction > 1.0) {
    throw SchedError(Errc::spec_out_of_range,
                     "high_fraction = " + format_double(spec.high_fraction) +
                         " outside [0, 1]");
  }
  const auto high_count =
      static_cast<std::uint64_t>(std::llround(spec.high_fraction * n_threads));
  std::vector<PhaseProgram> programs;
  programs.reserve(n_threads);
  for (std::uint32_t i = 0; i < n_threads; ++i) {
    // Stripe the high-ILP threads evenly across the id space (integer
    // Bresenham): id i is high iff the cumulative quota crosses an integer.
    const bool high = (static_cast<std::uint64_t>(i + 1) * high_count) / n_threads >
                      (static_cast<std::uint64_t>(i) * high_count) / n_threads;
    programs.push_back(
        {i, {{config.quantum_cycles_q, high ? spec.high_ilp : spec.low_ilp}}});
  }
  return programs;
}

std::vector<PhaseProgram> generate_uniform(const UniformSpec& spec,
                                           std::uint32_t n_threads,
                                           std::uint64_t seed,
                                           const SystemConfig& config) {
  require_ilp_range(spec.min_ilp, config.max_ilp, "min_ilp");
  require_ilp_range(spec.max_ilp, config.max_ilp, "max_ilp");
  if (spec.min_ilp > spec.max_ilp) {
    throw SchedError(Errc::spec_out_of_range, "min_ilp exceeds max_ilp");
  }
  SplitMix64 rng(seed);
  std::vector<PhaseProgram> programs;
  programs.reserve(n_threads);
  for (std::uint32_t i = 0; i < n_threads; ++i) {
    programs.push_back(
        {i, {{config.quantum_cycles_q, rng.next_real(spec.min_ilp, spec.max_ilp)}}});
  }
  return programs;
}

std::vector<PhaseProgram> generate_phased(const PhasedAlternatingSpec& spec,
                                          std::uint32_t n_threads,
                                          const SystemConfig& config) {
  require_ilp_range(spec.level_a, config.max_ilp, "level_a");
  require_ilp_range(spec.level_b, config.max_ilp, "level_b");
  if (spec.phase_len_windows == 0) {
    throw SchedError(Errc::spec_out_of_range, "phase_len_windows must be positive");
  }
  const std::uint64_t duration = spec.phase_len_windows * config.window_cycles_t;
  std::vector<PhaseProgram> programs;
  programs.reserve(n_threads);
  for (std::uint32_t i = 0; i < n_threads; ++i) {
    const double first = (i % 2 == 0) ? spec.level_a : spec.level_b;
    const double second = (i % 2 == 0) ? spec.level_b : spec.level_a;
    programs.push_back({i, {{duration, first}, {duration, second}}});
  }
  return programs;
}

}  // namespace

std::vector<PhaseProgram> generate(const WorkloadSpec& spec,
                                   const SystemConfig& config) {
  if (spec.n_threads > config.thread_count_n) {
    throw SchedError(Errc::spec_out_of_range,
                     "n_threads = " + std::to_string(spec.n_threads) +
                         " exceeds N = " + std::to_string(config.thread_count_n));
  }
  std::vector<PhaseProgram> programs = std::visit(
      [&](const auto& params) -> std::vector<PhaseProgram> {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, BimodalSpec>) {
          return generate_bimodal(params, spec.n_threads, config);
        } else if constexpr (std::is_same_v<T, UniformSpec>) {
          return generate_uniform(params, spec.n_threads, spec.seed, config);
        } else {
          return generate_phased(params, spec.n_threads, config);
        }
      },
      spec.params);
  return pad_to_config(std::move(programs), config);
}

std::vector<PhaseProgram> pad_to_config(std::vector<PhaseProgram> programs,
                                        const SystemConfig& config) {
  if (programs.size() > config.thread_count_n) {
    throw SchedError(Errc::invariant_violation,
                     std::to_string(programs.size()) + " programs exceed N = " +
                         std::to_string(config.thread_count_n));
  }
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (programs[i].thread_id != i) {
      throw SchedError(Errc::invariant_violation,
                       "program " + std::to_string(i) + " has thread id " +
                           std::to_string(programs[i].thread_id) +
                           "; ids must be contiguous from 0");
    }
  }
  for (auto i = static_cast<std::uint32_t>(programs.size());
       i < config.thread_count_n; ++i) {
    programs.push_back({i, {{config.window_cycles_t, 0.0}}});
  }
  return programs;
}

void validate_programs(std::span<const PhaseProgram> programs,
                       const SystemConfig& config) {
  if (programs.size() != config.thread_count_n) {
    throw SchedError(Errc::length_mismatch,
                     "expected " + std::to_string(config.thread_count_n) +
                         " programs, got " + std::to_string(programs.size()));
  }
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const PhaseProgram& program = programs[i];
    if (program.thread_id != i) {
      throw SchedError(Errc::invariant_violation,
                       "program " + std::to_string(i) + " has thread id " +
                           std::to_string(program.thread_id));
    }
    if (program.phases.empty()) {
      throw SchedError(Errc::invariant_violation,
                       "thread " + std::to_string(i) + " has no phases");
    }
    for (const Phase& phase : program.phases) {
      if (phase.duration_cycles == 0) {
        throw SchedError(Errc::invariant_violation,
                         "thread " + std::to_string(i) + " has a zero-length phase");
      }
      if (!is_valid_ilp(phase.base_ilp, config.max_ilp)) {
        throw SchedError(Errc::invariant_violation,
                         "thread " + std::to_string(i) + " phase ILP " +
                             format_double(phase.base_ilp) + " outside [0, " +
                             format_double(config.max_ilp) + "]");
      }
    }
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_number, const std::string& reason) {
  throw SchedError(Errc::parse_error,
                   "line " + std::to_string(line_number) + ": " + reason);
}

}  // namespace

std::vector<PhaseProgram> load_trace(std::istream& in) {
  std::vector<PhaseProgram> programs;
  std::vector<bool> closed_ids;  // grows on demand; marks finished groups
  std::string line;
  std::size_t line_number = 0;
  bool have_current = false;
  std::uint32_t current_id = 0;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const auto first_comma = line.find(',');
    const auto second_comma =
        first_comma == std::string::npos ? std::string::npos
                                         : line.find(',', first_comma + 1);
    if (first_comma == std::string::npos || second_comma == std::string::npos ||
        line.find(',', second_comma + 1) != std::string::npos) {
      parse_fail(line_number, "expected thread_id,duration_cycles,base_ilp");
    }
    const std::string_view view(line);
    const auto id_text = view.substr(0, first_comma);
    const auto duration_text =
        view.substr(first_comma + 1, second_comma - first_comma - 1);
    const auto ilp_text = view.substr(second_comma + 1);

    const auto id = parse_u64(id_text);
    if (!id || *id > 0xfffffffeull) {
      parse_fail(line_number, "bad thread id '" + std::string(id_text) + "'");
    }
    const auto duration = parse_u64(duration_text);
    if (!duration) {
      parse_fail(line_number,
                 "bad duration '" + std::string(duration_text) + "'");
    }
    if (*duration == 0) parse_fail(line_number, "duration must be positive");
    const auto ilp = parse_double(ilp_text);
    if (!ilp || !std::isfinite(*ilp)) {
      parse_fail(line_number, "bad ILP value '" + std::string(ilp_text) + "'");
    }
    if (*ilp < 0.0) parse_fail(line_number, "negative ILP value");

    const auto tid = static_cast<std::uint32_t>(*id);
    if (!have_current || tid != current_id) {
      if (tid < closed_ids.size() && closed_ids[tid]) {
        throw SchedError(Errc::invariant_violation,
                         "thread " + std::to_string(tid) +
                             " appears in multiple groups (line " +
                             std::to_string(line_number) + ")");
      }
      if (have_current) {
        if (current_id >= closed_ids.size()) closed_ids.resize(current_id + 1);
        closed_ids[current_id] = true;
      }
      programs.push_back({tid, {}});
      current_id = tid;
      have_current = true;
    }
    programs.back().phases.push_back({*duration, *ilp});
  }
  if (in.bad()) throw SchedError(Errc::io_error, "read failure");
  std::sort(programs.begin(), programs.end(),
            [](const PhaseProgram& a, const PhaseProgram& b) {
              return a.thread_id < b.thread_id;
            });
  return programs;
}

std::vector<PhaseProgram> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchedError(Errc::io_error, "cannot open trace file " + path.string());
  }
  return load_trace(in);
}

void save_trace(std::span<const PhaseProgram> programs, std::ostream& out) {
  out << "# thread_id,duration_cycles,base_ilp\n";
  for (const PhaseProgram& program : programs) {
    for (const Phase& phase : program.phases) {
      out << program.thread_id << ',' << phase.duration_cycles << ','
          << format_double(phase.base_ilp) << '\n';
    }
  }
  if (!out) throw SchedError(Errc::io_error, "write failure");
}

void save_trace(std::span<const PhaseProgram> programs,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SchedError(Errc::io_error, "cannot open output file " + path.string());
  }
  save_trace(programs, out);
}

}  // namespace ilpsched
