#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ilpsched/scheduler.hpp"
#include "ilpsched/simulator.hpp"

namespace ilpsched {

/// Per-policy aggregate over one simulation run.
struct ExperimentSummary {
  PolicyKind policy = PolicyKind::kIlpSerpentine;
  double mean_imbalance = 0.0;
  double mean_utilization = 0.0;
  double total_retired = 0.0;
  double mean_oversubscription = 0.0;
  std::uint32_t quanta = 0;
};

/// Arithmetic means over the quanta; total_retired is the sum. Throws
/// EmptyInput on an empty record list.
ExperimentSummary summarize(std::span<const QuantumRecord> records,
                            PolicyKind policy);

/// Per-quantum CSV: header then one row per record. Columns are
/// quantum_index, demand_p0..demand_p{K-1}, achieved_p0..achieved_p{K-1},
/// imbalance, oversubscription, total_retired, utilization. Reals use the
/// shortest round-trip decimal form, so output is byte-deterministic and
/// parses back exactly.
void write_csv(std::span<const QuantumRecord> records, std::ostream& out);

/// Summary CSV: policy, mean_imbalance, mean_utilization, total_retired,
/// mean_oversubscription, quanta.
void write_csv(std::span<const ExperimentSummary> summaries, std::ostream& out);

/// Exact inverse of the per-quantum CSV writer.
std::vector<QuantumRecord> read_records_csv(std::istream& in);

}  // namespace ilpsched
