#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ilpsched/core.hpp"

namespace ilpsched {

/// Scheduling policies. kIlpSerpentine is the counter-driven bucket-hash +
/// snake-draft policy; the others are evaluation baselines.
enum class PolicyKind {
  kIlpSerpentine,
  kRoundRobinById,
  kRandomSeeded,
  kGreedyLpt,
  kSortedBlock,
};

const char* policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

/// Pigeonhole table over quantized ILP values: C*N buckets of width
/// max_ilp / (C*N), each holding its threads sorted ascending by
/// (ilp, thread_id). Stored as one flat entry array plus bucket offsets so
/// construction stays allocation-light at large N.
class BucketTable {
 public:
  struct Entry {
    std::uint32_t thread_id;
    IlpValue ilp;

    bool operator==(const Entry&) const = default;
  };

  BucketTable(double step_size, std::vector<Entry> entries,
              std::vector<std::uint32_t> offsets)
      : step_size_(step_size),
        entries_(std::move(entries)),
        offsets_(std::move(offsets)) {}

  std::size_t num_buckets() const noexcept { return offsets_.size() - 1; }
  double step_size() const noexcept { return step_size_; }
  std::size_t total_entries() const noexcept { return entries_.size(); }

  std::span<const Entry> bucket(std::size_t index) const {
    if (index >= num_buckets()) {
      throw SchedError(Errc::index_out_of_range,
                       "bucket " + std::to_string(index) + " out of range");
    }
    return std::span<const Entry>(entries_).subspan(
        offsets_[index], offsets_[index + 1] - offsets_[index]);
  }

  /// All entries in ascending bucket order. Equal ILP values always share a
  /// bucket and each bucket is sorted, so the flat array is globally ordered
  /// by (ilp, thread_id) ascending.
  std::span<const Entry> entries() const noexcept { return entries_; }

 private:
  double step_size_;
  std::vector<Entry> entries_;
  std::vector<std::uint32_t> offsets_;  // num_buckets + 1 cumulative counts
};

/// Quantized bucket for an ILP value: floor(ilp / (max_ilp / num_buckets)),
/// with max_ilp itself clamped into the last bucket.
std::size_t bucket_index(IlpValue ilp, double max_ilp, std::size_t num_buckets);

/// Hashes all N threads into the C*N-entry table; colliding threads within a
/// bucket are sorted by ILP value (ties by thread id).
BucketTable build_bucket_table(std::span<const ThreadDescriptor> threads,
                               const SystemConfig& config);

/// Walks buckets high to low, each bucket back to front, yielding all N
/// thread ids by non-increasing ILP (equal ILPs by descending thread id).
std::vector<std::uint32_t> descending_walk(const BucketTable& table);

/// Snake-draft assignment: round r takes the next K ids from the sorted
/// list; even rounds fill processors 0..K-1 left to right, odd rounds right
/// to left, so successive rounds pair large ILP values with small ones.
/// Slot index within a processor equals the round number.
Schedule serpentine_assign(std::span<const std::uint32_t> sorted_ids,
                           const SystemConfig& config);

/// The full counter-driven policy: bucket table, descending walk, serpentine
/// assignment.
Schedule schedule_ilp_serpentine(std::span<const ThreadDescriptor> threads,
                                 const SystemConfig& config);

/// Produces a schedule under any policy. The seed feeds kRandomSeeded only;
/// every other policy ignores it.
Schedule schedule_baseline(PolicyKind kind,
                           std::span<const ThreadDescriptor> threads,
                           const SystemConfig& config, std::uint64_t seed);

/// Max minus min of per-processor cumulative ILP demand under a schedule.
double imbalance(const Schedule& schedule,
                 std::span<const ThreadDescriptor> threads,
                 const SystemConfig& config);

struct OptimalResult {
  Schedule schedule;
  double imbalance;
};

/// Exhaustively minimizes imbalance over all assignments with exactly L
/// threads per processor. Ties break to the lexicographically smallest
/// thread->processor vector. Guarded to N <= 14.
OptimalResult brute_force_optimal(std::span<const ThreadDescriptor> threads,
                                  const SystemConfig& config);

}  // namespace ilpsched
