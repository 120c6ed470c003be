#include "ilpsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ilpsched/rng.hpp"

namespace ilpsched {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kIlpSerpentine: return "ilp-serpentine";
    case PolicyKind::kRoundRobinById: return "round-robin";
    case PolicyKind::kRandomSeeded: return "random";
    case PolicyKind::kGreedyLpt: return "greedy-lpt";
    case PolicyKind::kSortedBlock: return "sorted-block";
  }
  throw SchedError(Errc::unknown_policy, "unrecognized policy enumerator");
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "ilp-serpentine") return PolicyKind::kIlpSerpentine;
  if (name == "round-robin") return PolicyKind::kRoundRobinById;
  if (name == "random") return PolicyKind::kRandomSeeded;
  if (name == "greedy-lpt") return PolicyKind::kGreedyLpt;
  if (name == "sorted-block") return PolicyKind::kSortedBlock;
  return std::nullopt;
}

std::size_t bucket_index(IlpValue ilp, double max_ilp, std::size_t num_buckets) {
  // !(ilp >= 0) also rejects NaN.
  if (!(ilp >= 0.0) || ilp > max_ilp) {
    throw SchedError(Errc::value_out_of_range,
                     "ILP value " + std::to_string(ilp) + " outside [0, " +
                         std::to_string(max_ilp) + "]");
  }
  const double step = max_ilp / static_cast<double>(num_buckets);
  const auto index = static_cast<std::size_t>(ilp / step);
  return std::min(index, num_buckets - 1);
}

namespace {

// Hint an upcoming write so scattered counter/entry updates overlap their
// cache misses instead of serializing on them.
inline void prefetch_for_write(const void* address) {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_prefetch(address, 1, 3);
#else
  (void)address;
#endif
}

}  // namespace

BucketTable build_bucket_table(std::span<const ThreadDescriptor> threads,
                               const SystemConfig& config) {
  if (threads.size() != config.thread_count_n) {
    throw SchedError(Errc::length_mismatch,
                     "expected " + std::to_string(config.thread_count_n) +
                         " threads, got " + std::to_string(threads.size()));
  }
  const std::size_t n = threads.size();
  const std::size_t num_buckets =
      static_cast<std::size_t>(config.bucket_factor_c) * config.thread_count_n;
  const double step = config.max_ilp / static_cast<double>(num_buckets);

  // Counting sort into a flat array, then sort just the bucket slices that
  // actually collide. Bucket ids are computed once into a scratch column so
  // the scatter loops can prefetch their targets a few dozen iterations out;
  // the counter array is far larger than the input, so those accesses miss
  // the near caches once N is big.
  constexpr std::size_t kFar = 32;   // warm the bucket counter / cursor cell
  constexpr std::size_t kNear = 8;   // cursor now warm; warm the entry slot
  std::vector<std::uint32_t> bucket_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    bucket_of[i] = static_cast<std::uint32_t>(
        bucket_index(threads[i].ilp_counter, config.max_ilp, num_buckets));
  }

  std::vector<std::uint32_t> offsets(num_buckets + 1, 0);
  std::vector<std::uint32_t> collided;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + kFar < n) prefetch_for_write(&offsets[bucket_of[i + kFar] + 1]);
    const std::uint32_t b = bucket_of[i];
    if (++offsets[b + 1] == 2) collided.push_back(b);
  }
  for (std::size_t b = 1; b <= num_buckets; ++b) offsets[b] += offsets[b - 1];

  // offsets[b] doubles as the placement cursor for bucket b.
  std::vector<BucketTable::Entry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + kFar < n) prefetch_for_write(&offsets[bucket_of[i + kFar]]);
    if (i + kNear < n) prefetch_for_write(&entries[offsets[bucket_of[i + kNear]]]);
    entries[offsets[bucket_of[i]]++] = {threads[i].thread_id,
                                        threads[i].ilp_counter};
  }
  // Placement advanced offsets[b] to the end of bucket b; shift right one slot
  // to restore the start offsets.
  std::copy_backward(offsets.begin(), offsets.end() - 1, offsets.end());
  offsets[0] = 0;

  const auto by_ilp_then_id = [](const BucketTable::Entry& a,
                                 const BucketTable::Entry& b) {
    if (a.ilp != b.ilp) return a.ilp < b.ilp;
    return a.thread_id < b.thread_id;
  };
  for (const std::uint32_t b : collided) {
    std::sort(entries.begin() + offsets[b], entries.begin() + offsets[b + 1],
              by_ilp_then_id);
  }
  return BucketTable(step, std::move(entries), std::move(offsets));
}

std::vector<std::uint32_t> descending_walk(const BucketTable& table) {
  // The flat entry array is (ilp, id)-ascending across bucket boundaries, so
  // walking buckets high to low reduces to one reverse scan.
  const std::span<const BucketTable::Entry> entries = table.entries();
  std::vector<std::uint32_t> order;
  order.reserve(entries.size());
  for (std::size_t i = entries.size(); i-- > 0;) {
    order.push_back(entries[i].thread_id);
  }
  return order;
}

Schedule serpentine_assign(std::span<const std::uint32_t> sorted_ids,
                           const SystemConfig& config) {
  if (sorted_ids.size() != config.thread_count_n) {
    throw SchedError(Errc::length_mismatch,
                     "sorted id list has " + std::to_string(sorted_ids.size()) +
                         " entries, expected " +
                         std::to_string(config.thread_count_n));
  }
  const std::uint32_t k = config.processors_k;
  const std::uint32_t l = config.slots_per_processor_l;
  Schedule schedule(k, l);
  // Round r hands processor p its pick j = p on even rounds and j = k-1-p on
  // odd ones; iterating processor-major keeps the schedule writes sequential.
  for (std::uint32_t processor = 0; processor < k; ++processor) {
    const std::uint32_t mirrored = k - 1 - processor;
    for (std::uint32_t round = 0; round < l; ++round) {
      const std::uint32_t j = (round % 2 == 0) ? processor : mirrored;
      schedule.assign(processor, round,
                      sorted_ids[static_cast<std::size_t>(round) * k + j]);
    }
  }
  return schedule;
}

Schedule schedule_ilp_serpentine(std::span<const ThreadDescriptor> threads,
                                 const SystemConfig& config) {
  const BucketTable table = build_bucket_table(threads, config);
  const std::vector<std::uint32_t> order = descending_walk(table);
  return serpentine_assign(order, config);
}

namespace {

// Canonical descending order used by the comparison-based baselines:
// ILP descending, ties by descending thread id (matches descending_walk).
std::vector<std::uint32_t> sorted_ids_descending(
    std::span<const ThreadDescriptor> threads) {
  std::vector<std::uint32_t> ids(threads.size());
  for (std::size_t i = 0; i < threads.size(); ++i) {
    ids[i] = static_cast<std::uint32_t>(i);
  }
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (threads[a].ilp_counter != threads[b].ilp_counter) {
      return threads[a].ilp_counter > threads[b].ilp_counter;
    }
    return threads[a].thread_id > threads[b].thread_id;
  });
  for (std::uint32_t& id : ids) id = threads[id].thread_id;
  return ids;
}

void require_thread_count(std::span<const ThreadDescriptor> threads,
                          const SystemConfig& config) {
  if (threads.size() != config.thread_count_n) {
    throw SchedError(Errc::length_mismatch,
                     "expected " + std::to_string(config.thread_count_n) +
                         " threads, got " + std::to_string(threads.size()));
  }
}

Schedule schedule_round_robin(const SystemConfig& config) {
  Schedule schedule(config.processors_k, config.slots_per_processor_l);
  for (std::uint32_t tid = 0; tid < config.thread_count_n; ++tid) {
    schedule.assign(tid % config.processors_k, tid / config.processors_k, tid);
  }
  return schedule;
}

Schedule schedule_random(const SystemConfig& config, std::uint64_t seed) {
  std::vector<std::uint32_t> perm(config.thread_count_n);
  for (std::uint32_t i = 0; i < config.thread_count_n; ++i) perm[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.next_below(i)]);
  }
  Schedule schedule(config.processors_k, config.slots_per_processor_l);
  std::size_t next = 0;
  for (std::uint32_t p = 0; p < config.processors_k; ++p) {
    for (std::uint32_t s = 0; s < config.slots_per_processor_l; ++s) {
      schedule.assign(p, s, perm[next++]);
    }
  }
  return schedule;
}

Schedule schedule_greedy_lpt(std::span<const ThreadDescriptor> threads,
                             const SystemConfig& config) {
  const std::vector<double> ilp = ilp_by_thread(threads);
  Schedule schedule(config.processors_k, config.slots_per_processor_l);
  std::vector<double> load(config.processors_k, 0.0);
  std::vector<std::uint32_t> used(config.processors_k, 0);
  for (const std::uint32_t tid : sorted_ids_descending(threads)) {
    std::uint32_t best = kNoThread;
    for (std::uint32_t p = 0; p < config.processors_k; ++p) {
      if (used[p] >= config.slots_per_processor_l) continue;
      if (best == kNoThread || load[p] < load[best]) best = p;  // ties: lowest p
    }
    schedule.assign(best, used[best]++, tid);
    load[best] += ilp[tid];
  }
  return schedule;
}

Schedule schedule_sorted_block(std::span<const ThreadDescriptor> threads,
                               const SystemConfig& config) {
  const std::vector<std::uint32_t> order = sorted_ids_descending(threads);
  Schedule schedule(config.processors_k, config.slots_per_processor_l);
  std::size_t next = 0;
  for (std::uint32_t p = 0; p < config.processors_k; ++p) {
    for (std::uint32_t s = 0; s < config.slots_per_processor_l; ++s) {
      schedule.assign(p, s, order[next++]);
    }
  }
  return schedule;
}

}  // namespace

Schedule schedule_baseline(PolicyKind kind,
                           std::span<const ThreadDescriptor> threads,
                           const SystemConfig& config, std::uint64_t seed) {
  require_thread_count(threads, config);
  switch (kind) {
    case PolicyKind::kIlpSerpentine:
      return schedule_ilp_serpentine(threads, config);
    case PolicyKind::kRoundRobinById:
      return schedule_round_robin(config);
    case PolicyKind::kRandomSeeded:
      return schedule_random(config, seed);
    case PolicyKind::kGreedyLpt:
      return schedule_greedy_lpt(threads, config);
    case PolicyKind::kSortedBlock:
      return schedule_sorted_block(threads, config);
  }
  throw SchedError(Errc::unknown_policy, "unrecognized policy enumerator");
}

double imbalance(const Schedule& schedule,
                 std::span<const ThreadDescriptor> threads,
                 const SystemConfig& config) {
  if (schedule.processors() != config.processors_k ||
      schedule.slots_per_processor() != config.slots_per_processor_l) {
    throw SchedError(Errc::state_mismatch,
                     "schedule dimensions do not match config");
  }
  const std::vector<double> ilp = ilp_by_thread(threads);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::uint32_t p = 0; p < schedule.processors(); ++p) {
    double sum = 0.0;
    for (std::uint32_t s = 0; s < schedule.slots_per_processor(); ++s) {
      sum += ilp[schedule.thread_at(p, s)];
    }
    lo = std::min(lo, sum);
    hi = std::max(hi, sum);
  }
  return hi - lo;
}

namespace {

// Depth-first enumeration of thread->processor assignments in lexicographic
// order, restricted to "open processors in index order". Every processor
// permutation of a partition has identical imbalance, and the restricted
// form is exactly the lexicographically smallest member of its class, so
// keeping the first strict minimum reproduces the documented tie-break while
// skipping the K! symmetric duplicates.
struct PartitionSearch {
  std::span<const double> ilp;
  std::uint32_t processors = 0;
  std::uint32_t slots = 0;
  std::vector<std::uint32_t> assignment;
  std::vector<std::uint32_t> counts;
  std::vector<double> loads;
  std::vector<std::uint32_t> best_assignment;
  double best_imbalance = std::numeric_limits<double>::infinity();

  void run(std::uint32_t thread, std::uint32_t opened) {
    if (thread == ilp.size()) {
      double lo = loads[0];
      double hi = loads[0];
      for (std::uint32_t p = 1; p < processors; ++p) {
        lo = std::min(lo, loads[p]);
        hi = std::max(hi, loads[p]);
      }
      if (hi - lo < best_imbalance) {
        best_imbalance = hi - lo;
        best_assignment = assignment;
      }
      return;
    }
    const std::uint32_t limit = std::min(opened + 1, processors);
    for (std::uint32_t p = 0; p < limit; ++p) {
      if (counts[p] == slots) continue;
      assignment[thread] = p;
      ++counts[p];
      const double saved = loads[p];  // snapshot: += then -= may not round-trip
      loads[p] += ilp[thread];
      run(thread + 1, std::max(opened, p + 1));
      loads[p] = saved;
      --counts[p];
    }
  }
};

}  // namespace

OptimalResult brute_force_optimal(std::span<const ThreadDescriptor> threads,
                                  const SystemConfig& config) {
  require_thread_count(threads, config);
  if (config.thread_count_n > 14) {
    throw SchedError(Errc::instance_too_large,
                     "exhaustive search limited to N <= 14, got N = " +
                         std::to_string(config.thread_count_n));
  }
  const std::vector<double> ilp = ilp_by_thread(threads);

  PartitionSearch search;
  search.ilp = ilp;
  search.processors = config.processors_k;
  search.slots = config.slots_per_processor_l;
  search.assignment.assign(config.thread_count_n, 0);
  search.counts.assign(config.processors_k, 0);
  search.loads.assign(config.processors_k, 0.0);
  search.run(0, 0);

  Schedule schedule(config.processors_k, config.slots_per_processor_l);
  std::vector<std::uint32_t> used(config.processors_k, 0);
  for (std::uint32_t tid = 0; tid < config.thread_count_n; ++tid) {
    const std::uint32_t p = search.best_assignment[tid];
    schedule.assign(p, used[p]++, tid);
  }
  return {std::move(schedule), search.best_imbalance};
}

}  // namespace ilpsched
