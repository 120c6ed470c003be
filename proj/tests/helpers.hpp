#pragma once

#include <initializer_list>
#include <vector>

#include <doctest.h>

#include "ilpsched/core.hpp"

namespace test_helpers {

inline ilpsched::SystemConfig make_config(std::uint32_t k, std::uint32_t l,
                                          double w = 4.0, double max_ilp = 4.0,
                                          std::uint64_t q = 1000,
                                          std::uint64_t t = 250,
                                          std::uint32_t c = 4) {
  ilpsched::SystemConfig config;
  config.processors_k = k;
  config.slots_per_processor_l = l;
  config.thread_count_n = k * l;
  config.issue_capacity_w = w;
  config.max_ilp = max_ilp;
  config.quantum_cycles_q = q;
  config.window_cycles_t = t;
  config.bucket_factor_c = c;
  return config;
}

// Thread descriptors with ids 0..n-1 in the order the ILPs are listed.
inline std::vector<ilpsched::ThreadDescriptor> make_threads(
    std::initializer_list<double> ilps) {
  std::vector<ilpsched::ThreadDescriptor> threads;
  std::uint32_t id = 0;
  for (const double ilp : ilps) threads.push_back({id++, ilp});
  return threads;
}

// Runs fn, which must throw SchedError, and hands back the error code.
template <typename Fn>
ilpsched::Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const ilpsched::SchedError& err) {
    return err.code();
  }
  FAIL("expected a SchedError");
  return ilpsched::Errc::io_error;  // unreachable
}

}  // namespace test_helpers
