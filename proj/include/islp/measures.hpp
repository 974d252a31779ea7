#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "islp/poly.hpp"

namespace islp {

/// Ordering of the rotations of `s` (cyclic prefix doubling, O(n log n)).
/// Equal rotations keep no particular order.
std::vector<std::uint32_t> rotation_order(const std::vector<std::uint32_t>& s);

/// Suffix array of t.
std::vector<std::uint32_t> suffix_array(std::string_view t);

/// lcp[r] = lcp(t[sa[r-1]..], t[sa[r]..]), lcp[0] = 0.
std::vector<std::uint32_t> lcp_array(std::string_view t, const std::vector<std::uint32_t>& sa);

/// Number of distinct substrings of t of each length k, indexed by k (entry 0 unused).
std::vector<std::uint64_t> distinct_substring_counts(std::string_view t);

/// max_k T_k / k, reduced.
Rational delta(std::string_view t);

/// Phrases in the greedy LZ76 parse (sources may overlap the phrase).
std::uint64_t lz76_z(std::string_view t);

/// Runs in bwt(t), or in bwt(t$) with $ smaller than every symbol.
std::uint64_t bwt_runs(std::string_view t, bool sentinel);

struct MeasureReport {
  std::uint64_t n = 0;
  Rational delta;
  std::uint64_t z = 0;
  std::uint64_t bwt_runs = 0;
  std::uint64_t bwt_runs_sentinel = 0;
};

MeasureReport measure(std::string_view t);

}  // namespace islp
