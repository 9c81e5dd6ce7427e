// Copyright 2026 The coxf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COXF_ANALYSIS_HPP_
#define COXF_ANALYSIS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coxf/codes.hpp"
#include "coxf/types.hpp"

namespace coxf {

// Exhaustive checks refuse to enumerate more subsets than this.
inline constexpr std::uint64_t kEnumerationGuard = 1'000'000;

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index k);

// Visits every k-subset of {0..n-1} in lexicographic order. Stops early and
// returns false as soon as visit(subset) returns false.
template <typename Visit>
bool for_each_subset(Index n, Index k, Visit&& visit) {
  if (k < 0 || k > n) return true;
  std::vector<Index> subset(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) subset[i] = i;
  while (true) {
    if (!visit(static_cast<const std::vector<Index>&>(subset))) return false;
    Index i = k - 1;
    while (i >= 0 && subset[i] == n - k + i) --i;
    if (i < 0) return true;
    ++subset[i];
    for (Index j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
}

// Bipartite graph of workers and blocks with an edge wherever M(i,j) != 0.
struct SupportGraph {
  Index workers = 0;
  Index blocks = 0;
  std::vector<std::vector<Index>> adjacency;  // worker -> blocks

  static SupportGraph from(const CodingMatrix& m);
  Index edge_count() const;
};

// Size of a maximum matching between `subset` workers and all blocks
// (augmenting paths).
Index maximum_matching(const SupportGraph& g, const std::vector<Index>& subset);

// `subset` must contain exactly n workers.
bool has_perfect_matching(const SupportGraph& g, const std::vector<Index>& subset);

// First k-subset (lexicographic) whose k x n submatrix has rank < n, if any.
// Throws EnumerationLimit when C(m, k) exceeds the guard.
std::optional<std::vector<Index>> find_rank_deficient_subset(const CodingMatrix& m, Index k);

// Smallest k such that every k-subset of workers has full column rank; m + 1
// when no k works.
Index recovery_threshold_exact(const CodingMatrix& m);

struct ResistCheck {
  bool resists = false;
  // (m - s) workers whose results do not determine Ax, when !resists.
  std::vector<Index> witness;
};

ResistCheck verify_resists(const CodingMatrix& m, Index s);

// Measured load and threshold against the lower bounds n(s+1) and n.
struct AuditRecord {
  Index n = 0;
  Index m = 0;
  Index s = 0;
  Index load = 0;
  Index load_bound = 0;
  Index load_slack = 0;
  Index recovery_threshold = 0;
  Index threshold_bound = 0;
  Index threshold_slack = 0;
};

// Requires verify_resists(m, s); a bound violation throws std::logic_error.
AuditRecord lower_bound_audit(const CodingMatrix& m, Index s);

enum class McProtocol {
  kFixedCode,           // one code, fresh uniform subset per trial
  kResampleCodeSubset,  // fresh code and fresh subset per trial
};

std::string_view to_string(McProtocol protocol);

struct McReport {
  Index trials = 0;
  Index n = 0;
  Index m = 0;
  Index full_rank_count = 0;
  double full_rank_fraction = 0.0;
  double mean_load_per_worker = 0.0;
  double load_stddev = 0.0;
  // Subsets whose support graph has a perfect matching.
  Index matching_count = 0;
  // Matching present but rank < n: an unlucky coefficient draw.
  Index coefficient_misses = 0;
  // Rank n without a matching. Always zero unless something is broken.
  Index rank_without_matching = 0;
  std::uint64_t seed = 0;
  McProtocol protocol = McProtocol::kFixedCode;
  std::optional<CodeSpec> spec;
};

// Fraction of uniformly sampled n-subsets of a fixed code with full rank.
McReport probabilistic_threshold_estimate(const CodingMatrix& m, Index trials,
                                          std::uint64_t seed, unsigned jobs = 1);

// Draws a fresh code (seed derived per trial from spec.seed) and a fresh
// n-subset every trial. Aggregates are identical for any `jobs`.
McReport rank_experiment(const CodeSpec& spec, Index trials, unsigned jobs = 1);

// Mean and standard deviation of ||M||_0 / m over freshly drawn codes.
McReport load_statistics(const CodeSpec& spec, Index trials, unsigned jobs = 1);

}  // namespace coxf

#endif  // COXF_ANALYSIS_HPP_
