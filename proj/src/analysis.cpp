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

#include "coxf/analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "coxf/exact.hpp"
#include "coxf/rng.hpp"

namespace coxf {
namespace {

void guard_enumeration(Index m, Index k) {
  const std::uint64_t count = binomial(m, k);
  if (count > kEnumerationGuard) {
    throw EnumerationLimit("C(" + std::to_string(m) + ", " + std::to_string(k) +
                           ") subsets exceed the enumeration guard of " +
                           std::to_string(kEnumerationGuard) +
                           "; use a Monte Carlo estimate instead");
  }
}

bool augment(const SupportGraph& g, Index worker, std::vector<Index>& block_owner,
             std::vector<char>& visited) {
  for (Index b : g.adjacency[worker]) {
    if (visited[b]) continue;
    visited[b] = 1;
    if (block_owner[b] < 0 || augment(g, block_owner[b], block_owner, visited)) {
      block_owner[b] = worker;
      return true;
    }
  }
  return false;
}

// Runs body(t) for t in [0, trials) on `jobs` threads, strided.
void parallel_trials(Index trials, unsigned jobs, const std::function<void(Index)>& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<Index>(1, trials))));
  if (jobs == 1) {
    for (Index t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index t = w; t < trials; t += jobs) body(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct TrialOutcome {
  bool full_rank = false;
  bool matching = false;
  double load_per_worker = 0.0;
};

McReport summarize(const std::vector<TrialOutcome>& outcomes) {
  McReport r;
  r.trials = static_cast<Index>(outcomes.size());
  double sum = 0.0;
  for (const auto& o : outcomes) {
    r.full_rank_count += o.full_rank ? 1 : 0;
    r.matching_count += o.matching ? 1 : 0;
    if (o.matching && !o.full_rank) ++r.coefficient_misses;
    if (!o.matching && o.full_rank) ++r.rank_without_matching;
    sum += o.load_per_worker;
  }
  if (r.trials > 0) {
    r.full_rank_fraction = static_cast<double>(r.full_rank_count) / static_cast<double>(r.trials);
    r.mean_load_per_worker = sum / static_cast<double>(r.trials);
    double sq = 0.0;
    for (const auto& o : outcomes) {
      const double d = o.load_per_worker - r.mean_load_per_worker;
      sq += d * d;
    }
    r.load_stddev = r.trials > 1 ? std::sqrt(sq / static_cast<double>(r.trials - 1)) : 0.0;
  }
  return r;
}

TrialOutcome subset_outcome(const CodingMatrix& code, const std::vector<Index>& subset) {
  TrialOutcome o;
  o.full_rank = has_full_column_rank(code.rows(subset));
  o.matching = has_perfect_matching(SupportGraph::from(code), subset);
  o.load_per_worker =
      static_cast<double>(computation_load(code)) / static_cast<double>(code.workers());
  return o;
}

}  // namespace

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (Index i = 1; i <= k; ++i) {
    result = result * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

SupportGraph SupportGraph::from(const CodingMatrix& m) {
  SupportGraph g;
  g.workers = m.workers();
  g.blocks = m.blocks();
  g.adjacency.resize(static_cast<std::size_t>(g.workers));
  for (Index i = 0; i < g.workers; ++i) g.adjacency[i] = m.row_support(i);
  return g;
}

Index SupportGraph::edge_count() const {
  Index e = 0;
  for (const auto& a : adjacency) e += static_cast<Index>(a.size());
  return e;
}

Index maximum_matching(const SupportGraph& g, const std::vector<Index>& subset) {
  std::vector<Index> block_owner(static_cast<std::size_t>(g.blocks), -1);
  Index size = 0;
  for (Index w : subset) {
    if (w < 0 || w >= g.workers) throw InvalidArgument("worker index out of range");
    std::vector<char> visited(static_cast<std::size_t>(g.blocks), 0);
    if (augment(g, w, block_owner, visited)) ++size;
  }
  return size;
}

bool has_perfect_matching(const SupportGraph& g, const std::vector<Index>& subset) {
  if (static_cast<Index>(subset.size()) != g.blocks) {
    throw InvalidArgument("perfect matching needs exactly n workers");
  }
  return maximum_matching(g, subset) == g.blocks;
}

std::optional<std::vector<Index>> find_rank_deficient_subset(const CodingMatrix& m, Index k) {
  if (k < m.blocks()) {
    std::vector<Index> first(static_cast<std::size_t>(std::max<Index>(0, k)));
    for (Index i = 0; i < k; ++i) first[i] = i;
    return first;
  }
  guard_enumeration(m.workers(), k);
  std::optional<std::vector<Index>> witness;
  for_each_subset(m.workers(), k, [&](const std::vector<Index>& subset) {
    if (has_full_column_rank(m.rows(subset))) return true;
    witness = subset;
    return false;
  });
  return witness;
}

Index recovery_threshold_exact(const CodingMatrix& m) {
  for (Index k = m.blocks(); k <= m.workers(); ++k) {
    if (!find_rank_deficient_subset(m, k)) return k;
  }
  return m.workers() + 1;
}

ResistCheck verify_resists(const CodingMatrix& m, Index s) {
  if (s < 0) throw InvalidArgument("straggler count must be non-negative");
  const Index keep = m.workers() - s;
  ResistCheck out;
  if (keep < m.blocks()) {
    for (Index i = 0; i < std::max<Index>(0, keep); ++i) out.witness.push_back(i);
    return out;
  }
  // A block seen by at most s workers is lost when exactly those straggle.
  for (Index j = 0; j < m.blocks(); ++j) {
    const auto neighbours = m.column_support(j);
    if (static_cast<Index>(neighbours.size()) > s) continue;
    for (Index i = 0; i < m.workers() && static_cast<Index>(out.witness.size()) < keep; ++i) {
      if (!std::binary_search(neighbours.begin(), neighbours.end(), i)) out.witness.push_back(i);
    }
    return out;
  }
  auto bad = find_rank_deficient_subset(m, keep);
  if (bad) {
    out.witness = std::move(*bad);
    return out;
  }
  out.resists = true;
  return out;
}

AuditRecord lower_bound_audit(const CodingMatrix& m, Index s) {
  if (!verify_resists(m, s).resists) {
    throw InvalidArgument("audit requires a code that resists " + std::to_string(s) +
                          " stragglers");
  }
  AuditRecord a;
  a.n = m.blocks();
  a.m = m.workers();
  a.s = s;
  a.load = computation_load(m);
  a.load_bound = a.n * (s + 1);
  a.load_slack = a.load - a.load_bound;
  a.recovery_threshold = recovery_threshold_exact(m);
  a.threshold_bound = a.n;
  a.threshold_slack = a.recovery_threshold - a.threshold_bound;
  if (a.load_slack < 0 || a.threshold_slack < 0) {
    throw std::logic_error("lower bound violated: load " + std::to_string(a.load) +
                           ", threshold " + std::to_string(a.recovery_threshold));
  }
  return a;
}

std::string_view to_string(McProtocol protocol) {
  switch (protocol) {
    case McProtocol::kFixedCode: return "fixed-code";
    case McProtocol::kResampleCodeSubset: return "resample-code-and-subset";
  }
  return "fixed-code";
}

McReport probabilistic_threshold_estimate(const CodingMatrix& m, Index trials,
                                          std::uint64_t seed, unsigned jobs) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (m.workers() < m.blocks()) throw InvalidArgument("fewer workers than blocks");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  const Rng root(seed);
  parallel_trials(trials, jobs, [&](Index t) {
    Rng rng = root.split(static_cast<std::uint64_t>(t));
    outcomes[t] = subset_outcome(m, rng.sample_without_replacement(m.workers(), m.blocks()));
  });
  McReport r = summarize(outcomes);
  r.n = m.blocks();
  r.m = m.workers();
  r.seed = seed;
  r.protocol = McProtocol::kFixedCode;
  return r;
}

McReport rank_experiment(const CodeSpec& spec, Index trials, unsigned jobs) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  spec.validate();
  const Index n = spec.n;
  const Index m = spec.workers();
  if (m < n) throw InvalidArgument("fewer workers than blocks");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_trials(trials, jobs, [&](Index t) {
    CodeSpec trial = spec;
    trial.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));
    const CodingMatrix code = make_code(trial);
    Rng subset_rng = Rng(trial.seed).split(1);
    outcomes[t] = subset_outcome(code, subset_rng.sample_without_replacement(m, n));
  });
  McReport r = summarize(outcomes);
  r.n = n;
  r.m = m;
  r.seed = spec.seed;
  r.protocol = McProtocol::kResampleCodeSubset;
  r.spec = spec;
  return r;
}

McReport load_statistics(const CodeSpec& spec, Index trials, unsigned jobs) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  spec.validate();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_trials(trials, jobs, [&](Index t) {
    CodeSpec trial = spec;
    trial.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));
    const CodingMatrix code = make_code(trial);
    outcomes[t].load_per_worker =
        static_cast<double>(computation_load(code)) / static_cast<double>(code.workers());
  });
  McReport r = summarize(outcomes);
  // Only loads were measured.
  r.full_rank_count = 0;
  r.full_rank_fraction = 0.0;
  r.matching_count = 0;
  r.coefficient_misses = 0;
  r.rank_without_matching = 0;
  r.n = spec.n;
  r.m = spec.workers();
  r.seed = spec.seed;
  r.protocol = McProtocol::kResampleCodeSubset;
  r.spec = spec;
  return r;
}

}  // namespace coxf
