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

// Acceptance checks. `coxf_acceptance <id>` runs one criterion, `all` runs
// every one; each prints a single PASS/FAIL line and the exit status is
// nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coxf/analysis.hpp"
#include "coxf/cli.hpp"
#include "coxf/codes.hpp"
#include "coxf/decoder.hpp"
#include "coxf/exact.hpp"
#include "coxf/simulator.hpp"

namespace coxf {
namespace {

// Pinned tolerances.
constexpr double kDiagonalTimeLimitSeconds = 60.0;
constexpr double kCrossFractionTarget = 0.86;
constexpr double kCrossFractionTolerance = 0.05;
constexpr double kCrossLoadTarget = 3.4;
constexpr double kCrossLoadTolerance = 0.2;
constexpr double kCrossTimeLimitSeconds = 300.0;
constexpr double kBernoulliFractionFloor = 0.85;
constexpr double kDecodeTolerance = 1e-8;
constexpr double kGdTrajectoryTolerance = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CodeSpec diagonal(Index n, Index s, std::uint64_t seed) {
  CodeSpec spec;
  spec.family = CodeFamily::kSDiagonal;
  spec.n = n;
  spec.s = s;
  spec.seed = seed;
  return spec;
}

Outcome diagonal_optimality() {
  const auto start = Clock::now();
  Index bad = 0, cases = 0;
  std::string first_bad;
  for (Index n : {4, 6, 8, 10})
    for (Index s : {1, 2, 3}) {
      const CodingMatrix code = regenerate_until_valid(diagonal(n, s, 1), 100).code;
      const Index threshold = recovery_threshold_exact(code);
      const Index load = computation_load(code);
      ++cases;
      if (threshold != n || load != n * (s + 1)) {
        if (bad++ == 0)
          first_bad = "n=" + std::to_string(n) + " s=" + std::to_string(s) +
                      " threshold=" + std::to_string(threshold) + " load=" + std::to_string(load);
      }
    }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = bad == 0 && elapsed < kDiagonalTimeLimitSeconds;
  o.detail = std::to_string(cases - bad) + "/" + std::to_string(cases) +
             " (n,s) pairs optimal, " + fmt(elapsed) + " s (limit " +
             fmt(kDiagonalTimeLimitSeconds) + " s)" + (bad ? "; first miss " + first_bad : "");
  return o;
}

Outcome four_block_example() {
  const CodingMatrix code = make_s_diagonal(4, 5, 1, 1, 0);
  const std::vector<Index> late{1, 2, 3, 4};  // workers 2..5
  RationalMatrix blocks(3, 4);
  blocks << 3, -1, 4, 1,  //
      5, 9, -2, 6,        //
      -5, 3, 5, 8;
  const RationalMatrix results = blocks * exact_cast<Rational>(code.rows(late)).transpose();
  const auto report = hybrid_decode(BasicReceivedSet<Rational>(code, late, results, 12));
  const bool decoded = report.blocks == blocks;

  RationalMatrix displayed(4, 4);
  displayed << 1, 0, 0, 0,  //
      -1, 1, 0, 0,          //
      0, 0, 1, -1,          //
      0, 0, 0, 1;
  const RationalMatrix inverse = coding_inverse(code, late);
  const bool matches = inverse == displayed;
  Index differing = 0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) differing += inverse(i, j) != displayed(i, j);
  const bool matches_other = coding_inverse(code, {0, 1, 3, 4}) == displayed;

  std::ostringstream row0;
  for (Index j = 0; j < 4; ++j) row0 << (j ? "," : "") << inverse(0, j);
  Outcome o;
  o.pass = decoded && matches;
  o.detail = std::string("exact decode ") + (decoded ? "ok" : "WRONG") +
             "; inverse vs displayed matrix: " + std::to_string(differing) +
             "/16 entries differ (computed first row " + row0.str() + ")" +
             (matches_other ? "; displayed matrix is the inverse for workers {1,2,4,5}" : "");
  return o;
}

Outcome one_diagonal_determinants() {
  Index checked = 0, bad = 0;
  for (Index n = 2; n <= 10; ++n) {
    const CodingMatrix code = make_one_diagonal(n);
    for (Index out = 0; out <= n; ++out) {
      std::vector<Index> keep;
      for (Index i = 0; i <= n; ++i)
        if (i != out) keep.push_back(i);
      ++checked;
      bad += exact_determinant(code.rows(keep)) != 1;
    }
  }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) +
                        " leave-one-out determinants equal 1"};
}

Outcome cross_code_numbers() {
  const auto start = Clock::now();
  CodeSpec spec;
  spec.family = CodeFamily::kCross;
  spec.n = 20;
  spec.m = 24;
  spec.d1 = 2;
  spec.d2 = 2;
  spec.seed = 2024;
  const McReport r = rank_experiment(spec, 1000, 4);
  const double elapsed = seconds_since(start);
  const bool fraction_ok =
      std::abs(r.full_rank_fraction - kCrossFractionTarget) <= kCrossFractionTolerance;
  const bool load_ok = std::abs(r.mean_load_per_worker - kCrossLoadTarget) <= kCrossLoadTolerance;
  Outcome o;
  o.pass = fraction_ok && load_ok && elapsed < kCrossTimeLimitSeconds;
  o.detail = "full_rank_fraction " + fmt(r.full_rank_fraction) + " (target " +
             fmt(kCrossFractionTarget) + " +/- " + fmt(kCrossFractionTolerance) + ", " +
             (fraction_ok ? "ok" : "out of range") + "), mean load " +
             fmt(r.mean_load_per_worker) + " (target " + fmt(kCrossLoadTarget) + " +/- " +
             fmt(kCrossLoadTolerance) + ", " + (load_ok ? "ok" : "out of range") + "), " +
             fmt(elapsed) + " s";
  return o;
}

Outcome bernoulli_threshold() {
  CodeSpec spec;
  spec.family = CodeFamily::kPBernoulli;
  spec.n = 30;
  spec.m = 34;
  spec.p = 2.0 * std::log(30.0) / 30.0;
  spec.seed = 2024;
  const McReport r = rank_experiment(spec, 500, 4);
  return {r.full_rank_fraction >= kBernoulliFractionFloor,
          "full_rank_fraction " + fmt(r.full_rank_fraction) + " over 500 subsets (floor " +
              fmt(kBernoulliFractionFloor) + ")"};
}

// Hybrid decoding cost against inverse decoding on every decodable subset of
// a code, restricted to codes with l(M)/n < n.
struct CostTally {
  Index instances = 0;
  Index violations = 0;
  Index skipped_dense = 0;
};

void tally_costs(const CodingMatrix& code, CostTally& tally) {
  const Index n = code.blocks();
  if (computation_load(code) >= n * n) {
    ++tally.skipped_dense;
    return;
  }
  for_each_subset(code.workers(), n, [&](const std::vector<Index>& subset) {
    if (!has_full_column_rank(code.rows(subset))) return true;
    const ReceivedSet rx(code, subset, DenseMatrix::Zero(1, n), n);
    ++tally.instances;
    tally.violations += hybrid_decode(rx).scalar_ops >= inverse_decode(rx).scalar_ops;
    return true;
  });
}

Outcome diagonal_decoding() {
  Index subsets = 0, too_many_roots = 0, inexact = 0;
  CostTally diag;
  for (Index n = 1; n <= 10; ++n)
    for (Index s = 0; s <= 3; ++s) {
      const CodingMatrix code = regenerate_until_valid(diagonal(n, s, 7), 100).code;
      // Row counts that n does not divide exercise the padding path.
      const DataMatrix a = random_gaussian_matrix(3 * n + 1, 5, 100 * n + s);
      const Vector x = random_gaussian_vector(5, 7);
      const Vector ax = block_multiply(a, x);
      const BlockPartition parts = partition(a, n);
      DenseMatrix coded(parts.block_rows(), code.workers());
      for (const auto& w : encode(parts, code))
        coded.col(w.worker_id) = block_multiply(w.coded_block, x);
      for_each_subset(n + s, n, [&](const std::vector<Index>& subset) {
        DenseMatrix results(parts.block_rows(), n);
        for (Index k = 0; k < n; ++k) results.col(k) = coded.col(subset[k]);
        const ReceivedSet rx(code, subset, results, a.rows());
        const auto report = diagonal_decode(rx, s);
        ++subsets;
        too_many_roots += report.rooting_steps > s;
        inexact += (report.output - ax).norm() > kDecodeTolerance * ax.norm();
        return true;
      });
      tally_costs(code, diag);
    }

  // Random sparse families at the same sizes: a pinned sample of draws.
  CostTally random;
  for (Index n = 2; n <= 10; ++n)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const double p = std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / n);
      tally_costs(make_p_bernoulli(n, n + 3, p, kDefaultCoefficientSetSize, seed), random);
      tally_costs(make_cross(n, n + 3, 2, 2, kDefaultCoefficientSetSize, seed), random);
    }

  Outcome o;
  o.pass = too_many_roots == 0 && inexact == 0 && diag.violations == 0 && random.violations == 0;
  o.detail = std::to_string(subsets) + " diagonal subsets: " + std::to_string(too_many_roots) +
             " over s roots, " + std::to_string(inexact) + " inexact; hybrid >= inverse ops on " +
             std::to_string(diag.violations) + "/" + std::to_string(diag.instances) +
             " diagonal and " + std::to_string(random.violations) + "/" +
             std::to_string(random.instances) + " random sparse instances (" +
             std::to_string(diag.skipped_dense + random.skipped_dense) +
             " codes skipped with l(M)/n >= n)";
  return o;
}

Outcome rank_matching() {
  CodeSpec spec;
  spec.family = CodeFamily::kPBernoulli;
  spec.n = 8;
  spec.m = 10;
  spec.p = 0.3;
  spec.seed = 2024;
  const McReport r = rank_experiment(spec, 500, 4);
  return {r.coefficient_misses == 0 && r.rank_without_matching == 0,
          "500 supports: " + std::to_string(r.matching_count) + " with a perfect matching, " +
              std::to_string(r.full_rank_count) + " full rank, " +
              std::to_string(r.coefficient_misses) + " matching-but-singular, " +
              std::to_string(r.rank_without_matching) + " full-rank-without-matching"};
}

Outcome coded_gradient_descent() {
  const DataMatrix a = random_gaussian_matrix(2000, 100, 11);
  const Vector b = random_gaussian_vector(2000, 12);
  // A tenth of 1/lambda_max keeps the gradient above the rounding floor for
  // all 200 iterations, so monotonicity is a statement about the method.
  const double eta = 0.1 * default_step_size(a);
  const CodingMatrix code = regenerate_until_valid(diagonal(10, 2, 3), 100).code;
  GdOptions options;
  options.keep_iterates = true;
  const GdTrace coded =
      run_coded_gd(a, b, code, eta, 200, parse_straggler_model("random:2"), 13, options);
  const GdTrace plain =
      run_coded_gd(a, b, make_identity(10), eta, 200, StragglerModel::none(), 13, options);
  double worst = 0.0;
  for (std::size_t t = 1; t < coded.iterates.size(); ++t) {
    const double scale = std::max(plain.iterates[t].norm(), 1e-300);
    worst = std::max(worst, (coded.iterates[t] - plain.iterates[t]).norm() / scale);
  }
  Index increases = 0;
  for (std::size_t t = 1; t < coded.iterations.size(); ++t)
    increases += coded.iterations[t].gradient_norm >= coded.iterations[t - 1].gradient_norm;
  Index retries = 0;
  for (const auto& it : coded.iterations) retries += it.retries;
  Outcome o;
  o.pass = coded.iterates.size() == 201 && worst <= kGdTrajectoryTolerance && increases == 0;
  o.detail = "max relative iterate gap " + fmt(worst) + " (limit " + fmt(kGdTrajectoryTolerance) +
             "), " + std::to_string(increases) + " non-decreasing gradient steps, final norm " +
             fmt(coded.iterations.back().gradient_norm) + ", " + std::to_string(retries) +
             " retries";
  return o;
}

std::string run_capture(const std::vector<std::string>& args, int& status) {
  std::ostringstream out, err;
  status = run_cli(args, out, err);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coxf_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "compare.json");
    cfg << R"({"n": 6, "rows": 60, "cols": 8, "trials": 5, "seed": 21,
              "stragglers": {"kind": "random-set", "count": 2, "slow_factor": 10},
              "schemes": [{"name": "diag", "family": "s-diagonal", "s": 2},
                          {"name": "cross", "family": "cross", "m": 9, "d1": 2, "d2": 2},
                          {"name": "bern", "family": "p-bernoulli", "m": 9, "p": 0.5}]})";
  }
  const std::vector<std::vector<std::string>> commands = {
      {"gen-code", "--family", "s-diagonal", "--n", "6", "--s", "2", "--seed", "5", "--verify"},
      {"gen-code", "--family", "one-diagonal", "--n", "6", "--format", "csv"},
      {"gen-code", "--family", "p-bernoulli", "--n", "8", "--m", "11", "--p", "0.4", "--seed", "5"},
      {"gen-code", "--family", "cross", "--n", "8", "--m", "11", "--d1", "2", "--d2", "2.5",
       "--seed", "5"},
      {"mc-rank", "--family", "cross", "--n", "10", "--m", "12", "--d1", "2", "--d2", "2",
       "--trials", "300", "--seed", "3", "--jobs", "1"},
      {"mc-rank", "--family", "p-bernoulli", "--n", "6,8,10", "--m-offset", "2", "--p", "0.5",
       "--trials", "200", "--seed", "3", "--format", "csv", "--jobs", "3"},
      {"simulate", "--family", "s-diagonal", "--n", "6", "--s", "2", "--rows", "60", "--cols", "8",
       "--stragglers", "random:2", "--seed", "9"},
      {"simulate", "--family", "cross", "--n", "6", "--m", "9", "--d1", "2", "--d2", "2",
       "--rows", "60", "--cols", "8", "--stragglers", "delay:0.3", "--seed", "9", "--format",
       "csv"},
      {"gd", "--family", "s-diagonal", "--n", "5", "--s", "1", "--rows", "50", "--cols", "6",
       "--stragglers", "random:1", "--iterations", "30", "--seed", "4"},
      {"gd", "--family", "s-diagonal", "--n", "5", "--s", "1", "--rows", "50", "--cols", "6",
       "--stragglers", "random:1", "--iterations", "30", "--seed", "4", "--format", "csv"},
      {"compare", "--config", (dir / "compare.json").string()},
      {"compare", "--config", (dir / "compare.json").string(), "--format", "csv"},
  };
  Index same = 0, failed = 0;
  std::string first_diff;
  for (const auto& cmd : commands) {
    int s1 = 0, s2 = 0;
    const std::string one = run_capture(cmd, s1);
    const std::string two = run_capture(cmd, s2);
    const bool ok = s1 == 0 && s2 == 0 && !one.empty() && one == two;
    same += ok;
    if (!ok && failed++ == 0) first_diff = cmd[0] + " (status " + std::to_string(s1) + ")";
  }
  // Thread count must not change Monte Carlo output.
  {
    std::vector<std::string> cmd = commands[4];
    int s1 = 0, s2 = 0;
    const std::string one = run_capture(cmd, s1);
    cmd.back() = "4";
    const std::string four = run_capture(cmd, s2);
    const bool ok = s1 == 0 && s2 == 0 && one == four;
    same += ok;
    if (!ok && failed++ == 0) first_diff = "mc-rank --jobs 1 vs 4";
  }
  // Side files written by --csv and --summary.
  for (const std::string& sub : {std::string("simulate"), std::string("gd")}) {
    std::vector<std::string> cmd = {sub, "--family", "s-diagonal", "--n", "5", "--s", "1",
                                    "--rows", "50", "--cols", "6", "--stragglers", "random:1",
                                    "--seed", "4", "-o", (dir / "main.json").string(), "--csv"};
    int s1 = 0, s2 = 0;
    cmd.push_back((dir / "a.csv").string());
    run_capture(cmd, s1);
    cmd.back() = (dir / "b.csv").string();
    run_capture(cmd, s2);
    const bool ok = s1 == 0 && s2 == 0 && slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                    !slurp(dir / "a.csv").empty();
    same += ok;
    if (!ok && failed++ == 0) first_diff = sub + " --csv";
  }
  const Index total = same + failed;
  fs::remove_all(dir);
  return {failed == 0, std::to_string(same) + "/" + std::to_string(total) +
                           " reruns byte-identical" + (failed ? "; first mismatch " + first_diff : "")};
}

Outcome virtual_time_ordering() {
  CompareConfig config;
  config.n = 8;
  config.rows = 400;
  config.cols = 40;
  config.trials = 50;
  config.seed = 17;
  config.model = parse_straggler_model("random:1");
  config.model.slow_factor = 10.0;
  for (Index s : {1, 2}) {
    SchemeConfig scheme;
    scheme.name = "s-diagonal-" + std::to_string(s);
    scheme.spec.family = CodeFamily::kSDiagonal;
    scheme.spec.s = s;
    config.schemes.push_back(scheme);
  }
  SchemeConfig one;
  one.name = "one-diagonal";
  one.spec.family = CodeFamily::kOneDiagonal;
  config.schemes.push_back(one);
  const ExperimentReport r = compare_schemes(config);
  std::map<Index, double> uncoded;
  for (const auto& t : r.trials)
    if (t.scheme == "uncoded" && t.success) uncoded[t.trial] = t.job_time;
  Index wins = 0, comparisons = 0;
  for (const auto& t : r.trials) {
    if (t.scheme == "uncoded") continue;
    ++comparisons;
    wins += t.success && uncoded.count(t.trial) && t.job_time < uncoded[t.trial];
  }
  return {comparisons == 150 && wins == comparisons,
          "coded faster than uncoded in " + std::to_string(wins) + "/" +
              std::to_string(comparisons) + " trials under one 10x straggler"};
}

}  // namespace
}  // namespace coxf

int main(int argc, char** argv) {
  using Check = std::function<coxf::Outcome()>;
  const std::vector<std::pair<std::string, std::pair<std::string, Check>>> checks = {
      {"1", {"diagonal codes meet threshold n and load n(s+1)", coxf::diagonal_optimality}},
      {"2", {"four-block example decode and inverse", coxf::four_block_example}},
      {"3", {"one-diagonal leave-one-out determinants", coxf::one_diagonal_determinants}},
      {"4", {"(2,2)-cross n=20 m=24 rank fraction and load", coxf::cross_code_numbers}},
      {"5", {"p-Bernoulli n=30 full-rank fraction", coxf::bernoulli_threshold}},
      {"6", {"diagonal decoding roots, exactness and cost", coxf::diagonal_decoding}},
      {"7", {"rank and perfect matching agree", coxf::rank_matching}},
      {"8", {"coded gradient descent matches uncoded", coxf::coded_gradient_descent}},
      {"9", {"seeded reruns are byte-identical", coxf::determinism}},
      {"ordering", {"virtual-time ordering", coxf::virtual_time_ordering}},
  };
  const std::string wanted = argc > 1 ? argv[1] : "all";
  bool all_pass = true, ran = false;
  for (const auto& [id, check] : checks) {
    if (wanted != "all" && wanted != id) continue;
    ran = true;
    coxf::Outcome o;
    try {
      o = check.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << check.first
              << " -- " << o.detail << std::endl;
  }
  if (!ran) {
    std::cerr << "unknown criterion: " << wanted << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
