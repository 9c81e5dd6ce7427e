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

#ifndef COXF_SIMULATOR_HPP_
#define COXF_SIMULATOR_HPP_

// Virtual-time master/worker simulation. No threads and no wall clock: every
// duration is an operation count times a rate, so traces are reproducible.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coxf/block_core.hpp"
#include "coxf/codes.hpp"
#include "coxf/decoder.hpp"
#include "coxf/rng.hpp"

namespace coxf {

enum class StragglerKind {
  kFixedSet,   // the listed workers straggle in every job
  kBernoulli,  // each worker straggles independently with `probability`
  kDelay,      // as kBernoulli, but stragglers are slowed, not lost
  kRandomSet,  // exactly `count` workers chosen uniformly per job
};

std::string_view to_string(StragglerKind kind);

struct StragglerModel {
  StragglerKind kind = StragglerKind::kFixedSet;
  std::vector<Index> workers;  // kFixedSet, 0-based
  double probability = 0.0;    // kBernoulli, kDelay
  Index count = 0;             // kRandomSet
  // Virtual seconds per scalar operation, for workers and for decoding.
  double base_rate = 1e-9;
  // A straggler's compute time is multiplied by this; infinity means its
  // result never arrives.
  double slow_factor = std::numeric_limits<double>::infinity();

  static StragglerModel none() { return {}; }

  void validate(Index m) const;

  // Straggler flag per worker for one job.
  std::vector<char> draw(Index m, Rng& rng) const;
};

// "none", "fixed:1,3" (1-based workers), "bernoulli:0.1", "delay:0.2" or
// "random:2". delay defaults to a slow factor of 10, the rest to lost results.
StragglerModel parse_straggler_model(std::string_view text);

struct JobTrace {
  // Per worker; infinity for results that never arrive.
  std::vector<double> finish_times;
  std::vector<Index> stragglers;
  // Workers that returned, earliest first (ties by worker index).
  std::vector<Index> arrival_order;
  // The n workers decoded from, sorted.
  std::vector<Index> used_subset;
  // Arrivals the master waited for beyond the first n.
  Index retries = 0;
  double decode_start = 0.0;
  double decode_time = 0.0;
  double job_time = 0.0;
  DecodeReport decode_report;
  // ||y_hat - Ax|| / ||Ax|| against a direct product.
  double error = 0.0;
  bool verified = false;
};

inline constexpr double kOutputTolerance = 1e-8;

JobTrace run_transform(const DataMatrix& a, const Vector& x, const CodingMatrix& code,
                       const StragglerModel& model, std::uint64_t seed);

struct GdIteration {
  Index iteration = 0;
  // Cumulative virtual time at the end of this iteration.
  double time = 0.0;
  // ||eta * A^T (A x_t - b)||^2 at the iterate entering this iteration.
  double gradient_norm = 0.0;
  Index retries = 0;
  Index rooting_steps = 0;
};

struct GdTrace {
  std::vector<GdIteration> iterations;
  Vector final_x;
  double eta = 0.0;
  // x_0 .. x_iters, when requested.
  std::vector<Vector> iterates;
};

struct GdOptions {
  bool keep_iterates = false;
};

// Least-squares gradient descent x <- x - eta A^T (A x - b) where each worker
// returns sum_j M(i,j) A_j^T A_j x and the master decodes the n block terms.
GdTrace run_coded_gd(const DataMatrix& a, const Vector& b, const CodingMatrix& code, double eta,
                     Index iterations, const StragglerModel& model, std::uint64_t seed,
                     const GdOptions& options = {});

// 1 / lambda_max(A^T A).
double default_step_size(const DataMatrix& a);

struct SchemeConfig {
  std::string name;
  CodeSpec spec;
};

struct CompareConfig {
  Index n = 0;
  Index rows = 0;
  Index cols = 0;
  // 1.0 draws dense Gaussian data; below that, a sparse matrix with this density.
  double density = 1.0;
  StragglerModel model;
  Index trials = 1;
  std::uint64_t seed = 0;
  // Identity code over n workers that waits for all of them.
  bool include_uncoded = true;
  std::vector<SchemeConfig> schemes;
};

struct SchemeTrial {
  std::string scheme;
  Index trial = 0;
  bool success = false;
  double job_time = 0.0;
  Index retries = 0;
  Index rooting_steps = 0;
  Index load = 0;
  double error = 0.0;
  std::string failure;
};

struct SchemeSummary {
  std::string scheme;
  Index trials = 0;
  Index successes = 0;
  double mean_job_time = 0.0;
  double min_job_time = 0.0;
  double max_job_time = 0.0;
  double retry_fraction = 0.0;
  double mean_rooting_steps = 0.0;
};

struct ExperimentReport {
  std::vector<SchemeTrial> trials;
  std::vector<SchemeSummary> summaries;
};

ExperimentReport compare_schemes(const CompareConfig& config);

// Synthetic data used by the CLI and the experiments.
DataMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed);
DataMatrix random_sparse_matrix(Index rows, Index cols, double density, std::uint64_t seed);
Vector random_gaussian_vector(Index size, std::uint64_t seed);

}  // namespace coxf

#endif  // COXF_SIMULATOR_HPP_
