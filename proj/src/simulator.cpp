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

#include "coxf/simulator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coxf/exact.hpp"

namespace coxf {
namespace {

struct Collected {
  std::vector<double> finish_times;
  std::vector<Index> stragglers;
  std::vector<Index> arrival_order;
  std::vector<Index> used_subset;
  Index retries = 0;
  double decode_start = 0.0;
};

// Master side of one job: wait for the earliest n results, and keep taking
// one more arrival at a time while the received rows are rank deficient.
Collected collect_results(const CodingMatrix& code, const std::vector<double>& work,
                          const StragglerModel& model, Rng& rng) {
  const Index m = code.workers();
  const Index n = code.blocks();
  Collected c;
  const auto flags = model.draw(m, rng);
  c.finish_times.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double base = work[i] * model.base_rate;
    if (flags[i]) {
      c.stragglers.push_back(i);
      c.finish_times[i] = std::isinf(model.slow_factor) ? model.slow_factor : base * model.slow_factor;
    } else {
      c.finish_times[i] = base;
    }
    if (std::isfinite(c.finish_times[i])) c.arrival_order.push_back(i);
  }
  std::stable_sort(c.arrival_order.begin(), c.arrival_order.end(),
                   [&](Index a, Index b) { return c.finish_times[a] < c.finish_times[b]; });

  const Index arrived = static_cast<Index>(c.arrival_order.size());
  if (arrived < n) {
    throw DecodeError("insufficient results: " + std::to_string(arrived) + " of " +
                          std::to_string(n) + " needed workers returned",
                      0, 0, 0);
  }
  for (Index k = n; k <= arrived; ++k) {
    std::vector<Index> received(c.arrival_order.begin(), c.arrival_order.begin() + k);
    const CoefficientMatrix rows = code.rows(received);
    if (!has_full_column_rank(rows)) continue;
    if (k == n) {
      c.used_subset = received;
    } else {
      for (Index r : independent_rows(rows)) c.used_subset.push_back(received[r]);
    }
    std::sort(c.used_subset.begin(), c.used_subset.end());
    c.retries = k - n;
    c.decode_start = c.finish_times[received.back()];
    return c;
  }
  throw DecodeError("insufficient results: received workers never determine every block", 0, 0,
                    0);
}

DecodeReport decode_collected(const CodingMatrix& code, const DenseMatrix& all_results,
                              const std::vector<Index>& used, Index output_rows) {
  DenseMatrix results(all_results.rows(), static_cast<Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) results.col(static_cast<Index>(k)) = all_results.col(used[k]);
  const ReceivedSet received(code, used, std::move(results), output_rows);
  if (const auto width = code.diagonal_width()) return diagonal_decode(received, *width);
  return hybrid_decode(received);
}

double relative_error(const Vector& estimate, const Vector& truth) {
  const double den = truth.norm();
  const double num = (estimate - truth).norm();
  return den == 0.0 ? num : num / den;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(what) + " must be positive");
}

}  // namespace

std::string_view to_string(StragglerKind kind) {
  switch (kind) {
    case StragglerKind::kFixedSet: return "fixed-set";
    case StragglerKind::kBernoulli: return "bernoulli";
    case StragglerKind::kDelay: return "delay-distribution";
    case StragglerKind::kRandomSet: return "random-set";
  }
  return "fixed-set";
}

void StragglerModel::validate(Index m) const {
  check_positive(base_rate, "base rate");
  check_positive(slow_factor, "slow factor");
  switch (kind) {
    case StragglerKind::kFixedSet:
      for (Index w : workers) {
        if (w < 0 || w >= m) throw InvalidArgument("straggler worker index out of range");
      }
      break;
    case StragglerKind::kBernoulli:
    case StragglerKind::kDelay:
      if (!(probability >= 0.0 && probability <= 1.0)) {
        throw InvalidArgument("straggler probability must lie in [0, 1]");
      }
      if (kind == StragglerKind::kDelay && std::isinf(slow_factor)) {
        throw InvalidArgument("delay model needs a finite slow factor");
      }
      break;
    case StragglerKind::kRandomSet:
      if (count < 0 || count > m) throw InvalidArgument("random straggler count out of range");
      break;
  }
}

std::vector<char> StragglerModel::draw(Index m, Rng& rng) const {
  validate(m);
  std::vector<char> flags(static_cast<std::size_t>(m), 0);
  switch (kind) {
    case StragglerKind::kFixedSet:
      for (Index w : workers) flags[w] = 1;
      break;
    case StragglerKind::kBernoulli:
    case StragglerKind::kDelay:
      for (Index i = 0; i < m; ++i) flags[i] = rng.bernoulli(probability) ? 1 : 0;
      break;
    case StragglerKind::kRandomSet:
      for (Index w : rng.sample_without_replacement(m, count)) flags[w] = 1;
      break;
  }
  return flags;
}

StragglerModel parse_straggler_model(std::string_view text) {
  StragglerModel model;
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  try {
    if (kind == "none") {
      return model;
    }
    if (kind == "fixed") {
      model.kind = StragglerKind::kFixedSet;
      std::stringstream ss(arg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const long long id = std::stoll(item);
        if (id < 1) throw InvalidArgument("worker ids are 1-based");
        model.workers.push_back(static_cast<Index>(id - 1));
      }
      return model;
    }
    if (kind == "bernoulli") {
      model.kind = StragglerKind::kBernoulli;
      model.probability = std::stod(arg);
      return model;
    }
    if (kind == "delay") {
      model.kind = StragglerKind::kDelay;
      model.probability = std::stod(arg);
      model.slow_factor = 10.0;
      return model;
    }
    if (kind == "random") {
      model.kind = StragglerKind::kRandomSet;
      model.count = static_cast<Index>(std::stoll(arg));
      return model;
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) throw;
    throw InvalidArgument("bad straggler model argument: " + std::string(text));
  }
  throw InvalidArgument("unknown straggler model: " + std::string(text));
}

JobTrace run_transform(const DataMatrix& a, const Vector& x, const CodingMatrix& code,
                       const StragglerModel& model, std::uint64_t seed) {
  if (a.cols() != x.size()) throw InvalidArgument("x length does not match A");
  const BlockPartition parts = partition(a, code.blocks());
  const auto assignments = encode(parts, code);

  const Index m = code.workers();
  std::vector<double> work(static_cast<std::size_t>(m));
  DenseMatrix all_results(parts.block_rows(), m);
  for (Index i = 0; i < m; ++i) {
    work[i] = static_cast<double>(assignments[i].useless() ? 0 : assignments[i].coded_block.work());
    all_results.col(i) = block_multiply(assignments[i].coded_block, x);
  }

  Rng rng(seed);
  Collected c = collect_results(code, work, model, rng);

  JobTrace trace;
  trace.decode_report = decode_collected(code, all_results, c.used_subset, a.rows());
  trace.finish_times = std::move(c.finish_times);
  trace.stragglers = std::move(c.stragglers);
  trace.arrival_order = std::move(c.arrival_order);
  trace.used_subset = std::move(c.used_subset);
  trace.retries = c.retries;
  trace.decode_start = c.decode_start;
  trace.decode_time = static_cast<double>(trace.decode_report.scalar_ops) * model.base_rate;
  trace.job_time = trace.decode_start + trace.decode_time;

  const Vector truth = block_multiply(a, x);
  trace.error = relative_error(trace.decode_report.output, truth);
  trace.verified = trace.error <= kOutputTolerance;
  return trace;
}

double default_step_size(const DataMatrix& a) {
  DenseMatrix gram;
  if (a.is_sparse()) {
    gram = DenseMatrix(a.sparse().transpose() * a.sparse());
  } else {
    gram = a.dense().transpose() * a.dense();
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(gram, Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().maxCoeff();
  if (!(top > 0.0)) throw InvalidArgument("A^T A has no positive eigenvalue");
  return 1.0 / top;
}

GdTrace run_coded_gd(const DataMatrix& a, const Vector& b, const CodingMatrix& code, double eta,
                     Index iterations, const StragglerModel& model, std::uint64_t seed,
                     const GdOptions& options) {
  if (b.size() != a.rows()) throw InvalidArgument("b length does not match A");
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be non-negative");
  if (iterations < 0) throw InvalidArgument("iteration count must be non-negative");

  const Index n = code.blocks();
  const Index m = code.workers();
  const Index t = a.cols();
  const BlockPartition parts = partition(a, n);

  // A^T b is the constant term of every update.
  Vector atb = Vector::Zero(t);
  std::vector<double> block_work(static_cast<std::size_t>(n));
  const Index h = parts.block_rows();
  for (Index j = 0; j < n; ++j) {
    const Vector bj = b.segment(j * h, std::min(h, a.rows() - j * h)).eval();
    Vector padded = Vector::Zero(h);
    padded.head(bj.size()) = bj;
    const DataMatrix& aj = parts.blocks[j];
    atb += aj.is_sparse() ? Vector(aj.sparse().transpose() * padded)
                          : Vector(aj.dense().transpose() * padded);
    block_work[j] = 2.0 * static_cast<double>(aj.work());
  }
  std::vector<double> work(static_cast<std::size_t>(m), 0.0);
  for (Index i = 0; i < m; ++i)
    for (Index j : code.row_support(i)) work[i] += block_work[j];

  const DenseMatrix coefficients = code.coefficients().cast<double>();
  const Rng root(seed);
  GdTrace trace;
  trace.eta = eta;
  Vector x = Vector::Zero(t);
  if (options.keep_iterates) trace.iterates.push_back(x);
  double clock = 0.0;

  for (Index it = 0; it < iterations; ++it) {
    DenseMatrix block_grads(t, n);
    for (Index j = 0; j < n; ++j) {
      const DataMatrix& aj = parts.blocks[j];
      if (aj.is_sparse()) {
        block_grads.col(j) = aj.sparse().transpose() * (aj.sparse() * x);
      } else {
        block_grads.col(j) = aj.dense().transpose() * (aj.dense() * x);
      }
    }
    // Worker i returns sum_j M(i,j) A_j^T A_j x.
    const DenseMatrix worker_results = block_grads * coefficients.transpose();

    Rng rng = root.split(static_cast<std::uint64_t>(it));
    const Collected c = collect_results(code, work, model, rng);
    const DecodeReport report = decode_collected(code, worker_results, c.used_subset, n * t);

    const Vector gradient = report.blocks.rowwise().sum() - atb;
    GdIteration row;
    row.iteration = it;
    row.gradient_norm = (eta * gradient).squaredNorm();
    row.retries = c.retries;
    row.rooting_steps = report.rooting_steps;
    clock += c.decode_start + static_cast<double>(report.scalar_ops) * model.base_rate;
    row.time = clock;
    trace.iterations.push_back(row);

    x -= eta * gradient;
    if (options.keep_iterates) trace.iterates.push_back(x);
  }
  trace.final_x = x;
  return trace;
}

DataMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return DataMatrix(std::move(m));
}

DataMatrix random_sparse_matrix(Index rows, Index cols, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
  Rng rng(seed);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (rng.bernoulli(density)) triplets.emplace_back(i, j, rng.normal());
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return DataMatrix(std::move(m));
}

Vector random_gaussian_vector(Index size, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

ExperimentReport compare_schemes(const CompareConfig& config) {
  if (config.n < 1 || config.rows < config.n || config.cols < 1) {
    throw InvalidArgument("compare: need 1 <= n <= rows and cols >= 1");
  }
  if (config.trials < 1) throw InvalidArgument("compare: trials must be at least 1");

  std::vector<SchemeConfig> schemes;
  if (config.include_uncoded) {
    SchemeConfig uncoded;
    uncoded.name = "uncoded";
    uncoded.spec.family = CodeFamily::kIdentity;
    uncoded.spec.n = config.n;
    schemes.push_back(uncoded);
  }
  for (const auto& s : config.schemes) schemes.push_back(s);

  ExperimentReport report;
  for (Index trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
    const DataMatrix a = config.density >= 1.0
                             ? random_gaussian_matrix(config.rows, config.cols, trial_seed)
                             : random_sparse_matrix(config.rows, config.cols, config.density,
                                                    trial_seed);
    const Vector x = random_gaussian_vector(config.cols, derive_seed(trial_seed, 1));
    const std::uint64_t straggler_seed = derive_seed(trial_seed, 2);

    for (std::size_t k = 0; k < schemes.size(); ++k) {
      SchemeTrial row;
      row.scheme = schemes[k].name;
      row.trial = trial;
      try {
        CodeSpec spec = schemes[k].spec;
        spec.n = config.n;
        spec.seed = derive_seed(trial_seed, 100 + k);
        const CodingMatrix code = make_code(spec);
        row.load = computation_load(code);
        const JobTrace trace = run_transform(a, x, code, config.model, straggler_seed);
        row.success = trace.verified;
        row.job_time = trace.job_time;
        row.retries = trace.retries;
        row.rooting_steps = trace.decode_report.rooting_steps;
        row.error = trace.error;
        if (!trace.verified) row.failure = "output mismatch";
      } catch (const DecodeError& e) {
        row.failure = e.what();
      }
      report.trials.push_back(row);
    }
  }

  for (const auto& scheme : schemes) {
    SchemeSummary s;
    s.scheme = scheme.name;
    Index retried = 0;
    double rooting = 0.0;
    bool first = true;
    for (const auto& row : report.trials) {
      if (row.scheme != scheme.name) continue;
      ++s.trials;
      if (!row.success) continue;
      ++s.successes;
      s.mean_job_time += row.job_time;
      s.min_job_time = first ? row.job_time : std::min(s.min_job_time, row.job_time);
      s.max_job_time = first ? row.job_time : std::max(s.max_job_time, row.job_time);
      first = false;
      retried += row.retries > 0 ? 1 : 0;
      rooting += static_cast<double>(row.rooting_steps);
    }
    if (s.successes > 0) {
      s.mean_job_time /= static_cast<double>(s.successes);
      s.retry_fraction = static_cast<double>(retried) / static_cast<double>(s.successes);
      s.mean_rooting_steps = rooting / static_cast<double>(s.successes);
    }
    report.summaries.push_back(s);
  }
  return report;
}

}  // namespace coxf
