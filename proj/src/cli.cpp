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

#include "coxf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "coxf/analysis.hpp"
#include "coxf/codes.hpp"
#include "coxf/decoder.hpp"
#include "coxf/matrix_io.hpp"
#include "coxf/serialization.hpp"
#include "coxf/simulator.hpp"

namespace coxf {
namespace {

constexpr const char* kMcColumns =
    "CSV columns: family,n,m,trials,protocol,seed,full_rank_count,full_rank_fraction,"
    "matching_count,coefficient_misses,rank_without_matching,mean_load_per_worker,load_stddev";
constexpr const char* kAuditColumns =
    "CSV columns: n,m,s,load,load_bound,load_slack,recovery_threshold,threshold_bound,"
    "threshold_slack";
constexpr const char* kTraceColumns =
    "CSV columns (one row per worker): worker,finish_time,straggler,arrival_rank,used";
constexpr const char* kGdColumns =
    "CSV columns (one row per iteration): iteration,time,gradient_norm,retries,rooting_steps";
constexpr const char* kCompareColumns =
    "CSV columns (one row per trial and scheme): trial,scheme,success,job_time,retries,"
    "rooting_steps,load,error,failure. --summary: scheme,trials,successes,mean_job_time,"
    "min_job_time,max_job_time,retry_fraction,mean_rooting_steps";
constexpr const char* kCodeColumns = "CSV columns: worker,block,coefficient (1-based)";

// Data seeds are derived from --seed so one value fixes a whole run.
constexpr std::uint64_t kMatrixStream = 1;
constexpr std::uint64_t kVectorStream = 2;
constexpr std::uint64_t kStragglerStream = 3;

struct SpecFlags {
  std::string family = "s-diagonal";
  Index n = 0;
  Index m = 0;
  Index s = 0;
  double p = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  Coefficient coefficient_set_size = kDefaultCoefficientSetSize;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f, bool with_n = true) {
  cmd->add_option("--family", f.family,
                  "s-diagonal | one-diagonal | p-bernoulli | cross | identity")
      ->capture_default_str();
  if (with_n) cmd->add_option("--n", f.n, "number of data blocks");
  cmd->add_option("--m", f.m, "number of workers");
  cmd->add_option("--s", f.s, "straggler tolerance (s-diagonal)");
  cmd->add_option("--p", f.p, "entry probability (p-bernoulli)");
  cmd->add_option("--d1", f.d1, "row picks (cross)");
  cmd->add_option("--d2", f.d2, "column picks (cross)");
  cmd->add_option("--coeff-set-size", f.coefficient_set_size,
                  "coefficients are drawn from {1..size}")
      ->capture_default_str();
}

// Optional parameters are set only when given on `cmd`'s command line.
CodeSpec to_spec(const SpecFlags& f, const CLI::App* cmd, Index n, std::uint64_t seed,
                 std::optional<Index> m = std::nullopt) {
  CodeSpec spec;
  spec.family = parse_code_family(f.family);
  spec.n = n;
  if (cmd->count("--m")) spec.m = f.m;
  if (m) spec.m = m;
  if (cmd->count("--s")) spec.s = f.s;
  if (cmd->count("--p")) spec.p = f.p;
  if (cmd->count("--d1")) spec.d1 = f.d1;
  if (cmd->count("--d2")) spec.d2 = f.d2;
  spec.coefficient_set_size = f.coefficient_set_size;
  spec.seed = seed;
  spec.validate();
  return spec;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("COXF_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("COXF_SEED must be a non-negative integer");
  }
  return 0;
}

void add_output(CLI::App* cmd, std::string& out, std::string& format) {
  cmd->add_option("-o,--out", out, "output path, '-' for stdout")->capture_default_str();
  cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

class Output {
 public:
  explicit Output(std::ostream& out) : out_(out) {}
  void write(const std::string& path, const std::string& text) const {
    if (path == "-") {
      out_ << text;
    } else {
      write_text_file(path, text);
    }
  }

 private:
  std::ostream& out_;
};

std::vector<Index> to_zero_based(const std::vector<Index>& ids, Index limit, const char* what) {
  std::vector<Index> out;
  for (Index id : ids) {
    if (id < 1 || id > limit) {
      throw InvalidArgument(std::string(what) + " " + std::to_string(id) + " out of range 1.." +
                            std::to_string(limit));
    }
    out.push_back(id - 1);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"coxf: coded distributed linear transforms"};
  app.name("coxf");
  app.require_subcommand(1);
  const Output sink(out);

  std::uint64_t seed = 0;
  SpecFlags spec_flags;
  std::string out_path = "-";
  std::string format = "json";
  std::string code_path;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "seed for every random draw (default: $COXF_SEED or 0)");
  };
  auto code_from_flags = [&](const CLI::App* cmd) -> CodingMatrix {
    if (!code_path.empty()) return read_coding_matrix(code_path);
    return make_code(to_spec(spec_flags, cmd, spec_flags.n, seed));
  };

  // gen-code
  auto* gen = app.add_subcommand("gen-code", "construct a coding matrix");
  add_spec_flags(gen, spec_flags);
  add_seed(gen);
  add_output(gen, out_path, format);
  bool verify = false;
  Index max_trials = 100;
  gen->add_flag("--verify", verify,
                "redraw until every n-subset of workers is invertible (diagonal families)");
  gen->add_option("--max-trials", max_trials, "redraw budget for --verify")->capture_default_str();
  gen->footer(kCodeColumns);

  // encode
  auto* enc = app.add_subcommand("encode", "split A into blocks and write each worker's coded block");
  add_spec_flags(enc, spec_flags);
  add_seed(enc);
  std::string matrix_path, out_dir, x_path, results_path;
  enc->add_option("--code", code_path, "coding matrix JSON (instead of code flags)");
  enc->add_option("--matrix", matrix_path, "A as Matrix Market or CSV")->required();
  enc->add_option("--out-dir", out_dir, "directory for worker-<i>.mtx and manifest.json")
      ->required();
  enc->add_option("--x", x_path, "also compute every worker's result for this vector");
  enc->add_option("--results", results_path,
                  "with --x: block_rows x m result matrix (default <out-dir>/results.mtx)");

  // decode
  auto* dec = app.add_subcommand("decode", "recover Ax from n worker results");
  add_spec_flags(dec, spec_flags);
  add_seed(dec);
  std::vector<Index> worker_ids;
  Index output_rows = 0;
  std::string method_name = "hybrid";
  std::string root_selection = "lowest";
  std::string report_path;
  dec->add_option("--code", code_path, "coding matrix JSON (instead of code flags)");
  dec->add_option("--results", results_path,
                  "result matrix: one column per worker (all m, or the n listed)")
      ->required();
  dec->add_option("--workers", worker_ids, "the n received workers, 1-based")
      ->delimiter(',')
      ->required();
  dec->add_option("--output-rows", output_rows, "rows of A")->required();
  dec->add_option("--method", method_name, "hybrid | diagonal-schedule | inverse")
      ->capture_default_str();
  dec->add_option("--root-selection", root_selection, "lowest | random")
      ->check(CLI::IsMember({"lowest", "random"}))
      ->capture_default_str();
  dec->add_option("-o,--out", out_path, "decoded Ax, one value per line")->capture_default_str();
  dec->add_option("--report", report_path, "decode report JSON");

  // mc-rank
  auto* mc = app.add_subcommand("mc-rank", "Monte Carlo full-rank probability of random n-subsets");
  add_spec_flags(mc, spec_flags, false);
  add_seed(mc);
  add_output(mc, out_path, format);
  std::vector<Index> n_values;
  Index trials = 1000;
  unsigned jobs = 1;
  Index m_offset = 0;
  std::string protocol = "resample";
  mc->add_option("--n", n_values, "block count; a comma list runs a sweep")
      ->delimiter(',')
      ->required();
  auto* offset_opt = mc->add_option("--m-offset", m_offset, "m = n + offset (for sweeps)");
  mc->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
  mc->add_option("--jobs", jobs, "worker threads; output does not depend on it")
      ->capture_default_str();
  mc->add_option("--protocol", protocol,
                 "resample: new code and subset per trial; fixed: one code, new subsets")
      ->check(CLI::IsMember({"resample", "fixed"}))
      ->capture_default_str();
  mc->footer(kMcColumns);

  // audit
  auto* aud = app.add_subcommand("audit", "exact recovery threshold and load against lower bounds");
  add_spec_flags(aud, spec_flags);
  add_seed(aud);
  add_output(aud, out_path, format);
  aud->add_option("--code", code_path,
                  "coding matrix JSON (instead of code flags); --s then sets the straggler "
                  "count to audit, default the code's own s");
  aud->footer(kAuditColumns);

  // simulate / gd shared data flags
  Index rows = 400, cols = 40;
  double density = 1.0;
  std::string b_path;
  std::string straggler_text = "none";
  double slow_factor = 0.0, base_rate = 0.0;
  std::string csv_path;
  auto add_data_flags = [&](CLI::App* cmd) {
    cmd->add_option("--code", code_path, "coding matrix JSON (instead of code flags)");
    cmd->add_option("--matrix", matrix_path, "A as Matrix Market or CSV (default: random)");
    cmd->add_option("--rows", rows, "rows of random A")->capture_default_str();
    cmd->add_option("--cols", cols, "columns of random A")->capture_default_str();
    cmd->add_option("--density", density, "density of random A; 1 means dense Gaussian")
        ->capture_default_str();
    cmd->add_option("--stragglers", straggler_text,
                    "none | fixed:1,3 | bernoulli:P | delay:P | random:K")
        ->capture_default_str();
    cmd->add_option("--slow-factor", slow_factor, "straggler slowdown (default: result lost)");
    cmd->add_option("--base-rate", base_rate, "virtual seconds per scalar operation");
    cmd->add_option("--csv", csv_path, "also write the CSV table here");
  };
  auto build_model = [&]() {
    StragglerModel model = parse_straggler_model(straggler_text);
    if (slow_factor != 0.0) model.slow_factor = slow_factor;
    if (base_rate != 0.0) model.base_rate = base_rate;
    return model;
  };
  auto load_matrix = [&]() {
    if (!matrix_path.empty()) return read_matrix(matrix_path);
    const auto s = derive_seed(seed, kMatrixStream);
    return density >= 1.0 ? random_gaussian_matrix(rows, cols, s)
                          : random_sparse_matrix(rows, cols, density, s);
  };

  auto* sim = app.add_subcommand("simulate", "one coded job y = Ax in virtual time");
  add_spec_flags(sim, spec_flags);
  add_seed(sim);
  add_output(sim, out_path, format);
  add_data_flags(sim);
  sim->add_option("--x", x_path, "x as CSV (default: random)");
  sim->footer(kTraceColumns);

  auto* gd = app.add_subcommand("gd", "coded gradient descent for least squares");
  add_spec_flags(gd, spec_flags);
  add_seed(gd);
  add_output(gd, out_path, format);
  add_data_flags(gd);
  bool uncoded = false;
  double eta = -1.0;
  Index iterations = 100;
  gd->add_option("--b", b_path, "b as CSV (default: random)");
  gd->add_flag("--uncoded", uncoded, "identity code over n workers");
  gd->add_option("--eta", eta, "step size (default 1/lambda_max(A^T A))");
  gd->add_option("--iterations", iterations, "iterations")->capture_default_str();
  gd->footer(kGdColumns);

  auto* cmp = app.add_subcommand("compare", "coded schemes against the uncoded baseline");
  std::string config_path, summary_path;
  add_output(cmp, out_path, format);
  cmp->add_option("--config", config_path, "experiment JSON")->required();
  cmp->add_option("--summary", summary_path, "per-scheme summary CSV");
  cmp->footer(kCompareColumns);

  try {
    seed = default_seed();
    std::vector<std::string> argv_storage;
    argv_storage.push_back("coxf");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitValidation;
    }

    if (gen->parsed()) {
      const CodeSpec spec = to_spec(spec_flags, gen, spec_flags.n, seed);
      Json doc;
      CodingMatrix code = [&] {
        if (!verify) return make_code(spec);
        Regenerated r = regenerate_until_valid(spec, max_trials);
        doc["trials_used"] = r.trials_used;
        return std::move(r.code);
      }();
      if (format == "csv") {
        std::string text = "worker,block,coefficient\n";
        for (const auto& e : to_json(code).at("entries")) {
          text += std::to_string(e[0].get<Index>()) + "," + std::to_string(e[1].get<Index>()) +
                  "," + std::to_string(e[2].get<Coefficient>()) + "\n";
        }
        sink.write(out_path, text);
      } else {
        doc.update(to_json(code));
        sink.write(out_path, dump_json(doc));
      }
      return kExitOk;
    }

    if (enc->parsed()) {
      const CodingMatrix code = code_from_flags(enc);
      const DataMatrix a = read_matrix(matrix_path);
      const BlockPartition parts = partition(a, code.blocks());
      const auto assignments = encode(parts, code);
      std::filesystem::create_directories(out_dir);
      Json workers = Json::array();
      for (const auto& as : assignments) {
        const std::string file = "worker-" + std::to_string(as.worker_id + 1) + ".mtx";
        write_matrix(std::filesystem::path(out_dir) / file, as.coded_block);
        Json support = Json::array();
        for (Index j : as.support) support.push_back(j + 1);
        workers.push_back(Json{{"file", file}, {"support", support}, {"worker", as.worker_id + 1}});
      }
      const Json manifest{{"block_rows", parts.block_rows()},
                          {"cols", parts.cols()},
                          {"m", code.workers()},
                          {"n", code.blocks()},
                          {"source_rows", parts.source_rows},
                          {"workers", std::move(workers)}};
      write_text_file((std::filesystem::path(out_dir) / "manifest.json").string(),
                      dump_json(manifest));
      if (!x_path.empty()) {
        const Vector x = read_vector(x_path);
        if (x.size() != a.cols()) throw InvalidArgument("x length does not match A");
        DenseMatrix results(parts.block_rows(), code.workers());
        for (const auto& as : assignments) results.col(as.worker_id) = block_multiply(as.coded_block, x);
        const std::string path =
            results_path.empty() ? (std::filesystem::path(out_dir) / "results.mtx").string()
                                 : results_path;
        write_matrix(path, DataMatrix(std::move(results)));
      }
      return kExitOk;
    }

    if (dec->parsed()) {
      const CodingMatrix code = code_from_flags(dec);
      const std::vector<Index> subset = to_zero_based(worker_ids, code.workers(), "worker");
      const DenseMatrix all = read_matrix(results_path).to_dense();
      DenseMatrix results;
      if (all.cols() == static_cast<Index>(subset.size())) {
        results = all;
      } else if (all.cols() == code.workers()) {
        results.resize(all.rows(), static_cast<Index>(subset.size()));
        for (std::size_t k = 0; k < subset.size(); ++k) results.col(static_cast<Index>(k)) = all.col(subset[k]);
      } else {
        throw InvalidArgument("result matrix needs one column per listed worker or per worker");
      }
      const ReceivedSet rx(code, subset, std::move(results), output_rows);
      DecodeOptions options;
      options.seed = seed;
      options.root_selection =
          root_selection == "random" ? RootSelection::kRandom : RootSelection::kLowestIndex;
      DecodeReport report;
      switch (parse_decode_method(method_name)) {
        case DecodeMethod::kHybrid: report = hybrid_decode(rx, options); break;
        case DecodeMethod::kInverse: report = inverse_decode(rx); break;
        case DecodeMethod::kDiagonalSchedule: {
          const auto width = code.diagonal_width();
          if (!width) throw InvalidArgument("diagonal-schedule needs a diagonal code");
          report = diagonal_decode(rx, *width);
          break;
        }
      }
      std::ostringstream y;
      write_vector_csv(y, report.output);
      sink.write(out_path, y.str());
      if (!report_path.empty()) write_text_file(report_path, dump_json(to_json(report)));
      return kExitOk;
    }

    if (mc->parsed()) {
      if (trials < 1) throw InvalidArgument("--trials must be at least 1");
      if (jobs < 1) throw InvalidArgument("--jobs must be at least 1");
      if (offset_opt->count() && mc->count("--m")) {
        throw InvalidArgument("give --m or --m-offset, not both");
      }
      std::vector<McReport> reports;
      for (Index n : n_values) {
        const CodeSpec spec =
            to_spec(spec_flags, mc, n, seed,
                    offset_opt->count() ? std::optional<Index>(n + m_offset) : std::nullopt);
        if (protocol == "fixed") {
          McReport r = probabilistic_threshold_estimate(make_code(spec), trials,
                                                        derive_seed(seed, kStragglerStream), jobs);
          r.spec = spec;
          reports.push_back(r);
        } else {
          reports.push_back(rank_experiment(spec, trials, jobs));
        }
      }
      if (format == "csv") {
        std::string text = mc_report_csv_header();
        for (const auto& r : reports) text += mc_report_csv_row(r);
        sink.write(out_path, text);
      } else if (reports.size() == 1) {
        sink.write(out_path, dump_json(to_json(reports.front())));
      } else {
        Json list = Json::array();
        for (const auto& r : reports) list.push_back(to_json(r));
        sink.write(out_path, dump_json(Json{{"reports", std::move(list)}}));
      }
      return kExitOk;
    }

    if (aud->parsed()) {
      const CodingMatrix code = code_from_flags(aud);
      Index s = aud->count("--s") ? spec_flags.s : -1;
      if (s < 0) {
        const auto width = code.diagonal_width();
        if (!width) throw InvalidArgument("--s is required for non-diagonal codes");
        s = *width;
      }
      const AuditRecord record = lower_bound_audit(code, s);
      sink.write(out_path, format == "csv" ? audit_csv_header() + audit_csv_row(record)
                                           : dump_json(to_json(record)));
      return kExitOk;
    }

    if (sim->parsed()) {
      const CodingMatrix code = code_from_flags(sim);
      const DataMatrix a = load_matrix();
      const Vector x =
          x_path.empty() ? random_gaussian_vector(a.cols(), derive_seed(seed, kVectorStream))
                         : read_vector(x_path);
      const JobTrace trace =
          run_transform(a, x, code, build_model(), derive_seed(seed, kStragglerStream));
      const std::string csv = job_trace_csv(trace);
      sink.write(out_path, format == "csv" ? csv : dump_json(to_json(trace)));
      if (!csv_path.empty()) write_text_file(csv_path, csv);
      if (!trace.verified) {
        err << "coxf: decoded output differs from Ax (relative error " << trace.error << ")\n";
        return kExitDecodeInfeasible;
      }
      return kExitOk;
    }

    if (gd->parsed()) {
      const DataMatrix a = load_matrix();
      const CodingMatrix code = [&] {
        if (!uncoded) return code_from_flags(gd);
        Index n = spec_flags.n;
        if (!code_path.empty()) n = read_coding_matrix(code_path).blocks();
        if (n < 1) throw InvalidArgument("--uncoded needs --n or --code");
        return make_identity(n);
      }();
      const Vector b = b_path.empty()
                           ? random_gaussian_vector(a.rows(), derive_seed(seed, kVectorStream))
                           : read_vector(b_path);
      const double step = eta < 0.0 ? default_step_size(a) : eta;
      const GdTrace trace = run_coded_gd(a, b, code, step, iterations, build_model(),
                                         derive_seed(seed, kStragglerStream));
      const std::string csv = gd_trace_csv(trace);
      sink.write(out_path, format == "csv" ? csv : dump_json(to_json(trace)));
      if (!csv_path.empty()) write_text_file(csv_path, csv);
      return kExitOk;
    }

    if (cmp->parsed()) {
      const CompareConfig config = compare_config_from_json(read_json_file(config_path));
      const ExperimentReport report = compare_schemes(config);
      sink.write(out_path, format == "csv" ? experiment_trials_csv(report)
                                           : dump_json(to_json(report)));
      if (!summary_path.empty()) write_text_file(summary_path, experiment_summary_csv(report));
      return kExitOk;
    }
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    err << "coxf: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DecodeError& e) {
    err << "coxf: decode infeasible: " << e.what() << "\n";
    return kExitDecodeInfeasible;
  } catch (const SingularMatrix& e) {
    err << "coxf: decode infeasible: " << e.what() << "\n";
    return kExitDecodeInfeasible;
  } catch (const EnumerationLimit& e) {
    err << "coxf: " << e.what() << "\n";
    return kExitEnumerationGuard;
  } catch (const std::exception& e) {
    err << "coxf: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace coxf
