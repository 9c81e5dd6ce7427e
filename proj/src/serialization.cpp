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

#include "coxf/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace coxf {
namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidArgument(what); }

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_field<T>(j, key);
}

Json index_list(const std::vector<Index>& v) {
  Json out = Json::array();
  for (Index i : v) out.push_back(i + 1);
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) line += ',';
    line += cells[k];
  }
  line += '\n';
  return line;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string str(Index v) { return std::to_string(v); }
std::string str(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string dump_json(const Json& j) { return j.dump() + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path);
  out << text;
  if (!out) bad("error writing " + path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

Json to_json(const CodingMatrix& code) {
  Json entries = Json::array();
  for (Index i = 0; i < code.workers(); ++i)
    for (Index j = 0; j < code.blocks(); ++j)
      if (code(i, j) != 0) entries.push_back(Json::array({i + 1, j + 1, code(i, j)}));
  return Json{{"entries", std::move(entries)},
              {"family", std::string(to_string(code.family()))},
              {"m", code.workers()},
              {"n", code.blocks()},
              {"seed", code.seed()}};
}

CodingMatrix coding_matrix_from_json(const Json& j) {
  if (!j.is_object()) bad("coding matrix must be a JSON object");
  const auto m = get_field<Index>(j, "m");
  const auto n = get_field<Index>(j, "n");
  if (m < 1 || n < 1) bad("coding matrix needs m >= 1 and n >= 1");
  const CodeFamily family = j.contains("family")
                                ? parse_code_family(get_field<std::string>(j, "family"))
                                : CodeFamily::kCustom;
  const auto seed = get_optional<std::uint64_t>(j, "seed").value_or(0);
  const auto& entries = j.contains("entries") ? j.at("entries") : Json::array();
  if (!entries.is_array()) bad("'entries' must be an array");
  CoefficientMatrix coeffs = CoefficientMatrix::Zero(m, n);
  std::set<std::pair<Index, Index>> seen;
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 3) bad("each entry must be [worker, block, coefficient]");
    Index i = 0, b = 0;
    Coefficient c = 0;
    try {
      i = e[0].get<Index>();
      b = e[1].get<Index>();
      c = e[2].get<Coefficient>();
    } catch (const Json::exception&) {
      bad("entry fields must be integers");
    }
    if (i < 1 || i > m || b < 1 || b > n) bad("entry index out of range (indices are 1-based)");
    if (c == 0) bad("entries must have nonzero coefficients");
    if (!seen.emplace(i, b).second) bad("duplicate entry");
    coeffs(i - 1, b - 1) = c;
  }
  return CodingMatrix(std::move(coeffs), family, seed);
}

CodingMatrix read_coding_matrix(const std::string& path) {
  return coding_matrix_from_json(read_json_file(path));
}

Json to_json(const CodeSpec& spec) {
  Json j{{"coefficient_set_size", spec.coefficient_set_size},
         {"family", std::string(to_string(spec.family))},
         {"n", spec.n},
         {"seed", spec.seed}};
  if (spec.m) j["m"] = *spec.m;
  if (spec.s) j["s"] = *spec.s;
  if (spec.p) j["p"] = *spec.p;
  if (spec.d1) j["d1"] = *spec.d1;
  if (spec.d2) j["d2"] = *spec.d2;
  return j;
}

CodeSpec code_spec_from_json(const Json& j) {
  if (!j.is_object()) bad("code spec must be a JSON object");
  CodeSpec spec;
  spec.family = parse_code_family(get_field<std::string>(j, "family"));
  spec.n = get_optional<Index>(j, "n").value_or(0);
  spec.m = get_optional<Index>(j, "m");
  spec.s = get_optional<Index>(j, "s");
  spec.p = get_optional<double>(j, "p");
  spec.d1 = get_optional<double>(j, "d1");
  spec.d2 = get_optional<double>(j, "d2");
  spec.coefficient_set_size =
      get_optional<Coefficient>(j, "coefficient_set_size").value_or(kDefaultCoefficientSetSize);
  spec.seed = get_optional<std::uint64_t>(j, "seed").value_or(0);
  return spec;
}

Json to_json(const DecodeReport& report) {
  return Json{{"method", std::string(to_string(report.method))},
              {"peeling_steps", report.peeling_steps},
              {"residual", report.residual},
              {"rooting_steps", report.rooting_steps},
              {"scalar_ops", report.scalar_ops}};
}

Json to_json(const McReport& r) {
  Json j{{"coefficient_misses", r.coefficient_misses},
         {"full_rank_count", r.full_rank_count},
         {"full_rank_fraction", r.full_rank_fraction},
         {"load_stddev", r.load_stddev},
         {"m", r.m},
         {"matching_count", r.matching_count},
         {"mean_load_per_worker", r.mean_load_per_worker},
         {"n", r.n},
         {"protocol", std::string(to_string(r.protocol))},
         {"rank_without_matching", r.rank_without_matching},
         {"seed", r.seed},
         {"trials", r.trials}};
  if (r.spec) j["spec"] = to_json(*r.spec);
  return j;
}

Json to_json(const AuditRecord& r) {
  return Json{{"load", r.load},
              {"load_bound", r.load_bound},
              {"load_slack", r.load_slack},
              {"m", r.m},
              {"n", r.n},
              {"recovery_threshold", r.recovery_threshold},
              {"s", r.s},
              {"threshold_bound", r.threshold_bound},
              {"threshold_slack", r.threshold_slack}};
}

Json to_json(const StragglerModel& model) {
  Json j{{"base_rate", model.base_rate},
         {"kind", std::string(to_string(model.kind))},
         {"slow_factor", finite_or_null(model.slow_factor)}};
  switch (model.kind) {
    case StragglerKind::kFixedSet: j["workers"] = index_list(model.workers); break;
    case StragglerKind::kBernoulli:
    case StragglerKind::kDelay: j["probability"] = model.probability; break;
    case StragglerKind::kRandomSet: j["count"] = model.count; break;
  }
  return j;
}

StragglerModel straggler_model_from_json(const Json& j) {
  if (j.is_string()) return parse_straggler_model(j.get<std::string>());
  if (!j.is_object()) bad("straggler model must be a string or an object");
  StragglerModel model;
  const auto kind = get_field<std::string>(j, "kind");
  if (kind == "fixed-set" || kind == "fixed") {
    model.kind = StragglerKind::kFixedSet;
    for (Index w : get_optional<std::vector<Index>>(j, "workers").value_or(std::vector<Index>{})) {
      if (w < 1) bad("worker ids are 1-based");
      model.workers.push_back(w - 1);
    }
  } else if (kind == "bernoulli") {
    model.kind = StragglerKind::kBernoulli;
    model.probability = get_field<double>(j, "probability");
  } else if (kind == "delay-distribution" || kind == "delay") {
    model.kind = StragglerKind::kDelay;
    model.probability = get_field<double>(j, "probability");
    model.slow_factor = 10.0;
  } else if (kind == "random-set" || kind == "random") {
    model.kind = StragglerKind::kRandomSet;
    model.count = get_field<Index>(j, "count");
  } else {
    bad("unknown straggler kind: " + kind);
  }
  if (auto rate = get_optional<double>(j, "base_rate")) model.base_rate = *rate;
  if (auto factor = get_optional<double>(j, "slow_factor")) model.slow_factor = *factor;
  return model;
}

Json to_json(const JobTrace& t) {
  Json finish = Json::array();
  for (double v : t.finish_times) finish.push_back(finite_or_null(v));
  return Json{{"arrival_order", index_list(t.arrival_order)},
              {"decode", to_json(t.decode_report)},
              {"decode_start", t.decode_start},
              {"decode_time", t.decode_time},
              {"error", t.error},
              {"finish_times", std::move(finish)},
              {"job_time", t.job_time},
              {"retries", t.retries},
              {"stragglers", index_list(t.stragglers)},
              {"used_subset", index_list(t.used_subset)},
              {"verified", t.verified}};
}

Json to_json(const GdTrace& t) {
  Json rows = Json::array();
  for (const auto& it : t.iterations) {
    rows.push_back(Json{{"gradient_norm", it.gradient_norm},
                        {"iteration", it.iteration},
                        {"retries", it.retries},
                        {"rooting_steps", it.rooting_steps},
                        {"time", it.time}});
  }
  return Json{{"eta", t.eta},
              {"final_x", std::vector<double>(t.final_x.data(), t.final_x.data() + t.final_x.size())},
              {"iterations", std::move(rows)}};
}

Json to_json(const ExperimentReport& report) {
  Json trials = Json::array();
  for (const auto& r : report.trials) {
    trials.push_back(Json{{"error", r.error},
                          {"failure", r.failure},
                          {"job_time", r.job_time},
                          {"load", r.load},
                          {"retries", r.retries},
                          {"rooting_steps", r.rooting_steps},
                          {"scheme", r.scheme},
                          {"success", r.success},
                          {"trial", r.trial}});
  }
  Json summaries = Json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back(Json{{"max_job_time", s.max_job_time},
                             {"mean_job_time", s.mean_job_time},
                             {"mean_rooting_steps", s.mean_rooting_steps},
                             {"min_job_time", s.min_job_time},
                             {"retry_fraction", s.retry_fraction},
                             {"scheme", s.scheme},
                             {"successes", s.successes},
                             {"trials", s.trials}});
  }
  return Json{{"summaries", std::move(summaries)}, {"trials", std::move(trials)}};
}

CompareConfig compare_config_from_json(const Json& j) {
  if (!j.is_object()) bad("compare config must be a JSON object");
  CompareConfig c;
  c.n = get_field<Index>(j, "n");
  c.rows = get_field<Index>(j, "rows");
  c.cols = get_field<Index>(j, "cols");
  c.density = get_optional<double>(j, "density").value_or(1.0);
  c.trials = get_optional<Index>(j, "trials").value_or(1);
  c.seed = get_optional<std::uint64_t>(j, "seed").value_or(0);
  c.include_uncoded = get_optional<bool>(j, "include_uncoded").value_or(true);
  if (j.contains("stragglers")) c.model = straggler_model_from_json(j.at("stragglers"));
  if (j.contains("schemes")) {
    if (!j.at("schemes").is_array()) bad("'schemes' must be an array");
    for (const auto& s : j.at("schemes")) {
      SchemeConfig scheme;
      scheme.spec = code_spec_from_json(s);
      scheme.spec.n = c.n;
      scheme.name = s.contains("name") ? get_field<std::string>(s, "name")
                                       : std::string(to_string(scheme.spec.family));
      scheme.spec.validate();
      c.schemes.push_back(std::move(scheme));
    }
  }
  std::set<std::string> names;
  if (c.include_uncoded) names.insert("uncoded");
  for (const auto& s : c.schemes)
    if (!names.insert(s.name).second) bad("duplicate scheme name: " + s.name);
  return c;
}

std::string mc_report_csv_header() {
  return "family,n,m,trials,protocol,seed,full_rank_count,full_rank_fraction,matching_count,"
         "coefficient_misses,rank_without_matching,mean_load_per_worker,load_stddev\n";
}

std::string mc_report_csv_row(const McReport& r) {
  const std::string family = r.spec ? std::string(to_string(r.spec->family)) : "";
  return join({family, str(r.n), str(r.m), str(r.trials), std::string(to_string(r.protocol)),
               str(r.seed), str(r.full_rank_count), format_double(r.full_rank_fraction),
               str(r.matching_count), str(r.coefficient_misses), str(r.rank_without_matching),
               format_double(r.mean_load_per_worker), format_double(r.load_stddev)});
}

std::string audit_csv_header() {
  return "n,m,s,load,load_bound,load_slack,recovery_threshold,threshold_bound,threshold_slack\n";
}

std::string audit_csv_row(const AuditRecord& r) {
  return join({str(r.n), str(r.m), str(r.s), str(r.load), str(r.load_bound), str(r.load_slack),
               str(r.recovery_threshold), str(r.threshold_bound), str(r.threshold_slack)});
}

std::string job_trace_csv(const JobTrace& t) {
  std::string out = "worker,finish_time,straggler,arrival_rank,used\n";
  std::vector<Index> rank(t.finish_times.size(), 0);
  for (std::size_t k = 0; k < t.arrival_order.size(); ++k) rank[t.arrival_order[k]] = static_cast<Index>(k) + 1;
  for (std::size_t i = 0; i < t.finish_times.size(); ++i) {
    const Index w = static_cast<Index>(i);
    const bool straggler = std::binary_search(t.stragglers.begin(), t.stragglers.end(), w);
    const bool used = std::binary_search(t.used_subset.begin(), t.used_subset.end(), w);
    out += join({str(w + 1), format_double(t.finish_times[i]), straggler ? "1" : "0",
                 rank[i] ? str(rank[i]) : "", used ? "1" : "0"});
  }
  return out;
}

std::string gd_trace_csv(const GdTrace& t) {
  std::string out = "iteration,time,gradient_norm,retries,rooting_steps\n";
  for (const auto& it : t.iterations) {
    out += join({str(it.iteration), format_double(it.time), format_double(it.gradient_norm),
                 str(it.retries), str(it.rooting_steps)});
  }
  return out;
}

std::string experiment_trials_csv(const ExperimentReport& report) {
  std::string out = "trial,scheme,success,job_time,retries,rooting_steps,load,error,failure\n";
  for (const auto& r : report.trials) {
    out += join({str(r.trial), csv_text(r.scheme), r.success ? "1" : "0",
                 format_double(r.job_time), str(r.retries), str(r.rooting_steps), str(r.load),
                 format_double(r.error), csv_text(r.failure)});
  }
  return out;
}

std::string experiment_summary_csv(const ExperimentReport& report) {
  std::string out =
      "scheme,trials,successes,mean_job_time,min_job_time,max_job_time,retry_fraction,"
      "mean_rooting_steps\n";
  for (const auto& s : report.summaries) {
    out += join({csv_text(s.scheme), str(s.trials), str(s.successes),
                 format_double(s.mean_job_time), format_double(s.min_job_time),
                 format_double(s.max_job_time), format_double(s.retry_fraction),
                 format_double(s.mean_rooting_steps)});
  }
  return out;
}

}  // namespace coxf
