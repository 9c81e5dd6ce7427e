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

#ifndef COXF_SERIALIZATION_HPP_
#define COXF_SERIALIZATION_HPP_

// JSON documents and flat CSV rows for codes, reports and traces. Worker and
// block indices are 1-based in every serialized form. Objects are written with
// sorted keys so equal values give equal bytes.

#include <string>
#include <vector>

#include "json.hpp"

#include "coxf/analysis.hpp"
#include "coxf/codes.hpp"
#include "coxf/decoder.hpp"
#include "coxf/simulator.hpp"

namespace coxf {

using Json = nlohmann::json;

// Compact single-line dump followed by a newline.
std::string dump_json(const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {entries: [[i, j, c], ...] sorted by (i, j), family, m, n, seed}.
Json to_json(const CodingMatrix& code);
CodingMatrix coding_matrix_from_json(const Json& j);
CodingMatrix read_coding_matrix(const std::string& path);

Json to_json(const CodeSpec& spec);
CodeSpec code_spec_from_json(const Json& j);

Json to_json(const DecodeReport& report);
Json to_json(const McReport& report);
Json to_json(const AuditRecord& record);
Json to_json(const StragglerModel& model);
StragglerModel straggler_model_from_json(const Json& j);
Json to_json(const JobTrace& trace);
Json to_json(const GdTrace& trace);
Json to_json(const ExperimentReport& report);
CompareConfig compare_config_from_json(const Json& j);

// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

// CSV: a header line and one line per record, columns in a fixed order.
std::string mc_report_csv_header();
std::string mc_report_csv_row(const McReport& report);
std::string audit_csv_header();
std::string audit_csv_row(const AuditRecord& record);
// One row per worker.
std::string job_trace_csv(const JobTrace& trace);
// One row per iteration.
std::string gd_trace_csv(const GdTrace& trace);
// One row per (trial, scheme), then a separate summary table.
std::string experiment_trials_csv(const ExperimentReport& report);
std::string experiment_summary_csv(const ExperimentReport& report);

}  // namespace coxf

#endif  // COXF_SERIALIZATION_HPP_
