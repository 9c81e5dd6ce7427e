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

#ifndef COXF_CLI_HPP_
#define COXF_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace coxf {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDecodeInfeasible = 3;
inline constexpr int kExitEnumerationGuard = 4;

// Runs the `coxf` command line. `args` excludes the program name; "-" as an
// output path means `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace coxf

#endif  // COXF_CLI_HPP_
