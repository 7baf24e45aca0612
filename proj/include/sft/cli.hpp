// Copyright 2026 The SFT Authors.
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

// Command-line front end. Subcommands: prompts, aggregate, fit, lockfilter,
// theory, report. Shared run settings come from flags or an INI file given
// with --config; flags win.

#ifndef SFT_CLI_HPP_
#define SFT_CLI_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sft {

struct RunConfig {
  std::string category = "carbonated soft drink";
  std::string model_id;
  std::vector<int> templates;  // empty = all eleven
  std::optional<double> tau;
  double alpha = 0.01;
  std::string gamma = "calibrate";  // or a number
  int iterations = 300;
  double epsilon = 1e-9;
  std::uint64_t R = 10000;
  std::uint64_t seed = 123;
  unsigned threads = 1;
  std::vector<std::string> calibration_split;  // brands; empty = all
};

// Returns the process exit code. Failures print one "error: ..." line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sft

#endif  // SFT_CLI_HPP_
