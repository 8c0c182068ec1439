/*
 Copyright 2026 The affinesim Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef AFFINESIM_CLI_HPP
#define AFFINESIM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace affinesim::cli {

enum ExitCode : int {
    kOk = 0,
    kCertificateFail = 1,
    kParseError = 2,
    kDiverged = 3,
    kBudgetExhausted = 4,
    kSolverFail = 5,
};

/// Entry point for the `affinesim` command line; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affinesim::cli

#endif  // AFFINESIM_CLI_HPP
