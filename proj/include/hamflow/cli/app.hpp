// Copyright 2026 The HamFlow Authors
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

#pragma once

namespace hamflow::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kAcceptance = 2, kNumerical = 3 };

/// Entry point of the `hamflow` tool; returns the process exit status.
int run(int argc, char** argv);

}  // namespace hamflow::cli
