// Copyright (c) 2026 The ExPO-desk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXPO_TOOLS_CLI_H_
#define EXPO_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "expo/corpus.h"

namespace expo {
namespace cli {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitParse = 5,
  kExitData = 6,
  kExitNumeric = 7,
  kExitGradCheckFailed = 8,
};

// Runs one `expo` invocation. argv[0] is the program name. Errors are
// reported on `err` as a single line:
//   expo: error=<kind> exit=<code> [path=<p>] [line=<n>] message="<text>"
int Run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err);

// A corpus directory holds inventory.txt, features.txt, alignments.txt and
// optionally trials.txt.
void SaveCorpusDir(const std::string& dir, const Corpus& corpus,
                   const TrialList* trials);
Corpus LoadCorpusDir(const std::string& dir);

}  // namespace cli
}  // namespace expo

#endif  // EXPO_TOOLS_CLI_H_
