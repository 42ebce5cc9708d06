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

// Small helpers shared by every plain-text reader and writer.

#ifndef EXPO_TEXT_IO_H_
#define EXPO_TEXT_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace expo {

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double value);

// Strict parse of a whole token; nullopt on trailing garbage or overflow.
std::optional<double> ParseDouble(std::string_view token);
std::optional<int64_t> ParseInt(std::string_view token);

// Splits on any run of the given delimiter characters, dropping empty fields.
std::vector<std::string_view> SplitFields(std::string_view line,
                                          std::string_view delims = " \t");

// Splits on every single tab, keeping empty fields.
std::vector<std::string_view> SplitTabs(std::string_view line);

// Reads a whole file into lines (without the trailing '\n'). Throws Error if
// the file cannot be opened.
std::vector<std::string> ReadLines(const std::string& path);

// Writes to "<path>.tmp" and renames over the target, so readers never see a
// half-written file.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace expo

#endif  // EXPO_TEXT_IO_H_
