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

#ifndef EXPO_COMMON_H_
#define EXPO_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace expo {

// Row-major: one row per frame or trait.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Base of every error raised by the library. The CLI maps each subclass to
// its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid counts, ranges or option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the path and the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, int64_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(path),
        line_(line) {}
  const std::string& path() const { return path_; }
  int64_t line() const { return line_; }

 private:
  std::string path_;
  int64_t line_;
};

// Shapes that do not agree.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(what + " " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// An utterance that ends up with no present phonetic trait.
class EmptyUtteranceError : public Error {
 public:
  using Error::Error;
};

// Evidence score requested for a trial with no co-present phone.
class UndefinedEvidenceError : public Error {
 public:
  using Error::Error;
};

// Zero-norm vectors, non-finite values, degenerate statistics.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during training.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace expo

#endif  // EXPO_COMMON_H_
