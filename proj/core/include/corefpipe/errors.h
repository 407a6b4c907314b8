// Copyright 2026 The corefpipe Authors.
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

#ifndef COREFPIPE_ERRORS_H_
#define COREFPIPE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace corefpipe {

// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Inconsistent or missing data (documents, datasets, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

// Checkpoint, vocabulary or numerical problems in a model.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace corefpipe

#endif  // COREFPIPE_ERRORS_H_
