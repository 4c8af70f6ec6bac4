// Copyright 2026 The geotweet Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geotweet {

// Root of every error the library raises. Subclasses map onto the failure
// categories callers are expected to tell apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that is not valid JSON, or a present field of the wrong type/range.
class MalformedInput : public Error {
 public:
  explicit MalformedInput(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Coordinates were present but could not be turned into a country.
class ResolverFailure : public Error {
 public:
  using Error::Error;
};

// Transient remote geocoder failure (network, auth, rate limit). Never cached.
class RemoteUnavailable : public Error {
 public:
  using Error::Error;
};

class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class ConflictingEntry : public Error {
 public:
  using Error::Error;
};

class EmptyTrainingSet : public Error {
 public:
  using Error::Error;
};

class CorruptModel : public Error {
 public:
  using Error::Error;
};

class EmptyEvaluationSet : public Error {
 public:
  using Error::Error;
};

class InvalidFoldCount : public Error {
 public:
  using Error::Error;
};

// Dataset violates an evaluation precondition (too few examples or classes).
class InvalidDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace geotweet
