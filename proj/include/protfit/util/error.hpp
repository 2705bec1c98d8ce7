// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
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

#include <stdexcept>
#include <string>

namespace protfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (FASTA, A2M, CSV, mutation codes, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a semantic rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Model or training configuration is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Stored container failed its integrity check.
class ChecksumError : public Error {
 public:
  using Error::Error;
};

/// Tensor extents disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite gradient, all-masked softmax row).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace protfit
