// Copyright 2026 The Authors.
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

#ifndef ADSEED_ERRORS_H_
#define ADSEED_ERRORS_H_

#include <stdexcept>
#include <string>

namespace adseed {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad files, unknown ids, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// A policy spends more than its budget (in expectation or in a realization).
class InfeasiblePolicyError : public Error {
 public:
  using Error::Error;
};

}  // namespace adseed

#endif  // ADSEED_ERRORS_H_
