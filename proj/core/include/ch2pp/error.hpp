// Copyright 2026 The ch2pp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ch2pp {

// Root of the library's exception hierarchy. The CLI maps each subclass onto
// a process exit code: UsageError -> 1, DataError -> 2, InvariantError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or an impossible request (k > n, m > n, unknown mode...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Unreadable, malformed, or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ch2pp
