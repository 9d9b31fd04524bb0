// Copyright 2026 The hsvirial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hsvirial {

/// Base for all failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two spheres overlap by more than the admissibility tolerance.
class OverlapError : public Error {
 public:
  using Error::Error;
};

/// The scheduler cannot continue: simultaneous multi-body contact, event
/// budget exhausted, or no dispersal before the time horizon.
class SchedulingError : public Error {
 public:
  using Error::Error;
};

class MultipleCollisionError : public SchedulingError {
 public:
  using SchedulingError::SchedulingError;
};

class EventLimitError : public SchedulingError {
 public:
  using SchedulingError::SchedulingError;
};

class DispersalTimeoutError : public SchedulingError {
 public:
  using SchedulingError::SchedulingError;
};

/// Hard-core rejection sampling could not place the spheres.
class PackingError : public Error {
 public:
  using Error::Error;
};

/// Malformed trajectory or report file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsvirial
