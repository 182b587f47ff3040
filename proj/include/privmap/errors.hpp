// Copyright 2026 The privmap Authors
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
#ifndef PRIVMAP_ERRORS_HPP_
#define PRIVMAP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace privmap {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PRIVMAP_DEFINE_ERROR(NAME)                               \
  class NAME : public Error {                                    \
   public:                                                       \
    explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
  }

PRIVMAP_DEFINE_ERROR(DomainError);           // dual point outside its domain/box
PRIVMAP_DEFINE_ERROR(LengthMismatch);        // message/observation vectors disagree
PRIVMAP_DEFINE_ERROR(UnsupportedKernel);     // operation requires the count kernel
PRIVMAP_DEFINE_ERROR(InfeasibleProjection);  // feasible-set repair failed
PRIVMAP_DEFINE_ERROR(BarrierViolation);      // constraint slack lost at zero step
PRIVMAP_DEFINE_ERROR(SupportTooLarge);       // exact enumeration would overflow
PRIVMAP_DEFINE_ERROR(SupportMismatch);       // conditional supports differ
PRIVMAP_DEFINE_ERROR(SchemaError);           // CSV schema violated
PRIVMAP_DEFINE_ERROR(EmptyAfterFiltering);   // no usable rows left
PRIVMAP_DEFINE_ERROR(InfeasibleCorrelation); // (H,G) joint would go negative
PRIVMAP_DEFINE_ERROR(BudgetTooLarge);        // epsilon exceeds the prior entropy
PRIVMAP_DEFINE_ERROR(ConfigError);           // run configuration invalid

#undef PRIVMAP_DEFINE_ERROR

}  // namespace privmap

#endif  // PRIVMAP_ERRORS_HPP_
