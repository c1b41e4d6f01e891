// Copyright 2026 The qtag Authors
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

namespace qtag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Photon-count mismatch or out-of-range photon index.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Normalizing a state whose norm is indistinguishable from zero.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

// Time-bin/path registers do not factor out of the polarization state.
class EntangledRegisterError : public Error {
 public:
  using Error::Error;
};

// An optical element was driven outside the modes it is defined on.
class ProtocolMisuseError : public Error {
 public:
  using Error::Error;
};

// Invalid protocol parameters (party count, coefficients, efficiency).
class SpecError : public Error {
 public:
  using Error::Error;
};

// Output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtag
