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

// Serialization of outcomes, sweeps and verification reports. Layouts are
// documented in docs/output-formats.md.

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qtag/analysis.hpp"
#include "qtag/protocols.hpp"

namespace qtag::io {

/// Numbers are written with 17 significant digits so they parse back
/// exactly.
std::string format_double(double value);

void write_sweep_csv(const SweepResult& result, std::ostream& os);

/// Column values of a sweep CSV, one array per row in column order.
std::vector<std::array<double, 7>> read_sweep_csv(std::istream& is);

nlohmann::json to_json(const SweepResult& result);
nlohmann::json to_json(const ProtocolSpec& spec,
                       const TransmissionOutcome& outcome);
nlohmann::json to_json(const VerifyOptions& options,
                       const VerifyReport& report);

/// One line per branch: pattern,accepted,probability,fidelity.
void write_outcome_csv(const TransmissionOutcome& outcome, std::ostream& os);

/// Writes to a sibling temporary file, then renames it over path.
void write_atomically(const std::filesystem::path& path,
                      std::string_view contents);

}  // namespace qtag::io
