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

// Command-line front end: `qtag run|sweep|verify`.
//
// Every flag can also come from a JSON file given with --config, using the
// flag name without dashes as the key. Flags given on the command line win
// over the file; keys the command does not know are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtag/analysis.hpp"
#include "qtag/error.hpp"
#include "qtag/protocols.hpp"

namespace qtag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailed = 2;

/// Bad command line or config file; the message names the offending key.
class UsageError : public Error {
 public:
  UsageError(std::string key, const std::string& message)
      : Error("invalid '" + key + "': " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// --help was requested; what() holds the help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

enum class Command { Run, Sweep, Verify };
enum class OutputFormat { Csv, Json };

struct RunConfig {
  Command command = Command::Run;
  ProtocolSpec protocol;
  SweepGrid grid;
  std::optional<std::filesystem::path> output_path;
  OutputFormat output_format = OutputFormat::Csv;
  std::uint64_t seed = 1;
  std::size_t trials = 200;
  /// Mutation hook for `verify`: drop the path-1 sigma_z correction.
  bool skip_path_correction = false;
  /// Sweep worker cap from QTAG_THREADS; 0 means implementation default.
  unsigned threads = 0;
};

/// Angle in radians; a "pi" suffix multiplies by pi ("0.25pi", "-pi").
double parse_angle(std::string_view text, const std::string& key);

/// Real or complex number: "0.6", "-0.5i", "0.6+0.8i".
Complex parse_complex(std::string_view text, const std::string& key);

/// args excludes the program name. QTAG_THREADS is read from the
/// environment.
RunConfig parse_config(const std::vector<std::string>& args);

/// Runs the command, writing files atomically. Returns the exit status.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + execute with error reporting; what main() calls.
int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

}  // namespace qtag::cli
