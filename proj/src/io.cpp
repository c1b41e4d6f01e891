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

#include "qtag/io.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace qtag::io {

namespace {

using nlohmann::json;

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json values_json(const SweepValues& v) {
  const auto a = v.as_array();
  json out = json::object();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[std::string(kSweepColumns[i + 1])] = a[i];
  }
  return out;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void write_sweep_csv(const SweepResult& result, std::ostream& os) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
    os << (i ? "," : "") << kSweepColumns[i];
  }
  os << '\n';
  for (const auto& row : result.rows) {
    os << format_double(row.theta);
    for (double v : row.simulated.as_array()) os << ',' << format_double(v);
    os << '\n';
  }
}

std::vector<std::array<double, 7>> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty sweep CSV");
  std::string expected;
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
    expected += (i ? "," : "") + std::string(kSweepColumns[i]);
  }
  if (line != expected) throw IoError("unexpected sweep CSV header: " + line);

  std::vector<std::array<double, 7>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 7> row{};
    std::istringstream fields(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      if (col >= row.size()) throw IoError("too many fields: " + line);
      char* end = nullptr;
      row[col++] = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw IoError("malformed number '" + field + "'");
      }
    }
    if (col != row.size()) throw IoError("too few fields: " + line);
    rows.push_back(row);
  }
  return rows;
}

json to_json(const SweepResult& result) {
  const auto& g = result.grid;
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"theta", r.theta},
                    {"simulated", values_json(r.simulated)},
                    {"closed_form", values_json(r.closed_form)},
                    {"disagreement", r.disagreement},
                    {"P1_rejected", r.p1_rejected},
                    {"P2_rejected", r.p2_rejected}});
  }
  json columns = json::array();
  for (auto c : kSweepColumns) columns.push_back(std::string(c));
  return {{"grid",
           {{"theta_min", g.theta_min},
            {"theta_max", g.theta_max},
            {"steps", g.steps},
            {"alpha", complex_json(g.coeffs.alpha())},
            {"beta", complex_json(g.coeffs.beta())},
            {"eta", g.eta.value()}}},
          {"provenance",
           {{"direct", std::string(to_string(result.provenance.direct))},
            {"tagged", std::string(to_string(result.provenance.tagged))},
            {"active", std::string(to_string(result.provenance.active))}}},
          {"columns", columns},
          {"max_disagreement", result.max_disagreement()},
          {"rows", rows}};
}

json to_json(const ProtocolSpec& spec, const TransmissionOutcome& outcome) {
  json thetas = json::array();
  for (const auto& t : spec.thetas) thetas.push_back(t.radians());

  json branches = json::object();
  for (const auto& [pattern, b] : outcome.branches) {
    json state = json::array();
    for (const auto& [ket, amp] : b.state.amplitudes()) {
      state.push_back({{"ket", ket.label()}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    branches[pattern.str()] = {{"accepted", outcome.is_accepted(pattern)},
                               {"probability", b.probability},
                               {"fidelity", optional_json(b.fidelity)},
                               {"state", state}};
  }
  return {{"protocol", std::string(to_string(spec.variant))},
          {"n_parties", spec.n_parties},
          {"alpha", complex_json(spec.coeffs.alpha())},
          {"beta", complex_json(spec.coeffs.beta())},
          {"thetas", thetas},
          {"eta", spec.eta.value()},
          {"herald", spec.variant == Variant::ActivePC ? "paths" : "bins"},
          {"accepted", outcome.accepted ? json(outcome.accepted->str()) : json(nullptr)},
          {"loss_factor", outcome.loss_factor},
          {"total_success_probability", outcome.total_success_probability},
          {"overall_fidelity_of_accepted",
           optional_json(outcome.overall_fidelity_of_accepted)},
          {"branches", branches}};
}

json to_json(const VerifyOptions& options, const VerifyReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"spec", f.spec}, {"check", f.check}, {"disagreement", f.disagreement}});
  }
  return {{"seed", options.seed},
          {"trials", options.trials},
          {"tolerance", options.tolerance},
          {"skip_path_correction", options.corrupt_path_correction},
          {"specs_checked", report.specs_checked},
          {"max_disagreement", report.max_disagreement},
          {"passed", report.passed()},
          {"failures", failures}};
}

void write_outcome_csv(const TransmissionOutcome& outcome, std::ostream& os) {
  os << "pattern,accepted,probability,fidelity\n";
  for (const auto& [pattern, b] : outcome.branches) {
    os << pattern.str() << ',' << (outcome.is_accepted(pattern) ? 1 : 0) << ','
       << format_double(b.probability) << ','
       << (b.fidelity ? format_double(*b.fidelity) : "nan") << '\n';
  }
}

void write_atomically(const std::filesystem::path& path,
                      std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path tmp =
      path.parent_path() /
      (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into place at " + path.string() + ": " +
                  ec.message());
  }
}

}  // namespace qtag::io
