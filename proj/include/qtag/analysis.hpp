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

// Closed-form fidelities and efficiencies, angle sweeps that put them next
// to simulated values, and a randomized cross-check against the dense
// oracle.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtag/optics.hpp"
#include "qtag/protocols.hpp"

namespace qtag {

// Agreement tolerance for every simulated-vs-closed-form comparison.
inline constexpr double kAgreementTolerance = 1e-12;

/// Two-party direct-transmission fidelity:
/// |cos a cos b + sin a sin b (conj(beta) alpha + conj(alpha) beta)|^2.
double closed_form_f1(double theta_a, double theta_b,
                      const SourceCoefficients& coeffs);

/// Three-party direct-transmission fidelity:
/// |l1 + l8 (conj(beta) alpha - conj(alpha) beta)|^2 with
/// l1 = cos a cos b cos c and l8 = sin a sin b sin c.
double closed_form_f2(double theta_a, double theta_b, double theta_c,
                      const SourceCoefficients& coeffs);

/// Accepted probability of the tagged scheme: prod cos^2.
double closed_form_p_passive(std::span<const double> thetas);

/// Probability of one output-path pattern of the active scheme:
/// prod over photons of cos^2 (path 2) or sin^2 (path 1).
double closed_form_p_active_branch(std::span<const double> thetas,
                                   const HeraldPattern& paths);

/// eta^n.
double closed_form_loss(PcEfficiency eta, std::size_t n);

/// The closed forms as swappable callables, so harnesses can inject faults.
struct ClosedFormSet {
  std::function<double(double, double, const SourceCoefficients&)> f1 =
      closed_form_f1;
  std::function<double(double, double, double, const SourceCoefficients&)>
      f2 = closed_form_f2;
  std::function<double(std::span<const double>)> p_passive =
      closed_form_p_passive;
  std::function<double(std::span<const double>, const HeraldPattern&)>
      p_active_branch = closed_form_p_active_branch;
  std::function<double(PcEfficiency, std::size_t)> loss = closed_form_loss;
};

/// Uniform grid of shared misalignment angles; all parties get the same
/// angle at every point.
struct SweepGrid {
  double theta_min = 0.0;
  double theta_max = std::numbers::pi;
  std::size_t steps = 101;
  SourceCoefficients coeffs = SourceCoefficients::balanced();
  PcEfficiency eta{};

  void validate() const;
  double theta(std::size_t i) const;
};

enum class Provenance { Simulated, ClosedForm };
std::string_view to_string(Provenance p);

inline constexpr std::array<std::string_view, 7> kSweepColumns = {
    "theta",      "F1_direct",  "F2_direct",     "F_scheme",
    "P1_passive", "P2_passive", "P_active_total"};

struct SweepValues {
  double f1_direct = 0.0;
  double f2_direct = 0.0;
  double f_scheme = 0.0;
  double p1_passive = 0.0;
  double p2_passive = 0.0;
  double p_active_total = 0.0;

  std::array<double, 6> as_array() const {
    return {f1_direct,  f2_direct,  f_scheme,
            p1_passive, p2_passive, p_active_total};
  }
};

struct SweepRow {
  double theta = 0.0;
  /// Column values; simulated for every family that was run.
  SweepValues simulated;
  SweepValues closed_form;
  /// max |simulated - closed_form| over the six value columns.
  double disagreement = 0.0;
  /// Rejected-branch probability mass of the two- and three-party tagged
  /// runs, summed from the simulator (NaN when the family was not run).
  double p1_rejected = 0.0;
  double p2_rejected = 0.0;
};

struct SweepProvenance {
  Provenance direct = Provenance::Simulated;
  Provenance tagged = Provenance::Simulated;
  Provenance active = Provenance::Simulated;
};

struct SweepResult {
  SweepGrid grid;
  SweepProvenance provenance;
  std::vector<SweepRow> rows;

  double max_disagreement() const;
};

struct SweepOptions {
  std::set<Variant> variants = {Variant::PassiveDirect, Variant::PassiveTagged,
                                Variant::ActivePC};
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  ClosedFormSet closed_forms{};
};

/// Runs the two- and three-party pipelines at every grid angle next to the
/// closed forms. Families left out of options.variants are filled from the
/// closed forms and marked Provenance::ClosedForm. Row order follows the
/// grid regardless of threading.
SweepResult sweep(const SweepGrid& grid, const SweepOptions& options = {});

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 200;
  double tolerance = kAgreementTolerance;
  /// Mutation hook: run the active scheme without the path-1 sigma_z.
  bool corrupt_path_correction = false;
  /// Fixed specs checked before the random ones (variant is ignored; every
  /// pipeline is run for each).
  std::vector<ProtocolSpec> extra_specs;
};

struct VerifyFailure {
  std::string spec;
  std::string check;
  double disagreement = 0.0;
};

struct VerifyReport {
  std::size_t specs_checked = 0;
  double max_disagreement = 0.0;
  std::vector<VerifyFailure> failures;

  bool passed() const { return failures.empty(); }
};

/// One-line description of a spec, e.g. "n=3 alpha=(0.6,0) ...".
std::string describe(const ProtocolSpec& spec);

/// Checks every pipeline of one spec against the dense oracle and the
/// closed forms, folding the outcome into report.
void verify_spec(const ProtocolSpec& spec, const VerifyOptions& options,
                 VerifyReport& report);

/// Samples options.trials random specs (n in {2,3,4}, complex
/// coefficients, angles in [-pi, pi)) and verifies each.
VerifyReport verify(const VerifyOptions& options = {});

}  // namespace qtag
