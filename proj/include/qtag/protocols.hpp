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

// End-to-end transmission pipelines for GHZ states over collective-rotation
// channels.
//
//   PassiveDirect  source -> channels
//   PassiveTagged  source -> T_V -> channels -> T_H -> keep "all bins == 1"
//   ActivePC       source -> T_V -> channels -> PC decoder -> sigma_z(path 1)
//
// Every outcome keeps all herald branches, including the rejected ones, so
// the probability bookkeeping can be audited.

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtag/hilbert.hpp"
#include "qtag/optics.hpp"

namespace qtag {

// Tolerance on |alpha|^2 + |beta|^2 = 1.
inline constexpr double kCoefficientTolerance = 1e-12;

class SourceCoefficients {
 public:
  SourceCoefficients(Complex alpha, Complex beta);

  /// alpha = 1/sqrt2, beta = -1/sqrt2.
  static SourceCoefficients balanced();

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }

 private:
  Complex alpha_;
  Complex beta_;
};

enum class Variant { PassiveDirect, PassiveTagged, ActivePC };

std::string_view to_string(Variant v);
/// Accepts "passive-direct", "passive-tagged" and "active".
std::optional<Variant> parse_variant(std::string_view name);

struct ProtocolSpec {
  std::size_t n_parties = 2;
  SourceCoefficients coeffs = SourceCoefficients::balanced();
  Variant variant = Variant::PassiveTagged;
  std::vector<RotationAngle> thetas;
  PcEfficiency eta{};

  /// Throws SpecError / DimensionError on violated invariants.
  void validate() const;
};

/// Per-photon herald labels as a digit string, photon 0 first. Tagged and
/// direct runs use time-bin digits ("11" is the accepted event); active runs
/// use output-path digits, '2' for path 2 and '1' for path 1.
class HeraldPattern {
 public:
  HeraldPattern() = default;
  explicit HeraldPattern(std::string digits) : digits_(std::move(digits)) {}

  static HeraldPattern bins_of(const BasisKet& ket);
  static HeraldPattern paths_of(const BasisKet& ket);

  const std::string& str() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  std::size_t count(char label) const;

  auto operator<=>(const HeraldPattern&) const = default;

 private:
  std::string digits_;
};

struct Branch {
  /// Normalized conditional state; left unnormalized when the branch is
  /// too improbable to normalize.
  PureState state;
  double probability = 0.0;
  /// Absent when probability <= kDegenerateNorm.
  std::optional<double> fidelity;
};

struct TransmissionOutcome {
  Variant variant = Variant::PassiveTagged;
  std::size_t n_parties = 0;
  std::map<HeraldPattern, Branch> branches;
  /// The single accepted pattern for tagged runs; empty when every branch
  /// counts as a success (direct and active runs).
  std::optional<HeraldPattern> accepted;
  double loss_factor = 1.0;
  /// Accepted probability times loss_factor.
  double total_success_probability = 0.0;
  /// Probability-weighted fidelity over resolvable accepted branches.
  std::optional<double> overall_fidelity_of_accepted;

  double branch_probability_sum() const;
  bool is_accepted(const HeraldPattern& pattern) const;
};

/// alpha |H...H> + beta |V...V>, all photons in bin 0 on the default path.
PureState build_source(std::size_t n, const SourceCoefficients& coeffs);

/// T_V on every photon.
PureState encode(const PureState& s);

/// rotation_map(thetas[i]) on photon i.
PureState apply_channels(const PureState& s,
                         std::span<const RotationAngle> thetas);

/// T_H on every photon.
PureState decode_passive(const PureState& s);

/// Active decoder on every photon, then sigma_z on path 1 if requested.
PureState decode_active(const PureState& s, bool correct_path_phase = true);

TransmissionOutcome run_passive_direct(const ProtocolSpec& spec);
TransmissionOutcome run_passive_tagged(const ProtocolSpec& spec);
TransmissionOutcome run_active(const ProtocolSpec& spec);
/// run_active without the path-1 sigma_z correction.
TransmissionOutcome run_active_without_correction(const ProtocolSpec& spec);

/// Dispatches on spec.variant.
TransmissionOutcome run(const ProtocolSpec& spec);

}  // namespace qtag
