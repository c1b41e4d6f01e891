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

// Optical elements as single-photon mode maps.

#pragma once

#include <cstddef>

#include "qtag/hilbert.hpp"

namespace qtag {

/// Effective rotation angle of one channel, in radians. Combines the
/// channel's polarization rotation with the receiver's frame misalignment.
class RotationAngle {
 public:
  constexpr RotationAngle() = default;
  explicit RotationAngle(double radians);

  double radians() const { return radians_; }
  /// Angle reduced to [0, 2pi), for reporting only.
  double reduced() const;

 private:
  double radians_ = 0.0;
};

/// Transmission coefficient of one Pockels cell, in [0, 1].
class PcEfficiency {
 public:
  constexpr PcEfficiency() = default;
  explicit PcEfficiency(double eta);

  double value() const { return eta_; }

 private:
  double eta_ = 1.0;
};

/// Collective rotation: H -> cos H + sin V, V -> -sin H + cos V.
ModeMap rotation_map(RotationAngle theta);

/// Delays the V component by one slot. A V component already at the last
/// slot is a protocol-misuse error.
ModeMap tag_v();

/// Delays the H component by one slot.
ModeMap tag_h();

/// Net map of the Pockels-cell decoder (PBS, gated PC0/PC_T, PBS, T_H):
///
///   H, bin 0 -> H, bin 1, path 2      V, bin 1 -> V, bin 1, path 2
///   V, bin 0 -> H, bin 1, path 1      H, bin 1 -> V, bin 1, path 1
///
/// Every output lands in bin 1, so no timing post-selection is needed after
/// it. Photons already in bin 2 or on path 1 are rejected.
ModeMap active_decoder_map();

/// sigma_z on path 1 only; path-2 photons are untouched.
ModeMap sigma_z_path1();

/// eta^n_photons: one lossy Pockels cell per photon.
double pc_loss_factor(PcEfficiency eta, std::size_t n_photons);

}  // namespace qtag
