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

#include "qtag/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qtag {

namespace {

constexpr Polarization H = Polarization::H;
constexpr Polarization V = Polarization::V;

// Shifts one polarization component by a slot, on every bin and path.
ModeMap delay(Polarization delayed) {
  ModeMap m;
  for (Path path : {Path::One, Path::Two}) {
    for (int bin = 0; bin < kMaxTimeBin; ++bin) {
      m.map(mode(delayed, bin, path), {{1.0, mode(delayed, bin + 1, path)}});
    }
    m.forbid(mode(delayed, kMaxTimeBin, path),
             "tag would delay a photon beyond bin " +
                 std::to_string(kMaxTimeBin));
  }
  return m;
}

}  // namespace

RotationAngle::RotationAngle(double radians) : radians_(radians) {
  if (!std::isfinite(radians)) {
    throw SpecError("rotation angle must be finite");
  }
}

double RotationAngle::reduced() const {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(radians_, two_pi);
  if (r < 0) r += two_pi;
  return r;
}

PcEfficiency::PcEfficiency(double eta) : eta_(eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw SpecError("Pockels-cell efficiency must lie in [0, 1], got " +
                    std::to_string(eta));
  }
}

ModeMap rotation_map(RotationAngle theta) {
  const double c = std::cos(theta.radians());
  const double s = std::sin(theta.radians());
  ModeMap m;
  for (Path path : {Path::One, Path::Two}) {
    for (int bin = 0; bin <= kMaxTimeBin; ++bin) {
      const auto h = mode(H, bin, path);
      const auto v = mode(V, bin, path);
      m.map(h, {{c, h}, {s, v}});
      m.map(v, {{-s, h}, {c, v}});
    }
  }
  return m;
}

ModeMap tag_v() { return delay(V); }

ModeMap tag_h() { return delay(H); }

ModeMap active_decoder_map() {
  ModeMap m;
  m.map(mode(H, 0), {{1.0, mode(H, 1, Path::Two)}});
  m.map(mode(V, 1), {{1.0, mode(V, 1, Path::Two)}});
  m.map(mode(V, 0), {{1.0, mode(H, 1, Path::One)}});
  m.map(mode(H, 1), {{1.0, mode(V, 1, Path::One)}});
  for (Polarization pol : {H, V}) {
    m.forbid(mode(pol, 2), "decoder input must be in bin 0 or 1");
    for (int bin = 0; bin <= kMaxTimeBin; ++bin) {
      m.forbid(mode(pol, bin, Path::One),
               "decoder input must be on the default path");
    }
  }
  return m;
}

ModeMap sigma_z_path1() {
  ModeMap m;
  for (int bin = 0; bin <= kMaxTimeBin; ++bin) {
    const auto v = mode(V, bin, Path::One);
    m.map(v, {{-1.0, v}});
  }
  return m;
}

double pc_loss_factor(PcEfficiency eta, std::size_t n_photons) {
  if (n_photons == 0) throw SpecError("pc_loss_factor needs n_photons >= 1");
  return std::pow(eta.value(), static_cast<double>(n_photons));
}

}  // namespace qtag
