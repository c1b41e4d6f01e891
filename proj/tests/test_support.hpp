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

// Random generators shared by the property tests and the acceptance suite.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qtag/hilbert.hpp"
#include "qtag/protocols.hpp"

namespace qtag::testing {

inline constexpr double kTol = 1e-12;
inline constexpr double kPi = std::numbers::pi;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double angle() { return uniform(-kPi, kPi); }

  Complex complex_gaussian() {
    std::normal_distribution<double> g;
    return {g(rng_), g(rng_)};
  }

  /// Complex alpha, beta with independent phases.
  SourceCoefficients coefficients() {
    const double mix = uniform(0.0, kPi / 2);
    return {std::polar(std::cos(mix), angle()), std::polar(std::sin(mix), angle())};
  }

  std::vector<RotationAngle> thetas(std::size_t n) {
    std::vector<RotationAngle> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(angle());
    return out;
  }

  ProtocolSpec spec(std::size_t n, Variant variant) {
    ProtocolSpec s;
    s.n_parties = n;
    s.coeffs = coefficients();
    s.variant = variant;
    s.thetas = thetas(n);
    s.eta = PcEfficiency(uniform(0.5, 1.0));
    return s;
  }

  /// Random normalized state supported on the given single-photon modes
  /// (every photon drawn from the same list).
  PureState state(std::size_t n, const std::vector<PhotonMode>& modes,
                  std::size_t terms) {
    PureState s(n);
    for (std::size_t t = 0; t < terms; ++t) {
      std::vector<PhotonMode> ket;
      for (std::size_t i = 0; i < n; ++i) ket.push_back(modes[index(0, modes.size() - 1)]);
      s.add(BasisKet(ket), complex_gaussian());
    }
    return normalize(s);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<PhotonMode> all_modes() {
  std::vector<PhotonMode> out;
  for (std::size_t i = 0; i < kModeCount; ++i) out.push_back(PhotonMode::from_index(i));
  return out;
}

/// Largest amplitude difference over the union of supports.
inline double max_amplitude_diff(const PureState& a, const PureState& b) {
  double worst = 0.0;
  for (const auto& [ket, amp] : a.amplitudes()) worst = std::max(worst, std::abs(amp - b.amplitude(ket)));
  for (const auto& [ket, amp] : b.amplitudes()) worst = std::max(worst, std::abs(amp - a.amplitude(ket)));
  return worst;
}

}  // namespace qtag::testing
