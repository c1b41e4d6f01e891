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

// Sparse pure states of N photons. Every photon carries a polarization
// (H/V), a discrete time bin (0, T, 2T) and an output path, so the
// single-photon mode space has 2 x 3 x 2 = 12 modes.

#pragma once

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtag/error.hpp"

namespace qtag {

using Complex = std::complex<double>;

// Amplitudes with magnitude below this are dropped from sparse states.
inline constexpr double kPruneThreshold = 1e-14;
// normalize() refuses states whose squared norm is at or below this.
inline constexpr double kDegenerateNorm = 1e-12;

inline constexpr int kMaxTimeBin = 2;
inline constexpr std::size_t kModeCount = 12;
// Each photon is packed into 4 bits of a 64-bit key.
inline constexpr std::size_t kMaxPhotons = 16;

enum class Polarization : std::uint8_t { H, V };
enum class Path : std::uint8_t { One, Two };

// Arrival slot in units of the tag delay T.
struct TimeBin {
  int ticks = 0;
  auto operator<=>(const TimeBin&) const = default;
};

/// One photon's (polarization, time-bin, path) label. Photons that have not
/// been through an active decoder sit on Path::Two, the straight-through port.
struct PhotonMode {
  Polarization pol = Polarization::H;
  TimeBin bin{};
  Path path = Path::Two;

  auto operator<=>(const PhotonMode&) const = default;

  /// Dense index in [0, 12), ordered consistently with operator<=>.
  std::size_t index() const;
  static PhotonMode from_index(std::size_t index);

  /// Human-readable label such as "H", "V_T" or "H_TT^1".
  std::string label() const;
};

constexpr PhotonMode mode(Polarization pol, int bin = 0,
                          Path path = Path::Two) {
  return PhotonMode{pol, TimeBin{bin}, path};
}

/// Ordered N-photon product ket; photon i belongs to party i.
///
/// Kets of equal length compare lexicographically photon by photon, which
/// is what makes the amplitude map of a PureState canonical.
class BasisKet {
 public:
  BasisKet() = default;
  explicit BasisKet(std::span<const PhotonMode> modes);
  BasisKet(std::initializer_list<PhotonMode> modes);

  std::size_t size() const { return size_; }
  PhotonMode operator[](std::size_t photon) const;
  BasisKet with(std::size_t photon, PhotonMode m) const;
  std::vector<PhotonMode> modes() const;
  std::string label() const;

  auto operator<=>(const BasisKet&) const = default;

 private:
  // Declaration order matters for the defaulted comparison: size first,
  // then the packed modes with photon 0 in the most significant nibble.
  std::uint8_t size_ = 0;
  std::uint64_t packed_ = 0;
};

/// Sparse map from basis kets to complex amplitudes.
class PureState {
 public:
  using Amplitudes = std::map<BasisKet, Complex>;

  /// The zero state on n_photons photons.
  explicit PureState(std::size_t n_photons);
  PureState(std::size_t n_photons, Amplitudes amplitudes);
  PureState(std::size_t n_photons,
            std::initializer_list<std::pair<BasisKet, Complex>> terms);

  static PureState basis(const BasisKet& ket, Complex amplitude = 1.0);

  std::size_t n_photons() const { return n_photons_; }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex amplitude(const BasisKet& ket) const;
  bool empty() const { return amplitudes_.empty(); }
  std::size_t size() const { return amplitudes_.size(); }

  /// Accumulates amplitude onto ket, pruning the result if it cancels.
  void add(const BasisKet& ket, Complex amplitude);

  PureState& operator+=(const PureState& other);
  PureState& operator*=(Complex factor);

  friend PureState operator+(PureState a, const PureState& b) {
    return a += b;
  }
  friend PureState operator*(Complex factor, PureState s) {
    return s *= factor;
  }

 private:
  void check_ket(const BasisKet& ket) const;
  void prune();

  std::size_t n_photons_;
  Amplitudes amplitudes_;
};

struct ModeTerm {
  Complex coeff;
  PhotonMode mode;
};

/// A linear map on one photon, given rule by rule over its input modes.
///
/// Modes without a rule pass through unchanged. Modes marked forbidden make
/// apply_single_photon_map throw ProtocolMisuseError if they carry any
/// amplitude.
class ModeMap {
 public:
  ModeMap& map(PhotonMode in, std::vector<ModeTerm> out);
  ModeMap& forbid(PhotonMode in, std::string reason);

  bool passes_through(PhotonMode in) const;
  bool is_forbidden(PhotonMode in) const;
  /// Output terms of a mapped mode; throws for forbidden modes.
  std::span<const ModeTerm> image(PhotonMode in) const;

 private:
  enum class Kind : std::uint8_t { PassThrough, Mapped, Forbidden };
  struct Rule {
    Kind kind = Kind::PassThrough;
    std::vector<ModeTerm> terms;
    std::string reason;
  };
  std::array<Rule, kModeCount> rules_{};
};

/// <a|b>, conjugate-linear in a.
Complex inner_product(const PureState& a, const PureState& b);

double norm_squared(const PureState& s);

/// Positive real rescaling of s to unit norm.
PureState normalize(const PureState& s);

PureState apply_single_photon_map(const PureState& s, std::size_t photon,
                                  const ModeMap& map);

struct Projection {
  PureState state;  // unnormalized
  double probability;
};

using KetPredicate = std::function<bool(const BasisKet&)>;

/// Restriction of s to the kets accepted by the predicate.
Projection project(const PureState& s, const KetPredicate& accept);

/// |<target|s>|^2 over polarization only.
///
/// The time-bin and path registers of s must be the same product label on
/// every retained ket; otherwise the polarization state is not a pure state
/// on its own and EntangledRegisterError is thrown. The same holds for the
/// target, whose registers are otherwise ignored.
double fidelity_polarization(const PureState& s, const PureState& target);

}  // namespace qtag
