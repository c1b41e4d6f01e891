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

// Dense reference simulator over the full 12^N mode space.
//
// This is the cross-check for the sparse engine, so it deliberately shares
// nothing with it beyond the PhotonMode field definitions: element matrices
// are written out from the optics formulas, the slot ordering differs from
// PhotonMode::index(), and branches are found by decoding slot digits.
// Keep it that way.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtag/hilbert.hpp"

namespace qtag::oracle {

using Complex = std::complex<double>;

inline constexpr std::size_t kSlots = 12;
// 12^5 = 248832 amplitudes.
inline constexpr std::size_t kMaxDensePhotons = 5;

/// m[in][out] is the amplitude sent from slot `in` to slot `out`.
using ElementMatrix = std::array<std::array<Complex, kSlots>, kSlots>;

/// Slot layout: path-major, then polarization, then bin.
std::size_t slot(Polarization pol, int bin, Path path);
Polarization slot_pol(std::size_t s);
int slot_bin(std::size_t s);
Path slot_path(std::size_t s);

ElementMatrix identity_matrix();
ElementMatrix rotation_matrix(double theta);
ElementMatrix tag_v_matrix();
ElementMatrix tag_h_matrix();
ElementMatrix decoder_matrix();
ElementMatrix sigma_z_path1_matrix();

class DenseState {
 public:
  explicit DenseState(std::size_t n_photons);

  static DenseState from_sparse(const PureState& s);
  /// alpha |H..H> + beta |V..V> in bin 0, path 2.
  static DenseState ghz(std::size_t n, Complex alpha, Complex beta);

  std::size_t n_photons() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  Complex& at(std::span<const std::size_t> slots);
  Complex at(std::span<const std::size_t> slots) const;
  const std::vector<Complex>& amplitudes() const { return amps_; }

  /// Slot of each photon for a flat index, photon 0 first.
  std::vector<std::size_t> decode(std::size_t flat) const;

  void apply(std::size_t photon, const ElementMatrix& m);
  void apply_all(const ElementMatrix& m);
  double norm_squared() const;

 private:
  std::size_t n_;
  std::vector<Complex> amps_;
};

/// Max |dense - sparse| over every mode configuration.
double max_abs_difference(const DenseState& dense, const PureState& sparse);

/// The same difference split by output-path pattern ('2' = path 2,
/// '1' = path 1), so a mismatch can be pinned to the branches it touches.
std::map<std::string, double> max_abs_difference_by_paths(const DenseState& dense,
                                                          const PureState& sparse);

enum class HeraldKind { Bins, Paths };

struct DenseBranch {
  double probability = 0.0;
  /// |<target|branch>|^2 / probability, target alpha|H..H> + beta|V..V>.
  double fidelity = 0.0;
};

/// Branch statistics keyed by the digit pattern of bins or paths
/// ('2' = path 2, '1' = path 1).
std::map<std::string, DenseBranch> branches(const DenseState& s,
                                            HeraldKind kind, Complex alpha,
                                            Complex beta);

DenseState run_direct(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas);
DenseState run_tagged(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas);
DenseState run_active(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas, bool correct = true);

}  // namespace qtag::oracle
