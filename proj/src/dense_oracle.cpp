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

#include "qtag/dense_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtag::oracle {

namespace {

constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

std::size_t slot(Polarization pol, int bin, Path path) {
  const std::size_t p = path == Path::One ? 0 : 1;
  const std::size_t q = pol == H ? 0 : 1;
  return p * 6 + q * 3 + static_cast<std::size_t>(bin);
}

Polarization slot_pol(std::size_t s) { return (s % 6) / 3 == 0 ? H : V; }
int slot_bin(std::size_t s) { return static_cast<int>(s % 3); }
Path slot_path(std::size_t s) { return s / 6 == 0 ? Path::One : Path::Two; }

ElementMatrix identity_matrix() {
  ElementMatrix m{};
  for (std::size_t i = 0; i < kSlots; ++i) m[i][i] = 1.0;
  return m;
}

ElementMatrix rotation_matrix(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ElementMatrix m{};
  for (Path p : {Path::One, Path::Two}) {
    for (int b = 0; b < 3; ++b) {
      const auto h = slot(H, b, p);
      const auto v = slot(V, b, p);
      m[h][h] = c;
      m[h][v] = s;
      m[v][h] = -s;
      m[v][v] = c;
    }
  }
  return m;
}

// Delay matrices leave bin-2 inputs of the delayed polarization as zero
// columns; the pipelines never populate them.
ElementMatrix tag_v_matrix() {
  ElementMatrix m{};
  for (Path p : {Path::One, Path::Two}) {
    for (int b = 0; b < 3; ++b) m[slot(H, b, p)][slot(H, b, p)] = 1.0;
    m[slot(V, 0, p)][slot(V, 1, p)] = 1.0;
    m[slot(V, 1, p)][slot(V, 2, p)] = 1.0;
  }
  return m;
}

ElementMatrix tag_h_matrix() {
  ElementMatrix m{};
  for (Path p : {Path::One, Path::Two}) {
    for (int b = 0; b < 3; ++b) m[slot(V, b, p)][slot(V, b, p)] = 1.0;
    m[slot(H, 0, p)][slot(H, 1, p)] = 1.0;
    m[slot(H, 1, p)][slot(H, 2, p)] = 1.0;
  }
  return m;
}

// PBS splits H/V; PC0 flips the undelayed slot, PC_T the delayed one, so
// early-V and late-H leave through the flipped port (path 1); T_H then
// brings every H component into the same slot as the V components.
ElementMatrix decoder_matrix() {
  ElementMatrix m{};
  m[slot(H, 0, Path::Two)][slot(H, 1, Path::Two)] = 1.0;
  m[slot(V, 1, Path::Two)][slot(V, 1, Path::Two)] = 1.0;
  m[slot(V, 0, Path::Two)][slot(H, 1, Path::One)] = 1.0;
  m[slot(H, 1, Path::Two)][slot(V, 1, Path::One)] = 1.0;
  return m;
}

ElementMatrix sigma_z_path1_matrix() {
  ElementMatrix m = identity_matrix();
  for (int b = 0; b < 3; ++b) m[slot(V, b, Path::One)][slot(V, b, Path::One)] = -1.0;
  return m;
}

DenseState::DenseState(std::size_t n_photons) : n_(n_photons) {
  if (n_photons == 0 || n_photons > kMaxDensePhotons) {
    throw std::invalid_argument("dense oracle supports 1..5 photons");
  }
  amps_.assign(ipow(kSlots, n_photons), Complex{});
}

DenseState DenseState::from_sparse(const PureState& s) {
  DenseState d(s.n_photons());
  std::vector<std::size_t> slots(s.n_photons());
  for (const auto& [ket, amp] : s.amplitudes()) {
    for (std::size_t i = 0; i < ket.size(); ++i) {
      const PhotonMode m = ket[i];
      slots[i] = slot(m.pol, m.bin.ticks, m.path);
    }
    d.at(slots) += amp;
  }
  return d;
}

DenseState DenseState::ghz(std::size_t n, Complex alpha, Complex beta) {
  DenseState d(n);
  std::vector<std::size_t> hs(n, slot(H, 0, Path::Two));
  std::vector<std::size_t> vs(n, slot(V, 0, Path::Two));
  d.at(hs) += alpha;
  d.at(vs) += beta;
  return d;
}

Complex& DenseState::at(std::span<const std::size_t> slots) {
  std::size_t flat = 0;
  for (std::size_t s : slots) flat = flat * kSlots + s;
  return amps_.at(flat);
}

Complex DenseState::at(std::span<const std::size_t> slots) const {
  std::size_t flat = 0;
  for (std::size_t s : slots) flat = flat * kSlots + s;
  return amps_.at(flat);
}

std::vector<std::size_t> DenseState::decode(std::size_t flat) const {
  std::vector<std::size_t> out(n_);
  for (std::size_t i = n_; i-- > 0;) {
    out[i] = flat % kSlots;
    flat /= kSlots;
  }
  return out;
}

void DenseState::apply(std::size_t photon, const ElementMatrix& m) {
  if (photon >= n_) throw std::out_of_range("photon index");
  // Photon `photon` is digit (n-1-photon) counting from the least
  // significant end.
  const std::size_t stride = ipow(kSlots, n_ - 1 - photon);
  const std::size_t block = stride * kSlots;
  std::vector<Complex> out(amps_.size());
  for (std::size_t base = 0; base < amps_.size(); base += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (std::size_t in = 0; in < kSlots; ++in) {
        const Complex a = amps_[base + in * stride + inner];
        if (a == Complex{}) continue;
        for (std::size_t o = 0; o < kSlots; ++o) {
          if (m[in][o] != Complex{}) out[base + o * stride + inner] += m[in][o] * a;
        }
      }
    }
  }
  amps_ = std::move(out);
}

void DenseState::apply_all(const ElementMatrix& m) {
  for (std::size_t i = 0; i < n_; ++i) apply(i, m);
}

double DenseState::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

double max_abs_difference(const DenseState& dense, const PureState& sparse) {
  if (dense.n_photons() != sparse.n_photons()) {
    throw std::invalid_argument("photon count mismatch");
  }
  const DenseState other = DenseState::from_sparse(sparse);
  double worst = 0.0;
  for (std::size_t i = 0; i < dense.dimension(); ++i) {
    worst = std::max(worst, std::abs(dense.amplitudes()[i] - other.amplitudes()[i]));
  }
  return worst;
}

std::map<std::string, double> max_abs_difference_by_paths(const DenseState& dense,
                                                          const PureState& sparse) {
  if (dense.n_photons() != sparse.n_photons()) {
    throw std::invalid_argument("photon count mismatch");
  }
  const DenseState other = DenseState::from_sparse(sparse);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < dense.dimension(); ++i) {
    std::string key;
    for (std::size_t sl : dense.decode(i)) key += slot_path(sl) == Path::One ? '1' : '2';
    double& worst = out[key];
    worst = std::max(worst, std::abs(dense.amplitudes()[i] - other.amplitudes()[i]));
  }
  return out;
}

std::map<std::string, DenseBranch> branches(const DenseState& s,
                                            HeraldKind kind, Complex alpha,
                                            Complex beta) {
  std::map<std::string, Complex> overlap;
  std::map<std::string, DenseBranch> out;
  for (std::size_t flat = 0; flat < s.dimension(); ++flat) {
    const Complex a = s.amplitudes()[flat];
    if (a == Complex{}) continue;
    const auto slots = s.decode(flat);
    std::string key;
    bool all_h = true;
    bool all_v = true;
    for (std::size_t sl : slots) {
      if (kind == HeraldKind::Bins) {
        key += static_cast<char>('0' + slot_bin(sl));
      } else {
        key += slot_path(sl) == Path::One ? '1' : '2';
      }
      all_h = all_h && slot_pol(sl) == H;
      all_v = all_v && slot_pol(sl) == V;
    }
    out[key].probability += std::norm(a);
    if (all_h) overlap[key] += std::conj(alpha) * a;
    if (all_v) overlap[key] += std::conj(beta) * a;
  }
  // Ratios of computed norms, so rounding in alpha and beta cancels.
  const double total = s.norm_squared();
  const double target = std::norm(alpha) + std::norm(beta);
  for (auto& [key, b] : out) {
    if (b.probability > 0.0) b.fidelity = std::norm(overlap[key]) / (b.probability * target);
    b.probability /= total;
  }
  return out;
}

DenseState run_direct(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas) {
  DenseState d = DenseState::ghz(n, alpha, beta);
  for (std::size_t i = 0; i < n; ++i) d.apply(i, rotation_matrix(thetas[i]));
  return d;
}

DenseState run_tagged(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas) {
  DenseState d = DenseState::ghz(n, alpha, beta);
  d.apply_all(tag_v_matrix());
  for (std::size_t i = 0; i < n; ++i) d.apply(i, rotation_matrix(thetas[i]));
  d.apply_all(tag_h_matrix());
  return d;
}

DenseState run_active(std::size_t n, Complex alpha, Complex beta,
                      std::span<const double> thetas, bool correct) {
  DenseState d = DenseState::ghz(n, alpha, beta);
  d.apply_all(tag_v_matrix());
  for (std::size_t i = 0; i < n; ++i) d.apply(i, rotation_matrix(thetas[i]));
  d.apply_all(decoder_matrix());
  if (correct) d.apply_all(sigma_z_path1_matrix());
  return d;
}

}  // namespace qtag::oracle
