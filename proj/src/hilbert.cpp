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

#include "qtag/hilbert.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace qtag {

namespace {

constexpr std::uint64_t kNibble = 0xF;

unsigned shift_for(std::size_t size, std::size_t photon) {
  return static_cast<unsigned>(4 * (size - 1 - photon));
}

// Registers of one ket with the polarization masked out.
std::vector<std::pair<TimeBin, Path>> registers_of(const BasisKet& ket) {
  std::vector<std::pair<TimeBin, Path>> out;
  out.reserve(ket.size());
  for (const auto& m : ket.modes()) out.emplace_back(m.bin, m.path);
  return out;
}

std::vector<Polarization> polarizations_of(const BasisKet& ket) {
  std::vector<Polarization> out;
  out.reserve(ket.size());
  for (const auto& m : ket.modes()) out.push_back(m.pol);
  return out;
}

// Polarization-only amplitudes, after checking the registers factor out.
std::map<std::vector<Polarization>, Complex> polarization_part(
    const PureState& s, const char* which) {
  std::optional<std::vector<std::pair<TimeBin, Path>>> common;
  std::map<std::vector<Polarization>, Complex> out;
  for (const auto& [ket, amp] : s.amplitudes()) {
    auto regs = registers_of(ket);
    if (!common) {
      common = std::move(regs);
    } else if (regs != *common) {
      throw EntangledRegisterError(
          std::string(which) +
          ": time-bin/path registers differ between kets (" + ket.label() +
          "); polarization fidelity is undefined");
    }
    out[polarizations_of(ket)] += amp;
  }
  return out;
}

}  // namespace

std::size_t PhotonMode::index() const {
  return static_cast<std::size_t>(pol) * 6 +
         static_cast<std::size_t>(bin.ticks) * 2 +
         static_cast<std::size_t>(path);
}

PhotonMode PhotonMode::from_index(std::size_t index) {
  if (index >= kModeCount) {
    throw DimensionError("photon mode index " + std::to_string(index) +
                         " out of range");
  }
  return PhotonMode{static_cast<Polarization>(index / 6),
                    TimeBin{static_cast<int>((index % 6) / 2)},
                    static_cast<Path>(index % 2)};
}

std::string PhotonMode::label() const {
  std::string out = pol == Polarization::H ? "H" : "V";
  if (bin.ticks > 0) out += "_" + std::string(bin.ticks, 'T');
  if (path == Path::One) out += "^1";
  return out;
}

BasisKet::BasisKet(std::span<const PhotonMode> modes) {
  if (modes.size() > kMaxPhotons) {
    throw DimensionError("at most " + std::to_string(kMaxPhotons) +
                         " photons are supported");
  }
  size_ = static_cast<std::uint8_t>(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    if (m.bin.ticks < 0 || m.bin.ticks > kMaxTimeBin) {
      throw DimensionError("time bin " + std::to_string(m.bin.ticks) +
                           " outside [0, 2]");
    }
    packed_ |= static_cast<std::uint64_t>(m.index()) << shift_for(size_, i);
  }
}

BasisKet::BasisKet(std::initializer_list<PhotonMode> modes)
    : BasisKet(std::span<const PhotonMode>(modes.begin(), modes.size())) {}

PhotonMode BasisKet::operator[](std::size_t photon) const {
  if (photon >= size_) {
    throw DimensionError("photon index " + std::to_string(photon) +
                         " out of range for " + std::to_string(size_) +
                         "-photon ket");
  }
  return PhotonMode::from_index((packed_ >> shift_for(size_, photon)) &
                                kNibble);
}

BasisKet BasisKet::with(std::size_t photon, PhotonMode m) const {
  if (photon >= size_) {
    throw DimensionError("photon index " + std::to_string(photon) +
                         " out of range for " + std::to_string(size_) +
                         "-photon ket");
  }
  BasisKet out = *this;
  const auto shift = shift_for(size_, photon);
  out.packed_ &= ~(kNibble << shift);
  out.packed_ |= static_cast<std::uint64_t>(m.index()) << shift;
  return out;
}

std::vector<PhotonMode> BasisKet::modes() const {
  std::vector<PhotonMode> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i]);
  return out;
}

std::string BasisKet::label() const {
  std::string out = "|";
  for (std::size_t i = 0; i < size_; ++i) {
    if (i > 0) out += ' ';
    out += (*this)[i].label();
  }
  return out + ">";
}

PureState::PureState(std::size_t n_photons) : n_photons_(n_photons) {
  if (n_photons == 0 || n_photons > kMaxPhotons) {
    throw DimensionError("photon count must be in [1, " +
                         std::to_string(kMaxPhotons) + "], got " +
                         std::to_string(n_photons));
  }
}

PureState::PureState(std::size_t n_photons, Amplitudes amplitudes)
    : PureState(n_photons) {
  amplitudes_ = std::move(amplitudes);
  for (const auto& [ket, amp] : amplitudes_) check_ket(ket);
  prune();
}

PureState::PureState(std::size_t n_photons,
                     std::initializer_list<std::pair<BasisKet, Complex>> terms)
    : PureState(n_photons) {
  for (const auto& [ket, amp] : terms) {
    check_ket(ket);
    amplitudes_[ket] += amp;
  }
  prune();
}

PureState PureState::basis(const BasisKet& ket, Complex amplitude) {
  PureState s(ket.size());
  s.add(ket, amplitude);
  return s;
}

Complex PureState::amplitude(const BasisKet& ket) const {
  auto it = amplitudes_.find(ket);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

void PureState::add(const BasisKet& ket, Complex amplitude) {
  check_ket(ket);
  auto [it, inserted] = amplitudes_.try_emplace(ket, amplitude);
  if (!inserted) it->second += amplitude;
  if (std::abs(it->second) < kPruneThreshold) amplitudes_.erase(it);
}

PureState& PureState::operator+=(const PureState& other) {
  if (other.n_photons_ != n_photons_) {
    throw DimensionError("cannot add states of " + std::to_string(n_photons_) +
                         " and " + std::to_string(other.n_photons_) +
                         " photons");
  }
  for (const auto& [ket, amp] : other.amplitudes_) amplitudes_[ket] += amp;
  prune();
  return *this;
}

PureState& PureState::operator*=(Complex factor) {
  for (auto& [ket, amp] : amplitudes_) amp *= factor;
  prune();
  return *this;
}

void PureState::check_ket(const BasisKet& ket) const {
  if (ket.size() != n_photons_) {
    throw DimensionError("ket " + ket.label() + " has " +
                         std::to_string(ket.size()) + " photons, state has " +
                         std::to_string(n_photons_));
  }
}

void PureState::prune() {
  std::erase_if(amplitudes_, [](const auto& kv) {
    return std::abs(kv.second) < kPruneThreshold;
  });
}

ModeMap& ModeMap::map(PhotonMode in, std::vector<ModeTerm> out) {
  rules_[in.index()] = Rule{Kind::Mapped, std::move(out), {}};
  return *this;
}

ModeMap& ModeMap::forbid(PhotonMode in, std::string reason) {
  rules_[in.index()] = Rule{Kind::Forbidden, {}, std::move(reason)};
  return *this;
}

bool ModeMap::passes_through(PhotonMode in) const {
  return rules_[in.index()].kind == Kind::PassThrough;
}

bool ModeMap::is_forbidden(PhotonMode in) const {
  return rules_[in.index()].kind == Kind::Forbidden;
}

std::span<const ModeTerm> ModeMap::image(PhotonMode in) const {
  const auto& rule = rules_[in.index()];
  switch (rule.kind) {
    case Kind::Forbidden:
      throw ProtocolMisuseError("mode " + in.label() + ": " + rule.reason);
    case Kind::PassThrough:
      throw std::logic_error("mode " + in.label() + " has no rule");
    case Kind::Mapped:
      break;
  }
  return rule.terms;
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.n_photons() != b.n_photons()) {
    throw DimensionError("inner product of " + std::to_string(a.n_photons()) +
                         "- and " + std::to_string(b.n_photons()) +
                         "-photon states");
  }
  // Walk the smaller map, look up in the larger.
  const bool a_smaller = a.size() <= b.size();
  const auto& small = a_smaller ? a : b;
  const auto& large = a_smaller ? b : a;
  Complex sum{};
  for (const auto& [ket, amp] : small.amplitudes()) {
    const Complex other = large.amplitude(ket);
    sum += a_smaller ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return sum;
}

double norm_squared(const PureState& s) {
  double sum = 0.0;
  for (const auto& [ket, amp] : s.amplitudes()) sum += std::norm(amp);
  return sum;
}

PureState normalize(const PureState& s) {
  const double n2 = norm_squared(s);
  if (!(n2 > kDegenerateNorm)) {
    throw DegenerateStateError(
        "cannot normalize a state with squared norm " + std::to_string(n2) +
        " (zero-probability branch?)");
  }
  PureState out = s;
  out *= 1.0 / std::sqrt(n2);
  return out;
}

PureState apply_single_photon_map(const PureState& s, std::size_t photon,
                                  const ModeMap& map) {
  if (photon >= s.n_photons()) {
    throw DimensionError("photon index " + std::to_string(photon) +
                         " out of range for " + std::to_string(s.n_photons()) +
                         "-photon state");
  }
  PureState::Amplitudes out;
  for (const auto& [ket, amp] : s.amplitudes()) {
    const PhotonMode in = ket[photon];
    if (map.passes_through(in)) {
      out[ket] += amp;
      continue;
    }
    for (const auto& term : map.image(in)) {
      out[ket.with(photon, term.mode)] += term.coeff * amp;
    }
  }
  return PureState(s.n_photons(), std::move(out));
}

Projection project(const PureState& s, const KetPredicate& accept) {
  PureState::Amplitudes kept;
  for (const auto& [ket, amp] : s.amplitudes()) {
    if (accept(ket)) kept.emplace(ket, amp);
  }
  PureState state(s.n_photons(), std::move(kept));
  const double p = norm_squared(state);
  return {std::move(state), p};
}

double fidelity_polarization(const PureState& s, const PureState& target) {
  if (s.n_photons() != target.n_photons()) {
    throw DimensionError("fidelity between " + std::to_string(s.n_photons()) +
                         "- and " + std::to_string(target.n_photons()) +
                         "-photon states");
  }
  const auto state_pol = polarization_part(s, "state");
  const auto target_pol = polarization_part(target, "target");
  Complex overlap{};
  for (const auto& [pols, amp] : target_pol) {
    auto it = state_pol.find(pols);
    if (it != state_pol.end()) overlap += std::conj(amp) * it->second;
  }
  return std::norm(overlap);
}

}  // namespace qtag
