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

#include "qtag/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace qtag {

namespace {

using Classifier = std::function<HeraldPattern(const BasisKet&)>;

PureState apply_to_all(PureState s, const ModeMap& map) {
  for (std::size_t i = 0; i < s.n_photons(); ++i) {
    s = apply_single_photon_map(s, i, map);
  }
  return s;
}

void require_variant(const ProtocolSpec& spec, Variant expected) {
  spec.validate();
  if (spec.variant != expected) {
    throw SpecError("spec variant is " + std::string(to_string(spec.variant)) +
                    ", expected " + std::string(to_string(expected)));
  }
}

// Groups the final state by herald pattern and packages each group as a
// conditional branch.
TransmissionOutcome package(const ProtocolSpec& spec, const PureState& final,
                            const Classifier& classify,
                            std::optional<HeraldPattern> accepted,
                            double loss_factor) {
  std::map<HeraldPattern, PureState::Amplitudes> groups;
  for (const auto& [ket, amp] : final.amplitudes()) {
    groups[classify(ket)].emplace(ket, amp);
  }

  const PureState target = build_source(spec.n_parties, spec.coeffs);
  TransmissionOutcome out;
  out.variant = spec.variant;
  out.n_parties = spec.n_parties;
  out.accepted = std::move(accepted);
  out.loss_factor = loss_factor;

  // Probabilities and fidelities are taken relative to the computed norms of
  // the final and target states. Both equal 1 up to the rounding already
  // present in alpha and beta, which then cancels instead of leaking into
  // every reported number.
  const double total = norm_squared(final);
  const double target_norm = norm_squared(target);
  for (auto& [pattern, amps] : groups) {
    PureState raw(final.n_photons(), std::move(amps));
    const double weight = norm_squared(raw);
    Branch b{raw, weight / total, std::nullopt};
    if (b.probability > kDegenerateNorm) {
      b.state = normalize(raw);
      b.fidelity = fidelity_polarization(raw, target) / (weight * target_norm);
    }
    out.branches.emplace(pattern, std::move(b));
  }

  double accepted_p = 0.0;
  double resolvable_p = 0.0;
  double weighted_f = 0.0;
  for (const auto& [pattern, b] : out.branches) {
    if (!out.is_accepted(pattern)) continue;
    accepted_p += b.probability;
    if (b.fidelity) {
      resolvable_p += b.probability;
      weighted_f += b.probability * *b.fidelity;
    }
  }
  out.total_success_probability = accepted_p * loss_factor;
  if (resolvable_p > 0.0) {
    out.overall_fidelity_of_accepted = weighted_f / resolvable_p;
  }
  return out;
}

TransmissionOutcome active_pipeline(const ProtocolSpec& spec, bool correct) {
  const PureState sent = encode(build_source(spec.n_parties, spec.coeffs));
  const PureState received = apply_channels(sent, spec.thetas);
  const PureState decoded = decode_active(received, correct);
  return package(spec, decoded, HeraldPattern::paths_of, std::nullopt,
                 pc_loss_factor(spec.eta, spec.n_parties));
}

}  // namespace

SourceCoefficients::SourceCoefficients(Complex alpha, Complex beta)
    : alpha_(alpha), beta_(beta) {
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (!(std::abs(n2 - 1.0) <= kCoefficientTolerance)) {
    throw SpecError("source coefficients must satisfy |alpha|^2+|beta|^2=1, "
                    "got " +
                    std::to_string(n2));
  }
}

SourceCoefficients SourceCoefficients::balanced() {
  const double r = std::numbers::sqrt2 / 2;
  return {r, -r};
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::PassiveDirect:
      return "passive-direct";
    case Variant::PassiveTagged:
      return "passive-tagged";
    case Variant::ActivePC:
      return "active";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::PassiveDirect, Variant::PassiveTagged,
                    Variant::ActivePC}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

void ProtocolSpec::validate() const {
  if (n_parties < 2) {
    throw SpecError("at least two parties are required, got " +
                    std::to_string(n_parties));
  }
  if (n_parties > kMaxPhotons) {
    throw SpecError("at most " + std::to_string(kMaxPhotons) +
                    " parties are supported");
  }
  if (thetas.size() != n_parties) {
    throw DimensionError("expected " + std::to_string(n_parties) +
                         " rotation angles, got " +
                         std::to_string(thetas.size()));
  }
}

HeraldPattern HeraldPattern::bins_of(const BasisKet& ket) {
  std::string d;
  for (const auto& m : ket.modes()) d += static_cast<char>('0' + m.bin.ticks);
  return HeraldPattern(std::move(d));
}

HeraldPattern HeraldPattern::paths_of(const BasisKet& ket) {
  std::string d;
  for (const auto& m : ket.modes()) d += m.path == Path::One ? '1' : '2';
  return HeraldPattern(std::move(d));
}

std::size_t HeraldPattern::count(char label) const {
  return static_cast<std::size_t>(std::ranges::count(digits_, label));
}

double TransmissionOutcome::branch_probability_sum() const {
  double sum = 0.0;
  for (const auto& [pattern, b] : branches) sum += b.probability;
  return sum;
}

bool TransmissionOutcome::is_accepted(const HeraldPattern& pattern) const {
  return !accepted || *accepted == pattern;
}

PureState build_source(std::size_t n, const SourceCoefficients& coeffs) {
  if (n < 2) {
    throw SpecError("a GHZ source needs at least two photons, got " +
                    std::to_string(n));
  }
  std::vector<PhotonMode> hs(n, mode(Polarization::H));
  std::vector<PhotonMode> vs(n, mode(Polarization::V));
  PureState s(n);
  s.add(BasisKet(hs), coeffs.alpha());
  s.add(BasisKet(vs), coeffs.beta());
  return s;
}

PureState encode(const PureState& s) {
  for (const auto& [ket, amp] : s.amplitudes()) {
    for (const auto& m : ket.modes()) {
      if (m.bin.ticks != 0) {
        throw ProtocolMisuseError("encode expects every photon in bin 0, got " +
                                  ket.label());
      }
    }
  }
  return apply_to_all(s, tag_v());
}

PureState apply_channels(const PureState& s,
                         std::span<const RotationAngle> thetas) {
  if (thetas.size() != s.n_photons()) {
    throw DimensionError("expected " + std::to_string(s.n_photons()) +
                         " rotation angles, got " +
                         std::to_string(thetas.size()));
  }
  PureState out = s;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    out = apply_single_photon_map(out, i, rotation_map(thetas[i]));
  }
  return out;
}

PureState decode_passive(const PureState& s) { return apply_to_all(s, tag_h()); }

PureState decode_active(const PureState& s, bool correct_path_phase) {
  PureState out = apply_to_all(s, active_decoder_map());
  if (correct_path_phase) out = apply_to_all(out, sigma_z_path1());
  return out;
}

TransmissionOutcome run_passive_direct(const ProtocolSpec& spec) {
  require_variant(spec, Variant::PassiveDirect);
  const PureState received =
      apply_channels(build_source(spec.n_parties, spec.coeffs), spec.thetas);
  return package(spec, received, HeraldPattern::bins_of, std::nullopt, 1.0);
}

TransmissionOutcome run_passive_tagged(const ProtocolSpec& spec) {
  require_variant(spec, Variant::PassiveTagged);
  const PureState sent = encode(build_source(spec.n_parties, spec.coeffs));
  const PureState decoded = decode_passive(apply_channels(sent, spec.thetas));
  return package(spec, decoded, HeraldPattern::bins_of,
                 HeraldPattern(std::string(spec.n_parties, '1')), 1.0);
}

TransmissionOutcome run_active(const ProtocolSpec& spec) {
  require_variant(spec, Variant::ActivePC);
  return active_pipeline(spec, true);
}

TransmissionOutcome run_active_without_correction(const ProtocolSpec& spec) {
  require_variant(spec, Variant::ActivePC);
  return active_pipeline(spec, false);
}

TransmissionOutcome run(const ProtocolSpec& spec) {
  switch (spec.variant) {
    case Variant::PassiveDirect:
      return run_passive_direct(spec);
    case Variant::PassiveTagged:
      return run_passive_tagged(spec);
    case Variant::ActivePC:
      return run_active(spec);
  }
  throw SpecError("unknown protocol variant");
}

}  // namespace qtag
