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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qtag/protocols.hpp"
#include "test_support.hpp"

namespace qtag {
namespace {

using testing::Gen;
using testing::kPi;
using testing::kTol;

constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;
constexpr auto P1 = Path::One;
constexpr auto P2 = Path::Two;
const double kRoot2Inv = 1.0 / std::numbers::sqrt2;

ProtocolSpec make_spec(Variant variant, std::vector<double> thetas,
                       SourceCoefficients coeffs = SourceCoefficients::balanced(), double eta = 1.0) {
  ProtocolSpec spec;
  spec.n_parties = thetas.size();
  spec.variant = variant;
  spec.coeffs = coeffs;
  for (double t : thetas) spec.thetas.emplace_back(t);
  spec.eta = PcEfficiency(eta);
  return spec;
}

std::vector<RotationAngle> angles(std::initializer_list<double> ts) {
  return {ts.begin(), ts.end()};
}

// ---- source, encoding, channels ------------------------------------------

TEST(BuildSourceTest, Examples) {
  const auto product = build_source(2, SourceCoefficients(1.0, 0.0));
  EXPECT_EQ(product.amplitudes().size(), 1u);
  EXPECT_EQ(product.amplitude(BasisKet{mode(H), mode(H)}), Complex(1.0));

  const auto balanced = build_source(2, SourceCoefficients::balanced());
  EXPECT_NEAR(std::abs(balanced.amplitude(BasisKet{mode(H), mode(H)}) - kRoot2Inv), 0.0, kTol);
  EXPECT_NEAR(std::abs(balanced.amplitude(BasisKet{mode(V), mode(V)}) + kRoot2Inv), 0.0, kTol);

  const SourceCoefficients c(Complex(0.6, 0.0), Complex(0.0, 0.8));
  const auto triple = build_source(3, c);
  EXPECT_EQ(triple.amplitude(BasisKet{mode(H), mode(H), mode(H)}), c.alpha());
  EXPECT_EQ(triple.amplitude(BasisKet{mode(V), mode(V), mode(V)}), c.beta());
  EXPECT_NEAR(norm_squared(triple), 1.0, kTol);
}

TEST(BuildSourceTest, Errors) {
  EXPECT_THROW(build_source(1, SourceCoefficients::balanced()), SpecError);
  EXPECT_THROW(SourceCoefficients(1.0, 1.0), SpecError);
}

TEST(EncodeTest, Examples) {
  const PureState hh = PureState::basis(BasisKet{mode(H), mode(H)});
  EXPECT_EQ(encode(hh).amplitudes(), hh.amplitudes());

  const SourceCoefficients c(Complex(0.6, 0.0), Complex(0.0, 0.8));
  for (std::size_t n : {2u, 3u}) {
    const auto enc = encode(build_source(n, c));
    std::vector<PhotonMode> hs(n, mode(H)), vts(n, mode(V, 1));
    const PureState expected(n, {{BasisKet(hs), c.alpha()}, {BasisKet(vts), c.beta()}});
    EXPECT_EQ(enc.amplitudes(), expected.amplitudes()) << n;
  }
}

TEST(EncodeTest, RejectsDelayedInput) {
  EXPECT_THROW(encode(PureState::basis(BasisKet{mode(H, 1), mode(H)})), ProtocolMisuseError);
}

TEST(ApplyChannelsTest, ZeroAnglesAreIdentity) {
  const auto s = encode(build_source(3, SourceCoefficients::balanced()));
  EXPECT_EQ(apply_channels(s, angles({0.0, 0.0, 0.0})).amplitudes(), s.amplitudes());
}

TEST(ApplyChannelsTest, ThreePartyWeights) {
  // Eight polarization branches per source term, weighted by the products
  // of cosines and sines of the three angles.
  const double ta = 0.2, tb = 0.7, tc = -1.3;
  const SourceCoefficients coeffs(Complex(0.6, 0.0), Complex(0.0, 0.8));
  const auto out = apply_channels(encode(build_source(3, coeffs)), angles({ta, tb, tc}));
  const double c[3] = {std::cos(ta), std::cos(tb), std::cos(tc)};
  const double s[3] = {std::sin(ta), std::sin(tb), std::sin(tc)};
  EXPECT_EQ(out.amplitudes().size(), 16u);
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<PhotonMode> a_ket, b_ket;
    double a_w = 1.0, b_w = 1.0;
    for (int i = 0; i < 3; ++i) {
      const bool flipped = (mask >> (2 - i)) & 1;
      a_ket.push_back(mode(flipped ? V : H));
      b_ket.push_back(mode(flipped ? H : V, 1));
      a_w *= flipped ? s[i] : c[i];
      b_w *= flipped ? -s[i] : c[i];
    }
    EXPECT_NEAR(std::abs(out.amplitude(BasisKet(a_ket)) - a_w * coeffs.alpha()), 0.0, kTol);
    EXPECT_NEAR(std::abs(out.amplitude(BasisKet(b_ket)) - b_w * coeffs.beta()), 0.0, kTol);
  }
}

TEST(ApplyChannelsTest, LengthMismatch) {
  const auto s = build_source(2, SourceCoefficients::balanced());
  EXPECT_THROW(apply_channels(s, angles({0.1})), DimensionError);
}

// ---- direct transmission ---------------------------------------------------

TEST(PassiveDirectTest, Examples) {
  auto f = [](std::vector<double> ts) {
    const auto out = run_passive_direct(make_spec(Variant::PassiveDirect, ts));
    EXPECT_EQ(out.branches.size(), 1u);
    EXPECT_NEAR(out.branch_probability_sum(), 1.0, kTol);
    return *out.overall_fidelity_of_accepted;
  };
  EXPECT_NEAR(f({0.0, 0.0}), 1.0, kTol);
  EXPECT_NEAR(f({kPi / 3, kPi / 3}), 0.25, kTol);
  EXPECT_NEAR(f({kPi / 4, kPi / 4, kPi / 4}), 0.125, kTol);
}

TEST(PassiveDirectTest, MatchesInlineFormulasWithComplexCoefficients) {
  Gen gen(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto coeffs = gen.coefficients();
    const Complex a = coeffs.alpha(), b = coeffs.beta();
    const double ta = gen.angle(), tb = gen.angle(), tc = gen.angle();

    const Complex cross2 = std::conj(b) * a + std::conj(a) * b;
    const double f1 = std::norm(std::cos(ta) * std::cos(tb) + std::sin(ta) * std::sin(tb) * cross2);
    const auto two = run_passive_direct(make_spec(Variant::PassiveDirect, {ta, tb}, coeffs));
    EXPECT_NEAR(*two.overall_fidelity_of_accepted, f1, kTol);

    const Complex cross3 = std::conj(b) * a - std::conj(a) * b;
    const double f2 = std::norm(std::cos(ta) * std::cos(tb) * std::cos(tc) +
                                std::sin(ta) * std::sin(tb) * std::sin(tc) * cross3);
    const auto three = run_passive_direct(make_spec(Variant::PassiveDirect, {ta, tb, tc}, coeffs));
    EXPECT_NEAR(*three.overall_fidelity_of_accepted, f2, kTol);
  }
}

TEST(PassiveDirectTest, WrongVariantIsRejected) {
  EXPECT_THROW(run_passive_direct(make_spec(Variant::ActivePC, {0.1, 0.2})), SpecError);
}

// ---- tagged scheme ---------------------------------------------------------

TEST(PassiveTaggedTest, Examples) {
  const auto two = run_passive_tagged(make_spec(Variant::PassiveTagged, {kPi / 4, kPi / 4}));
  ASSERT_TRUE(two.accepted.has_value());
  EXPECT_EQ(two.accepted->str(), "11");
  EXPECT_NEAR(two.total_success_probability, 0.25, kTol);
  EXPECT_NEAR(*two.overall_fidelity_of_accepted, 1.0, kTol);

  const auto three =
      run_passive_tagged(make_spec(Variant::PassiveTagged, {kPi / 4, kPi / 4, kPi / 4}));
  EXPECT_NEAR(three.total_success_probability, 0.125, kTol);
  EXPECT_NEAR(*three.overall_fidelity_of_accepted, 1.0, kTol);
}

TEST(PassiveTaggedTest, RejectedBranchesCarryTheMissingMass) {
  const auto out = run_passive_tagged(make_spec(Variant::PassiveTagged, {0.4, -1.0, 2.2}));
  double rejected = 0.0;
  for (const auto& [pattern, branch] : out.branches) {
    EXPECT_GE(branch.probability, 0.0);
    if (!out.is_accepted(pattern)) rejected += branch.probability;
  }
  const double expected =
      std::pow(std::cos(0.4), 2) * std::pow(std::cos(-1.0), 2) * std::pow(std::cos(2.2), 2);
  EXPECT_NEAR(rejected, 1.0 - expected, kTol);
}

TEST(PassiveTaggedTest, AcceptedProbabilityAgreesWithCosineProduct) {
  Gen gen(505);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.index(2, 5);
    const auto spec = gen.spec(n, Variant::PassiveTagged);
    const auto out = run_passive_tagged(spec);
    double expected = 1.0;
    for (const auto& t : spec.thetas) expected *= std::pow(std::cos(t.radians()), 2);
    EXPECT_NEAR(out.total_success_probability, expected, kTol);
    if (expected > 1e-12) {
      EXPECT_NEAR(*out.overall_fidelity_of_accepted, 1.0, kTol);
    }
  }
}

// ---- active scheme ---------------------------------------------------------

TEST(ActiveTest, Examples) {
  const auto still = run_active(make_spec(Variant::ActivePC, {0.0, 0.0}));
  ASSERT_EQ(still.branches.size(), 1u);
  const auto& [pattern, branch] = *still.branches.begin();
  EXPECT_EQ(pattern.str(), "22");
  EXPECT_NEAR(branch.probability, 1.0, kTol);
  EXPECT_NEAR(*branch.fidelity, 1.0, kTol);

  const auto mixed = run_active(make_spec(Variant::ActivePC, {kPi / 6, kPi / 3}));
  const auto& b12 = mixed.branches.at(HeraldPattern("12"));
  EXPECT_NEAR(b12.probability, 0.0625, kTol);
  EXPECT_NEAR(*b12.fidelity, 1.0, kTol);

  const auto three = run_active(make_spec(Variant::ActivePC, {0.3, 1.9, -0.8}));
  EXPECT_EQ(three.branches.size(), 8u);
  EXPECT_NEAR(three.branch_probability_sum(), 1.0, kTol);
  EXPECT_NEAR(three.total_success_probability, 1.0, kTol);
}

TEST(ActiveTest, UnitFidelityAndProductWeights) {
  Gen gen(606);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.index(2, 5);
    const auto spec = gen.spec(n, Variant::ActivePC);
    const auto out = run_active(spec);
    for (const auto& [pattern, branch] : out.branches) {
      double w = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = spec.thetas[i].radians();
        w *= pattern.str()[i] == '2' ? std::pow(std::cos(t), 2) : std::pow(std::sin(t), 2);
      }
      EXPECT_NEAR(branch.probability, w, kTol) << pattern.str();
      if (branch.fidelity) {
        EXPECT_NEAR(*branch.fidelity, 1.0, kTol) << pattern.str();
      }
    }
    EXPECT_NEAR(out.branch_probability_sum(), 1.0, kTol);
    EXPECT_NEAR(out.total_success_probability, std::pow(spec.eta.value(), double(n)), kTol);
  }
}

TEST(ActiveTest, LossFactorScalesTotal) {
  const auto two = run_active(make_spec(Variant::ActivePC, {0.5, 0.9}, SourceCoefficients::balanced(), 0.988));
  EXPECT_NEAR(two.loss_factor, 0.976144, kTol);
  EXPECT_NEAR(two.total_success_probability, 0.976144, kTol);
  const auto three =
      run_active(make_spec(Variant::ActivePC, {0.5, 0.9, 1.4}, SourceCoefficients::balanced(), 0.988));
  EXPECT_NEAR(three.total_success_probability, 0.964430272, kTol);
}

TEST(ActiveTest, TotalStrictlyIncreasesWithEta) {
  Gen gen(707);
  for (std::size_t n = 2; n <= 4; ++n) {
    auto spec = gen.spec(n, Variant::ActivePC);
    double last = -1.0;
    for (double eta = 0.05; eta <= 1.0 + 1e-12; eta += 0.05) {
      spec.eta = PcEfficiency(std::min(eta, 1.0));
      const double total = run_active(spec).total_success_probability;
      EXPECT_GT(total, last);
      last = total;
    }
  }
}

TEST(ActiveWithoutCorrectionTest, Examples) {
  const auto out =
      run_active_without_correction(make_spec(Variant::ActivePC, {0.4, 1.1}, SourceCoefficients::balanced()));
  EXPECT_NEAR(*out.branches.at(HeraldPattern("22")).fidelity, 1.0, kTol);
  EXPECT_NEAR(*out.branches.at(HeraldPattern("12")).fidelity, 0.0, kTol);
  EXPECT_NEAR(*out.branches.at(HeraldPattern("21")).fidelity, 0.0, kTol);
  EXPECT_NEAR(*out.branches.at(HeraldPattern("11")).fidelity, 1.0, kTol);
}

TEST(ActiveWithoutCorrectionTest, OddBranchesLoseThePhase) {
  Gen gen(808);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = gen.index(2, 4);
    const auto spec = gen.spec(n, Variant::ActivePC);
    const double a2 = std::norm(spec.coeffs.alpha()), b2 = std::norm(spec.coeffs.beta());
    const auto out = run_active_without_correction(spec);
    for (const auto& [pattern, branch] : out.branches) {
      if (!branch.fidelity) continue;
      const double expected = pattern.count('1') % 2 ? std::pow(a2 - b2, 2) : 1.0;
      EXPECT_NEAR(*branch.fidelity, expected, 1e-10) << pattern.str();
    }
  }
}

// ---- herald completeness ---------------------------------------------------

TEST(HeraldCompletenessTest, EveryVariantSumsToOne) {
  Gen gen(909);
  for (auto variant : {Variant::PassiveDirect, Variant::PassiveTagged, Variant::ActivePC}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto spec = gen.spec(gen.index(2, 5), variant);
      const auto out = run(spec);
      EXPECT_NEAR(out.branch_probability_sum(), 1.0, kTol) << to_string(variant);
      for (const auto& [pattern, branch] : out.branches) {
        EXPECT_EQ(pattern.size(), spec.n_parties);
      }
    }
  }
}

// ---- reduction consistency against hand-written pipelines ------------------
//
// Each photon of the encoded source evolves independently, so the final
// state is a sum of two products (the alpha and beta terms).  The tables
// below spell out the per-photon images by hand for the tagged and active
// receivers; no library map is used to build the reference.

struct Term {
  PhotonMode mode;
  double weight;
};

// Tagged receiver: alpha photon c H + s V -> c H_T + s V; beta photon
// -s H_T + c V_T -> -s H_TT + c V_T.
std::vector<Term> tagged_alpha(double t) { return {{mode(H, 1), std::cos(t)}, {mode(V, 0), std::sin(t)}}; }
std::vector<Term> tagged_beta(double t) { return {{mode(H, 2), -std::sin(t)}, {mode(V, 1), std::cos(t)}}; }

// Active receiver with the path-1 phase restored: both source terms land in
// bin 1 with cosine weight on path 2 and sine weight on path 1.
std::vector<Term> active_alpha(double t) {
  return {{mode(H, 1, P2), std::cos(t)}, {mode(H, 1, P1), std::sin(t)}};
}
std::vector<Term> active_beta(double t) {
  return {{mode(V, 1, P2), std::cos(t)}, {mode(V, 1, P1), std::sin(t)}};
}

PureState two_party(Complex a, Complex b, const std::vector<Term>& a0, const std::vector<Term>& a1,
                    const std::vector<Term>& b0, const std::vector<Term>& b1) {
  PureState s(2);
  for (const auto& x : a0)
    for (const auto& y : a1) s.add(BasisKet{x.mode, y.mode}, a * x.weight * y.weight);
  for (const auto& x : b0)
    for (const auto& y : b1) s.add(BasisKet{x.mode, y.mode}, b * x.weight * y.weight);
  return s;
}

PureState three_party(Complex a, Complex b, const std::vector<Term>& a0, const std::vector<Term>& a1,
                      const std::vector<Term>& a2, const std::vector<Term>& b0,
                      const std::vector<Term>& b1, const std::vector<Term>& b2) {
  PureState s(3);
  for (const auto& x : a0)
    for (const auto& y : a1)
      for (const auto& z : a2) s.add(BasisKet{x.mode, y.mode, z.mode}, a * x.weight * y.weight * z.weight);
  for (const auto& x : b0)
    for (const auto& y : b1)
      for (const auto& z : b2) s.add(BasisKet{x.mode, y.mode, z.mode}, b * x.weight * y.weight * z.weight);
  return s;
}

TEST(ReductionConsistencyTest, TwoAndThreePartyPipelines) {
  Gen gen(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const auto coeffs = gen.coefficients();
    const Complex a = coeffs.alpha(), b = coeffs.beta();
    const double t0 = gen.angle(), t1 = gen.angle(), t2 = gen.angle();

    const auto tagged2 = decode_passive(apply_channels(encode(build_source(2, coeffs)), angles({t0, t1})));
    const auto ref_tagged2 =
        two_party(a, b, tagged_alpha(t0), tagged_alpha(t1), tagged_beta(t0), tagged_beta(t1));
    EXPECT_LE(testing::max_amplitude_diff(tagged2, ref_tagged2), kTol);

    const auto active2 = decode_active(apply_channels(encode(build_source(2, coeffs)), angles({t0, t1})));
    const auto ref_active2 =
        two_party(a, b, active_alpha(t0), active_alpha(t1), active_beta(t0), active_beta(t1));
    EXPECT_LE(testing::max_amplitude_diff(active2, ref_active2), kTol);

    const auto tagged3 =
        decode_passive(apply_channels(encode(build_source(3, coeffs)), angles({t0, t1, t2})));
    const auto ref_tagged3 = three_party(a, b, tagged_alpha(t0), tagged_alpha(t1), tagged_alpha(t2),
                                         tagged_beta(t0), tagged_beta(t1), tagged_beta(t2));
    EXPECT_LE(testing::max_amplitude_diff(tagged3, ref_tagged3), kTol);

    const auto active3 =
        decode_active(apply_channels(encode(build_source(3, coeffs)), angles({t0, t1, t2})));
    const auto ref_active3 = three_party(a, b, active_alpha(t0), active_alpha(t1), active_alpha(t2),
                                         active_beta(t0), active_beta(t1), active_beta(t2));
    EXPECT_LE(testing::max_amplitude_diff(active3, ref_active3), kTol);

    // The run_* outcomes must agree with probabilities read off the references.
    const auto run2 = run_passive_tagged(make_spec(Variant::PassiveTagged, {t0, t1}, coeffs));
    const double p2 = std::pow(std::cos(t0) * std::cos(t1), 2);
    EXPECT_NEAR(run2.total_success_probability, p2, kTol);
    const auto run3 = run_active(make_spec(Variant::ActivePC, {t0, t1, t2}, coeffs));
    EXPECT_NEAR(run3.branches.at(HeraldPattern("212")).probability,
                std::pow(std::cos(t0) * std::sin(t1) * std::cos(t2), 2), kTol);
  }
}

// ---- spec validation -------------------------------------------------------

TEST(ProtocolSpecTest, Validation) {
  auto spec = make_spec(Variant::PassiveTagged, {0.1, 0.2});
  EXPECT_NO_THROW(spec.validate());
  spec.thetas.pop_back();
  EXPECT_THROW(spec.validate(), DimensionError);
  EXPECT_THROW(make_spec(Variant::PassiveTagged, {0.1}).validate(), SpecError);
}

TEST(VariantTest, NamesRoundTrip) {
  for (auto v : {Variant::PassiveDirect, Variant::PassiveTagged, Variant::ActivePC}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_FALSE(parse_variant("tagged").has_value());
}

}  // namespace
}  // namespace qtag
