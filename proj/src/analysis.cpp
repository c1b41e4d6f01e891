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

#include "qtag/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "qtag/dense_oracle.hpp"

namespace qtag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> radians_of(std::span<const RotationAngle> thetas) {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (const auto& t : thetas) out.push_back(t.radians());
  return out;
}

ProtocolSpec shared_angle_spec(std::size_t n, double theta,
                               const SweepGrid& grid, Variant variant) {
  ProtocolSpec spec;
  spec.n_parties = n;
  spec.coeffs = grid.coeffs;
  spec.variant = variant;
  spec.thetas.assign(n, RotationAngle(theta));
  spec.eta = grid.eta;
  return spec;
}

// Every path pattern over n photons, '2' and '1' digits.
std::vector<HeraldPattern> all_path_patterns(std::size_t n) {
  std::vector<HeraldPattern> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    std::string d(n, '2');
    for (std::size_t i = 0; i < n; ++i) {
      if (bits & (std::size_t{1} << (n - 1 - i))) d[i] = '1';
    }
    out.emplace_back(std::move(d));
  }
  return out;
}

double rejected_mass(const TransmissionOutcome& out) {
  double sum = 0.0;
  for (const auto& [pattern, b] : out.branches) {
    if (!out.is_accepted(pattern)) sum += b.probability;
  }
  return sum;
}

SweepRow sweep_row(double theta, const SweepGrid& grid,
                   const SweepOptions& options) {
  const auto& cf = options.closed_forms;
  const std::vector<double> two(2, theta);
  const std::vector<double> three(3, theta);

  SweepRow row;
  row.theta = theta;

  auto& c = row.closed_form;
  c.f1_direct = cf.f1(theta, theta, grid.coeffs);
  c.f2_direct = cf.f2(theta, theta, theta, grid.coeffs);
  c.f_scheme = 1.0;
  c.p1_passive = cf.p_passive(two);
  c.p2_passive = cf.p_passive(three);
  double active_sum = 0.0;
  for (const auto& p : all_path_patterns(2)) active_sum += cf.p_active_branch(two, p);
  c.p_active_total = active_sum * cf.loss(grid.eta, 2);

  row.simulated = c;
  row.p1_rejected = kNaN;
  row.p2_rejected = kNaN;
  auto& s = row.simulated;
  const auto has = [&](Variant v) { return options.variants.contains(v); };

  std::vector<double> scheme_fidelities;
  const auto collect = [&](const TransmissionOutcome& out) {
    for (const auto& [pattern, b] : out.branches) {
      if (out.is_accepted(pattern) && b.fidelity) {
        scheme_fidelities.push_back(*b.fidelity);
      }
    }
  };

  if (has(Variant::PassiveDirect)) {
    const auto d2 = run_passive_direct(
        shared_angle_spec(2, theta, grid, Variant::PassiveDirect));
    const auto d3 = run_passive_direct(
        shared_angle_spec(3, theta, grid, Variant::PassiveDirect));
    s.f1_direct = d2.overall_fidelity_of_accepted.value_or(kNaN);
    s.f2_direct = d3.overall_fidelity_of_accepted.value_or(kNaN);
  }
  if (has(Variant::PassiveTagged)) {
    const auto t2 = run_passive_tagged(
        shared_angle_spec(2, theta, grid, Variant::PassiveTagged));
    const auto t3 = run_passive_tagged(
        shared_angle_spec(3, theta, grid, Variant::PassiveTagged));
    s.p1_passive = t2.total_success_probability;
    s.p2_passive = t3.total_success_probability;
    row.p1_rejected = rejected_mass(t2);
    row.p2_rejected = rejected_mass(t3);
    collect(t2);
    collect(t3);
  }
  if (has(Variant::ActivePC)) {
    const auto a2 =
        run_active(shared_angle_spec(2, theta, grid, Variant::ActivePC));
    const auto a3 =
        run_active(shared_angle_spec(3, theta, grid, Variant::ActivePC));
    s.p_active_total = a2.total_success_probability;
    collect(a2);
    collect(a3);
  }
  if (has(Variant::PassiveTagged) || has(Variant::ActivePC)) {
    s.f_scheme = scheme_fidelities.empty()
                     ? kNaN
                     : *std::ranges::min_element(scheme_fidelities);
  }

  const auto sim = s.as_array();
  const auto ref = c.as_array();
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (std::isnan(sim[i])) continue;
    row.disagreement = std::max(row.disagreement, std::abs(sim[i] - ref[i]));
  }
  return row;
}

// Tracks the worst disagreement and records failures.
class Checker {
 public:
  Checker(const ProtocolSpec& spec, double tolerance, VerifyReport& report)
      : spec_(describe(spec)), tolerance_(tolerance), report_(report) {}

  void operator()(const std::string& check, double disagreement) {
    if (std::isnan(disagreement) || !(disagreement <= tolerance_)) {
      report_.failures.push_back({spec_, check, disagreement});
    }
    if (!std::isnan(disagreement)) {
      report_.max_disagreement =
          std::max(report_.max_disagreement, disagreement);
    }
  }

 private:
  std::string spec_;
  double tolerance_;
  VerifyReport& report_;
};

// Compares branch probabilities over the union of herald patterns.
void check_branch_probabilities(
    Checker& check, const std::string& family, const TransmissionOutcome& sim,
    const std::map<std::string, oracle::DenseBranch>& dense) {
  std::set<std::string> keys;
  for (const auto& [pattern, b] : sim.branches) keys.insert(pattern.str());
  for (const auto& [key, b] : dense) keys.insert(key);
  for (const auto& key : keys) {
    auto it = sim.branches.find(HeraldPattern(key));
    const double ps = it == sim.branches.end() ? 0.0 : it->second.probability;
    auto jt = dense.find(key);
    const double pd = jt == dense.end() ? 0.0 : jt->second.probability;
    check(family + " branch probability [" + key + "] vs dense",
          std::abs(ps - pd));
  }
}

}  // namespace

double closed_form_f1(double theta_a, double theta_b,
                      const SourceCoefficients& coeffs) {
  const Complex a = coeffs.alpha();
  const Complex b = coeffs.beta();
  const Complex cross = std::conj(b) * a + std::conj(a) * b;
  const Complex amp = std::cos(theta_a) * std::cos(theta_b) +
                      std::sin(theta_a) * std::sin(theta_b) * cross;
  return std::norm(amp);
}

double closed_form_f2(double theta_a, double theta_b, double theta_c,
                      const SourceCoefficients& coeffs) {
  const Complex a = coeffs.alpha();
  const Complex b = coeffs.beta();
  const double l1 = std::cos(theta_a) * std::cos(theta_b) * std::cos(theta_c);
  const double l8 = std::sin(theta_a) * std::sin(theta_b) * std::sin(theta_c);
  return std::norm(l1 + l8 * (std::conj(b) * a - std::conj(a) * b));
}

double closed_form_p_passive(std::span<const double> thetas) {
  double p = 1.0;
  for (double t : thetas) p *= std::cos(t) * std::cos(t);
  return p;
}

double closed_form_p_active_branch(std::span<const double> thetas,
                                   const HeraldPattern& paths) {
  if (paths.size() != thetas.size()) {
    throw DimensionError("path pattern length " +
                         std::to_string(paths.size()) + " != " +
                         std::to_string(thetas.size()) + " angles");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double w = paths.str()[i] == '1' ? std::sin(thetas[i])
                                           : std::cos(thetas[i]);
    p *= w * w;
  }
  return p;
}

double closed_form_loss(PcEfficiency eta, std::size_t n) {
  return std::pow(eta.value(), static_cast<double>(n));
}

void SweepGrid::validate() const {
  if (!(theta_min < theta_max)) {
    throw SpecError("sweep grid needs theta_min < theta_max");
  }
  if (steps < 2) throw SpecError("sweep grid needs at least 2 steps");
}

double SweepGrid::theta(std::size_t i) const {
  if (i + 1 == steps) return theta_max;
  return theta_min +
         (theta_max - theta_min) * static_cast<double>(i) /
             static_cast<double>(steps - 1);
}

std::string_view to_string(Provenance p) {
  return p == Provenance::Simulated ? "simulated" : "closed-form";
}

double SweepResult::max_disagreement() const {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.disagreement);
  return worst;
}

SweepResult sweep(const SweepGrid& grid, const SweepOptions& options) {
  grid.validate();
  SweepResult result{grid, {}, std::vector<SweepRow>(grid.steps)};
  const auto mark = [&](Variant v) {
    return options.variants.contains(v) ? Provenance::Simulated
                                        : Provenance::ClosedForm;
  };
  result.provenance = {mark(Variant::PassiveDirect),
                       mark(Variant::PassiveTagged), mark(Variant::ActivePC)};

  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, grid.steps));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.steps; i = next++) {
      try {
        result.rows[i] = sweep_row(grid.theta(i), grid, options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return result;
}

std::string describe(const ProtocolSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << spec.n_parties << " variant=" << to_string(spec.variant)
     << " alpha=" << spec.coeffs.alpha() << " beta=" << spec.coeffs.beta()
     << " eta=" << spec.eta.value() << " thetas=[";
  for (std::size_t i = 0; i < spec.thetas.size(); ++i) {
    if (i > 0) os << ',';
    os << spec.thetas[i].radians();
  }
  os << ']';
  return os.str();
}

void verify_spec(const ProtocolSpec& spec, const VerifyOptions& options,
                 VerifyReport& report) {
  spec.validate();
  ++report.specs_checked;
  Checker check(spec, options.tolerance, report);

  const std::size_t n = spec.n_parties;
  const Complex alpha = spec.coeffs.alpha();
  const Complex beta = spec.coeffs.beta();
  const auto thetas = radians_of(spec.thetas);
  const PureState source = build_source(n, spec.coeffs);

  auto with_variant = [&](Variant v) {
    ProtocolSpec s = spec;
    s.variant = v;
    return s;
  };

  {
    const PureState sparse = apply_channels(source, spec.thetas);
    const auto dense = oracle::run_direct(n, alpha, beta, thetas);
    check("direct amplitudes vs dense", oracle::max_abs_difference(dense, sparse));

    const auto out = run_passive_direct(with_variant(Variant::PassiveDirect));
    const double f = out.overall_fidelity_of_accepted.value_or(kNaN);
    if (n == 2) {
      check("direct fidelity vs F1", std::abs(f - closed_form_f1(thetas[0], thetas[1], spec.coeffs)));
    } else if (n == 3) {
      check("direct fidelity vs F2",
            std::abs(f - closed_form_f2(thetas[0], thetas[1], thetas[2], spec.coeffs)));
    }
    const auto db = oracle::branches(dense, oracle::HeraldKind::Bins, alpha, beta);
    check("direct fidelity vs dense", std::abs(f - db.at(std::string(n, '0')).fidelity));
    check("direct probability sum", std::abs(out.branch_probability_sum() - 1.0));
  }

  {
    const PureState sparse = decode_passive(apply_channels(encode(source), spec.thetas));
    const auto dense = oracle::run_tagged(n, alpha, beta, thetas);
    check("tagged amplitudes vs dense", oracle::max_abs_difference(dense, sparse));

    const auto out = run_passive_tagged(with_variant(Variant::PassiveTagged));
    check("tagged accepted probability vs prod cos^2",
          std::abs(out.total_success_probability - closed_form_p_passive(thetas)));
    const auto& accepted = out.branches.find(*out.accepted);
    if (accepted != out.branches.end() && accepted->second.fidelity) {
      check("tagged accepted fidelity vs 1", std::abs(*accepted->second.fidelity - 1.0));
    }
    check("tagged probability sum", std::abs(out.branch_probability_sum() - 1.0));
    check_branch_probabilities(
        check, "tagged", out,
        oracle::branches(dense, oracle::HeraldKind::Bins, alpha, beta));
  }

  {
    const bool correct = !options.corrupt_path_correction;
    const PureState sparse =
        decode_active(apply_channels(encode(source), spec.thetas), correct);
    const auto dense = oracle::run_active(n, alpha, beta, thetas);
    for (const auto& [paths, diff] : oracle::max_abs_difference_by_paths(dense, sparse)) {
      check("active amplitudes [" + paths + "] vs dense", diff);
    }

    const auto active_spec = with_variant(Variant::ActivePC);
    const auto out = correct ? run_active(active_spec)
                             : run_active_without_correction(active_spec);
    for (const auto& pattern : all_path_patterns(n)) {
      auto it = out.branches.find(pattern);
      const double p = it == out.branches.end() ? 0.0 : it->second.probability;
      check("active branch probability [" + pattern.str() + "] vs closed form",
            std::abs(p - closed_form_p_active_branch(thetas, pattern)));
      if (it != out.branches.end() && it->second.fidelity) {
        check("active fidelity [" + pattern.str() + "] vs 1",
              std::abs(*it->second.fidelity - 1.0));
      }
    }
    check("active probability sum", std::abs(out.branch_probability_sum() - 1.0));
    check("active total vs eta^n",
          std::abs(out.total_success_probability - closed_form_loss(spec.eta, n)));
    check_branch_probabilities(
        check, "active", out,
        oracle::branches(dense, oracle::HeraldKind::Paths, alpha, beta));
  }
}

VerifyReport verify(const VerifyOptions& options) {
  if (options.trials == 0 && options.extra_specs.empty()) {
    throw SpecError("verify needs at least one trial");
  }
  VerifyReport report;
  for (const auto& spec : options.extra_specs) verify_spec(spec, options, report);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> party_count(2, 4);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> mix(0.0, std::numbers::pi / 2);
  std::uniform_real_distribution<double> eta(0.5, 1.0);

  for (std::size_t t = 0; t < options.trials; ++t) {
    ProtocolSpec spec;
    spec.n_parties = party_count(rng);
    const double m = mix(rng);
    const double pa = angle(rng);
    const double pb = angle(rng);
    spec.coeffs = SourceCoefficients(std::polar(std::cos(m), pa),
                                     std::polar(std::sin(m), pb));
    spec.variant = Variant::ActivePC;
    for (std::size_t i = 0; i < spec.n_parties; ++i) {
      spec.thetas.emplace_back(angle(rng));
    }
    spec.eta = PcEfficiency(eta(rng));
    verify_spec(spec, options, report);
  }
  return report;
}

}  // namespace qtag
