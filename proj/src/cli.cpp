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

#include "qtag/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtag/io.hpp"

namespace qtag::cli {

namespace {

using nlohmann::json;
using RawValues = std::map<std::string, std::string>;

struct KeyInfo {
  const char* name;
  const char* help;
  bool is_flag = false;
};

const std::vector<KeyInfo>& keys_for(Command c) {
  static const std::vector<KeyInfo> run = {
      {"protocol", "passive-direct | passive-tagged | active"},
      {"n", "number of parties (>= 2)"},
      {"alpha", "coefficient of |H...H>, e.g. 0.7071 or 0.6+0.8i"},
      {"beta", "coefficient of |V...V>"},
      {"theta", "comma-separated angles per party, radians or with 'pi' suffix"},
      {"eta", "Pockels-cell transmission coefficient in [0, 1]"},
      {"out", "output file"},
      {"format", "csv | json"},
  };
  static const std::vector<KeyInfo> sweep = {
      {"grid", "theta_min:theta_max:steps, e.g. 0:1pi:101"},
      {"alpha", "coefficient of |H...H>"},
      {"beta", "coefficient of |V...V>"},
      {"eta", "Pockels-cell transmission coefficient in [0, 1]"},
      {"out", "output file (stdout if absent)"},
      {"format", "csv | json"},
  };
  static const std::vector<KeyInfo> verify = {
      {"seed", "random seed"},
      {"trials", "number of random specs"},
      {"skip-path-correction", "mutation hook: drop the path-1 sigma_z", true},
      {"out", "report file (JSON)"},
      {"format", "json"},
  };
  switch (c) {
    case Command::Run:
      return run;
    case Command::Sweep:
      return sweep;
    case Command::Verify:
      return verify;
  }
  return run;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view text, const std::string& key) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw UsageError(key, "malformed number '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& key) {
  text = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(key, "malformed integer '" + std::string(text) + "'");
  }
  return v;
}

// Half a unit in the last decimal place written, or 0 for literals that are
// exact as written (integers, exponent notation).
double rounding_halfwidth(std::string_view literal) {
  const auto dot = literal.find('.');
  if (dot == std::string_view::npos ||
      literal.find_first_of("eE") != std::string_view::npos) {
    return 0.0;
  }
  const auto decimals = literal.size() - dot - 1;
  return 0.5 * std::pow(10.0, -static_cast<double>(decimals));
}

struct ParsedCoefficient {
  Complex value;
  // Worst-case change of |value|^2 from decimal rounding of the literal.
  double norm_slack = 0.0;
};

double slack(double v, double h) { return 2 * std::abs(v) * h + h * h; }

ParsedCoefficient parse_coefficient(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text.empty() || text.back() != 'i') {
    const double re = parse_real(text, key);
    return {re, slack(re, rounding_halfwidth(text))};
  }
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not leading and not an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::string_view re_text = split == std::string_view::npos ? "0" : body.substr(0, split);
  std::string_view im_text = split == std::string_view::npos ? body : body.substr(split);
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    im = parse_real(im_text, key);
  }
  const double re = parse_real(re_text, key);
  return {{re, im},
          slack(re, rounding_halfwidth(re_text)) + slack(im, rounding_halfwidth(im_text))};
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string json_to_raw(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += json_to_raw(v[i], key);
    }
    return out;
  }
  throw UsageError(key, "unsupported value type in config file");
}

RawValues read_config_file(const std::string& path, Command command) {
  std::ifstream f(path);
  if (!f) throw UsageError("config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("config", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config", "top level must be an object");
  const auto& known = keys_for(command);
  RawValues out;
  for (const auto& [key, value] : doc.items()) {
    const bool ok = std::ranges::any_of(known, [&](const KeyInfo& k) { return key == k.name; });
    if (!ok) throw UsageError(key, "unknown key in config file");
    out[key] = json_to_raw(value, key);
  }
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw UsageError(key, "expected true or false, got '" + text + "'");
}

OutputFormat pick_format(const RawValues& raw, Command command,
                         const std::optional<std::filesystem::path>& out) {
  if (auto it = raw.find("format"); it != raw.end()) {
    if (it->second == "json") return OutputFormat::Json;
    if (it->second == "csv" && command != Command::Verify) return OutputFormat::Csv;
    throw UsageError("format", "unsupported format '" + it->second + "'");
  }
  if (out) {
    if (out->extension() == ".json") return OutputFormat::Json;
    if (out->extension() == ".csv" && command != Command::Verify) return OutputFormat::Csv;
  }
  return command == Command::Sweep ? OutputFormat::Csv : OutputFormat::Json;
}

SourceCoefficients coefficients_from(const RawValues& raw) {
  const bool has_a = raw.contains("alpha");
  const bool has_b = raw.contains("beta");
  if (!has_a && !has_b) return SourceCoefficients::balanced();
  if (!has_a) throw UsageError("alpha", "required when beta is given");
  if (!has_b) throw UsageError("beta", "required when alpha is given");
  const auto a = parse_coefficient(raw.at("alpha"), "alpha");
  const auto b = parse_coefficient(raw.at("beta"), "beta");
  const double n2 = std::norm(a.value) + std::norm(b.value);
  const double tolerance = std::max(1e-9, a.norm_slack + b.norm_slack);
  if (!(std::abs(n2 - 1.0) <= tolerance)) {
    throw UsageError("alpha", fmt::format("|alpha|^2+|beta|^2 = {:.12g}, not 1", n2));
  }
  const double scale = 1.0 / std::sqrt(n2);
  return {a.value * scale, b.value * scale};
}

PcEfficiency eta_from(const RawValues& raw) {
  auto it = raw.find("eta");
  if (it == raw.end()) return PcEfficiency{};
  const double eta = parse_real(it->second, "eta");
  if (eta < 0.0 || eta > 1.0) throw UsageError("eta", "must lie in [0, 1]");
  return PcEfficiency(eta);
}

const std::string& required(const RawValues& raw, const std::string& key) {
  auto it = raw.find(key);
  if (it == raw.end()) throw UsageError(key, "required");
  return it->second;
}

SweepGrid grid_from(const RawValues& raw) {
  SweepGrid grid;
  if (auto it = raw.find("grid"); it != raw.end()) {
    const auto parts = split(it->second, ':');
    if (parts.size() != 3) throw UsageError("grid", "expected theta_min:theta_max:steps");
    grid.theta_min = parse_angle(parts[0], "grid");
    grid.theta_max = parse_angle(parts[1], "grid");
    grid.steps = parse_integer<std::size_t>(parts[2], "grid");
    if (!(grid.theta_min < grid.theta_max)) {
      throw UsageError("grid", "theta_min must be below theta_max");
    }
    if (grid.steps < 2) throw UsageError("grid", "needs at least 2 steps");
  }
  grid.coeffs = coefficients_from(raw);
  grid.eta = eta_from(raw);
  return grid;
}

ProtocolSpec protocol_from(const RawValues& raw) {
  ProtocolSpec spec;
  const auto n = parse_integer<long long>(required(raw, "n"), "n");
  if (n < 2) throw UsageError("n", "at least two parties are required");
  if (n > static_cast<long long>(kMaxPhotons)) {
    throw UsageError("n", "at most " + std::to_string(kMaxPhotons) + " parties");
  }
  spec.n_parties = static_cast<std::size_t>(n);

  const auto& name = required(raw, "protocol");
  const auto variant = parse_variant(name);
  if (!variant) throw UsageError("protocol", "unknown protocol '" + name + "'");
  spec.variant = *variant;

  const auto angles = split(required(raw, "theta"), ',');
  if (angles.size() != 1 && angles.size() != spec.n_parties) {
    throw UsageError("theta", fmt::format("expected 1 or {} angles, got {}",
                                          spec.n_parties, angles.size()));
  }
  for (std::size_t i = 0; i < spec.n_parties; ++i) {
    const auto& a = angles.size() == 1 ? angles[0] : angles[i];
    spec.thetas.emplace_back(parse_angle(a, "theta"));
  }
  spec.coeffs = coefficients_from(raw);
  spec.eta = eta_from(raw);
  return spec;
}

unsigned threads_from_env() {
  const char* v = std::getenv("QTAG_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  const auto n = parse_integer<long long>(v, "QTAG_THREADS");
  if (n < 1) throw UsageError("QTAG_THREADS", "must be a positive integer");
  return static_cast<unsigned>(n);
}

void emit(const RunConfig& config, const std::string& contents, std::ostream& out) {
  if (config.output_path) {
    io::write_atomically(*config.output_path, contents);
  } else {
    out << contents;
  }
}

std::string fixed6(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("nan");
}

int execute_run(const RunConfig& config, std::ostream& out) {
  const auto outcome = run(config.protocol);
  if (config.output_path) {
    std::ostringstream body;
    if (config.output_format == OutputFormat::Json) {
      body << io::to_json(config.protocol, outcome).dump(2) << '\n';
    } else {
      io::write_outcome_csv(outcome, body);
    }
    io::write_atomically(*config.output_path, body.str());
  }
  out << "P=" << fixed6(outcome.total_success_probability)
      << " F=" << fixed6(outcome.overall_fidelity_of_accepted) << '\n';
  return kExitOk;
}

int execute_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  SweepOptions options;
  options.threads = config.threads;
  const auto result = sweep(config.grid, options);
  std::ostringstream body;
  if (config.output_format == OutputFormat::Json) {
    body << io::to_json(result).dump(2) << '\n';
  } else {
    io::write_sweep_csv(result, body);
  }
  emit(config, body.str(), out);

  const double worst = result.max_disagreement();
  const bool ok = worst <= kAgreementTolerance;
  auto& summary = config.output_path ? out : err;
  summary << "rows=" << result.rows.size() << " max_disagreement=" << fmt::format("{:.3g}", worst)
          << (ok ? " OK" : " FAIL") << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

int execute_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  VerifyOptions options;
  options.seed = config.seed;
  options.trials = config.trials;
  options.corrupt_path_correction = config.skip_path_correction;
  const auto report = verify(options);
  if (config.output_path) {
    io::write_atomically(*config.output_path, io::to_json(options, report).dump(2) + "\n");
  }
  constexpr std::size_t kShown = 10;
  for (std::size_t i = 0; i < std::min(kShown, report.failures.size()); ++i) {
    const auto& f = report.failures[i];
    err << "FAIL " << f.check << " disagreement=" << io::format_double(f.disagreement)
        << " spec: " << f.spec << '\n';
  }
  if (report.failures.size() > kShown) {
    err << "... " << report.failures.size() - kShown << " more failures\n";
  }
  out << "specs=" << report.specs_checked
      << " max_disagreement=" << fmt::format("{:.3g}", report.max_disagreement)
      << (report.passed() ? " PASS" : " FAIL") << '\n';
  return report.passed() ? kExitOk : kExitVerificationFailed;
}

}  // namespace

double parse_angle(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
    std::string_view factor = text.substr(0, text.size() - 2);
    double f = 1.0;
    if (factor == "-") {
      f = -1.0;
    } else if (!factor.empty() && factor != "+") {
      f = parse_real(factor, key);
    }
    return f * std::numbers::pi;
  }
  return parse_real(text, key);
}

Complex parse_complex(std::string_view text, const std::string& key) {
  return parse_coefficient(text, key).value;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Alignment-free polarization-entanglement transmission simulator", "qtag"};
  app.require_subcommand(1, 1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::string config_path;
  };
  std::vector<Sub> subs = {
      {Command::Run, app.add_subcommand("run", "run one protocol instance"), {}, {}, {}},
      {Command::Sweep, app.add_subcommand("sweep", "sweep a shared misalignment angle"), {}, {}, {}},
      {Command::Verify, app.add_subcommand("verify", "cross-check against the dense oracle"), {}, {}, {}},
  };
  for (auto& sub : subs) {
    for (const auto& key : keys_for(sub.command)) {
      const std::string flag = std::string("--") + key.name;
      if (key.is_flag) {
        sub.app->add_flag(flag, sub.flags[key.name], key.help);
      } else {
        sub.app->add_option(flag, sub.values[key.name], key.help);
      }
    }
    sub.app->add_option("--config", sub.config_path, "JSON file with the same keys");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      std::ostringstream help;
      app.exit(e, help, help);
      throw HelpRequested(help.str());
    }
    throw UsageError("arguments", e.what());
  }

  auto it = std::ranges::find_if(subs, [](const Sub& s) { return s.app->parsed(); });
  if (it == subs.end()) throw UsageError("command", "expected run, sweep or verify");
  const Sub& sub = *it;

  RawValues raw;
  if (!sub.config_path.empty()) raw = read_config_file(sub.config_path, sub.command);
  for (const auto& key : keys_for(sub.command)) {
    const std::string flag = std::string("--") + key.name;
    if (sub.app->count(flag) == 0) continue;
    raw[key.name] = key.is_flag ? "true" : sub.values.at(key.name);
  }

  RunConfig config;
  config.command = sub.command;
  if (auto o = raw.find("out"); o != raw.end()) {
    if (o->second.empty()) throw UsageError("out", "empty path");
    config.output_path = std::filesystem::path(o->second);
  }
  config.output_format = pick_format(raw, sub.command, config.output_path);
  config.threads = threads_from_env();

  switch (sub.command) {
    case Command::Run:
      config.protocol = protocol_from(raw);
      break;
    case Command::Sweep:
      config.grid = grid_from(raw);
      break;
    case Command::Verify:
      if (auto s = raw.find("seed"); s != raw.end()) {
        config.seed = parse_integer<std::uint64_t>(s->second, "seed");
      }
      if (auto t = raw.find("trials"); t != raw.end()) {
        config.trials = parse_integer<std::size_t>(t->second, "trials");
        if (config.trials < 1) throw UsageError("trials", "must be at least 1");
      }
      if (auto f = raw.find("skip-path-correction"); f != raw.end()) {
        config.skip_path_correction = parse_bool(f->second, "skip-path-correction");
      }
      break;
  }
  return config;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::Run:
        return execute_run(config, out);
      case Command::Sweep:
        return execute_sweep(config, out, err);
      case Command::Verify:
        return execute_verify(config, out, err);
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n(run with --help for usage)\n";
    return kExitUsage;
  }
  return execute(config, out, err);
}

}  // namespace qtag::cli
