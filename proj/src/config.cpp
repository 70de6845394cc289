#include "nvdr/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "nvdr/errors.hpp"

namespace nvdr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed,
                    const std::string& origin) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known)
      fail(origin, "unknown key '" + item.key() + "' in section '" + section +
                       "'");
  }
}

const json& section_at(const json& root, const char* name,
                       const std::string& origin) {
  const auto it = root.find(name);
  if (it == root.end()) fail(origin, "missing section '" + std::string(name) + "'");
  if (!it->is_object())
    fail(origin, "section '" + std::string(name) + "' must be an object");
  return *it;
}

double num_at(const json& sec, const std::string& section, const char* key,
              const std::string& origin) {
  const auto it = sec.find(key);
  if (it == sec.end())
    fail(origin, "missing key '" + std::string(key) + "' in section '" +
                     section + "'");
  if (!it->is_number())
    fail(origin, "'" + section + "." + key + "' must be a number");
  return it->get<double>();
}

double num_or(const json& sec, const std::string& section, const char* key,
              double fallback, const std::string& origin) {
  if (!sec.contains(key)) return fallback;
  return num_at(sec, section, key, origin);
}

std::string str_at(const json& sec, const std::string& section,
                   const char* key, const std::string& origin) {
  const auto it = sec.find(key);
  if (it == sec.end())
    fail(origin, "missing key '" + std::string(key) + "' in section '" +
                     section + "'");
  if (!it->is_string())
    fail(origin, "'" + section + "." + key + "' must be a string");
  return it->get<std::string>();
}

bool bool_or(const json& sec, const std::string& section, const char* key,
             bool fallback, const std::string& origin) {
  const auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  if (!it->is_boolean())
    fail(origin, "'" + section + "." + key + "' must be a boolean");
  return it->get<bool>();
}

void parse_system(const json& sec, SpinSystemSpec& sys,
                  const std::string& origin) {
  reject_unknown(sec, "system", {"bz_gauss", "nuclei"}, origin);
  sys.bz_gauss = num_at(sec, "system", "bz_gauss", origin);

  const auto it = sec.find("nuclei");
  if (it == sec.end() || !it->is_array() || it->empty())
    fail(origin, "'system.nuclei' must be a non-empty array");
  int idx = 0;
  for (const auto& nj : *it) {
    const std::string where = "system.nuclei[" + std::to_string(idx) + "]";
    if (!nj.is_object()) fail(origin, "'" + where + "' must be an object");
    reject_unknown(nj, where, {"label", "a_par_khz", "a_perp_khz", "bath_proxy"},
                   origin);
    NuclearSpinSpec n;
    n.label = str_at(nj, where, "label", origin);
    n.hyperfine.azz_khz = num_at(nj, where, "a_par_khz", origin);
    n.hyperfine.azx_khz = num_or(nj, where, "a_perp_khz", 0.0, origin);
    n.bath_proxy = bool_or(nj, where, "bath_proxy", false, origin);
    sys.nuclei.push_back(std::move(n));
    ++idx;
  }
}

void parse_constants(const json& sec, PhysicalConstants& c,
                     const std::string& origin) {
  reject_unknown(sec, "constants",
                 {"d_mhz", "gamma_e_mhz_per_g", "gamma_n_khz_per_g"}, origin);
  c.d_mhz = num_or(sec, "constants", "d_mhz", c.d_mhz, origin);
  c.gamma_e_mhz_per_g =
      num_or(sec, "constants", "gamma_e_mhz_per_g", c.gamma_e_mhz_per_g, origin);
  c.gamma_n_khz_per_g =
      num_or(sec, "constants", "gamma_n_khz_per_g", c.gamma_n_khz_per_g, origin);
}

void parse_protocol(const json& sec, SweepPlan& plan,
                    const std::string& origin) {
  const std::string tag = str_at(sec, "protocol", "tag", origin);
  const auto proto = nvdr::parse_protocol(tag);
  if (!proto) fail(origin, "unknown protocol tag '" + tag + "'");
  plan.protocol = *proto;

  switch (plan.protocol) {
    case Protocol::Hhdr:
      reject_unknown(sec, "protocol", {"tag", "t_f_us", "dephasing_khz"},
                     origin);
      plan.fixed.t_f_us = num_at(sec, "protocol", "t_f_us", origin);
      break;
    case Protocol::PmHhdr:
      reject_unknown(
          sec, "protocol",
          {"tag", "omega_prime_khz", "nu_khz", "t_f_us", "dephasing_khz"},
          origin);
      plan.fixed.omega_prime_khz =
          num_or(sec, "protocol", "omega_prime_khz", 0.0, origin);
      plan.fixed.nu_khz = num_or(sec, "protocol", "nu_khz", 0.0, origin);
      plan.fixed.t_f_us = num_at(sec, "protocol", "t_f_us", origin);
      break;
    case Protocol::XyN: {
      reject_unknown(sec, "protocol",
                     {"tag", "n_pulses", "pulse", "omega_pi_khz"}, origin);
      const double n = num_at(sec, "protocol", "n_pulses", origin);
      if (n != std::floor(n))
        fail(origin, "'protocol.n_pulses' must be an integer");
      plan.fixed.n_pulses = static_cast<int>(n);
      const std::string pulse =
          sec.contains("pulse") ? str_at(sec, "protocol", "pulse", origin)
                                : "ideal";
      if (pulse == "ideal") {
        plan.fixed.pulse = PulseModel::Ideal;
      } else if (pulse == "finite") {
        plan.fixed.pulse = PulseModel::Finite;
        plan.fixed.omega_pi_khz =
            num_at(sec, "protocol", "omega_pi_khz", origin);
      } else {
        fail(origin, "'protocol.pulse' must be 'ideal' or 'finite'");
      }
      break;
    }
  }
  plan.fixed.dephasing_khz =
      num_or(sec, "protocol", "dephasing_khz", 0.0, origin);
}

void parse_sweep(const json& sec, SweepPlan& plan, const std::string& origin) {
  reject_unknown(sec, "sweep",
                 {"swept", "start", "stop", "step", "composition",
                  "resolution_floor_khz", "enforce_floor"},
                 origin);
  const std::string swept = str_at(sec, "sweep", "swept", origin);
  const auto parsed = parse_swept_parameter(swept);
  if (!parsed) fail(origin, "unknown swept parameter '" + swept + "'");
  plan.swept = *parsed;

  const double start = num_at(sec, "sweep", "start", origin);
  const double stop = num_at(sec, "sweep", "stop", origin);
  const double step = num_at(sec, "sweep", "step", origin);
  if (!(step > 0.0)) fail(origin, "'sweep.step' must be positive");
  if (!(stop > start)) fail(origin, "'sweep.stop' must exceed 'sweep.start'");
  // indexed, not accumulated: tau grids take hundreds of sub-us steps
  for (int i = 0;; ++i) {
    const double x = start + i * step;
    if (x > stop + 0.25 * step) break;
    plan.grid.push_back(x);
  }

  if (sec.contains("composition")) {
    const std::string comp = str_at(sec, "sweep", "composition", origin);
    const auto parsed_comp = parse_composition(comp);
    if (!parsed_comp) fail(origin, "unknown composition '" + comp + "'");
    plan.composition = *parsed_comp;
  }
  plan.resolution_floor_khz = num_or(sec, "sweep", "resolution_floor_khz",
                                     plan.resolution_floor_khz, origin);
  plan.enforce_floor =
      bool_or(sec, "sweep", "enforce_floor", plan.enforce_floor, origin);
}

void parse_noise(const json& sec, AmplitudeNoise& noise,
                 const std::string& origin) {
  reject_unknown(sec, "noise", {"relative_std", "shots", "seed"}, origin);
  noise.relative_std =
      num_or(sec, "noise", "relative_std", noise.relative_std, origin);
  const double shots = num_or(sec, "noise", "shots", noise.shots, origin);
  if (shots != std::floor(shots) || shots < 1)
    fail(origin, "'noise.shots' must be a positive integer");
  noise.shots = static_cast<int>(shots);
  const double seed = num_or(sec, "noise", "seed", 0.0, origin);
  if (seed != std::floor(seed) || seed < 0)
    fail(origin, "'noise.seed' must be a non-negative integer");
  noise.seed = static_cast<std::uint64_t>(seed);
}

void parse_output(const json& sec, OutputConfig& out,
                  const std::string& origin) {
  reject_unknown(sec, "output",
                 {"spectrum_csv", "report_json", "manifest_json", "format"},
                 origin);
  if (sec.contains("spectrum_csv"))
    out.spectrum_csv = str_at(sec, "output", "spectrum_csv", origin);
  if (sec.contains("report_json"))
    out.report_json = str_at(sec, "output", "report_json", origin);
  if (sec.contains("manifest_json"))
    out.manifest_json = str_at(sec, "output", "manifest_json", origin);
  if (sec.contains("format"))
    out.format = str_at(sec, "output", "format", origin);
  if (out.format != "csv" && out.format != "json")
    fail(origin, "'output.format' must be 'csv' or 'json'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin) {
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) fail(origin, "not valid JSON");
  if (!root.is_object()) fail(origin, "top level must be an object");
  reject_unknown(root, "(top level)",
                 {"system", "constants", "protocol", "sweep", "noise",
                  "output"},
                 origin);

  ExperimentConfig cfg;
  parse_system(section_at(root, "system", origin), cfg.system, origin);
  if (root.contains("constants"))
    parse_constants(section_at(root, "constants", origin),
                    cfg.system.constants, origin);
  parse_protocol(section_at(root, "protocol", origin), cfg.plan, origin);
  parse_sweep(section_at(root, "sweep", origin), cfg.plan, origin);
  if (root.contains("noise"))
    parse_noise(section_at(root, "noise", origin), cfg.noise, origin);
  if (root.contains("output"))
    parse_output(section_at(root, "output", origin), cfg.output, origin);

  cfg.system.constants.validate();
  cfg.system.validate();
  cfg.plan.validate();
  cfg.noise.validate();
  cfg.echo = root.dump();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace nvdr
