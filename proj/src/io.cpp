#include "nvdr/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "nvdr/errors.hpp"
#include "nvdr/version.hpp"

namespace nvdr {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + text + "' in " + where);
  }
  if (used != text.size())
    throw ConfigError("bad number '" + text + "' in " + where);
  return v;
}

}  // namespace

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  spec.validate();
  auto out = open_out(path);
  const auto& plan = spec.plan;
  out << "# protocol=" << protocol_tag(plan.protocol)
      << " swept=" << swept_parameter_tag(plan.swept)
      << " shots=" << spec.shots << " seed=" << spec.seed
      << " larmor_khz=" << g17(spec.larmor_khz);
  switch (plan.protocol) {
    case Protocol::Hhdr:
      out << " t_f_us=" << g17(plan.fixed.t_f_us);
      break;
    case Protocol::PmHhdr:
      if (plan.swept == SweptParameter::Nu)
        out << " omega_prime_khz=" << g17(plan.fixed.omega_prime_khz);
      else
        out << " nu_khz=" << g17(plan.fixed.nu_khz);
      out << " t_f_us=" << g17(plan.fixed.t_f_us);
      break;
    case Protocol::XyN:
      out << " n_pulses=" << plan.fixed.n_pulses;
      break;
  }
  if (plan.enforce_floor)
    out << " resolution_floor_khz=" << g17(plan.resolution_floor_khz);
  out << "\n";
  for (const auto& p : spec.points)
    out << g17(p.x) << "," << g17(p.signal) << "\n";
  if (!out) throw ConfigError("short write to " + path);
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);

  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw ConfigError(path + " does not start with a '# ' header line");

  std::map<std::string, std::string> kv;
  std::istringstream hs(header.substr(2));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("malformed header token '" + token + "' in " + path);
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }

  auto take = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw ConfigError("spectrum header missing key '" + std::string(key) +
                        "' in " + path);
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  Spectrum spec;
  auto& plan = spec.plan;
  const std::string proto = take("protocol");
  const auto parsed_proto = parse_protocol(proto);
  if (!parsed_proto)
    throw ConfigError("unknown protocol '" + proto + "' in " + path);
  plan.protocol = *parsed_proto;

  const std::string swept = take("swept");
  const auto parsed_swept = parse_swept_parameter(swept);
  if (!parsed_swept)
    throw ConfigError("unknown swept parameter '" + swept + "' in " + path);
  plan.swept = *parsed_swept;

  spec.shots = static_cast<int>(parse_number(take("shots"), path));
  spec.seed = static_cast<std::uint64_t>(parse_number(take("seed"), path));
  spec.larmor_khz = parse_number(take("larmor_khz"), path);

  switch (plan.protocol) {
    case Protocol::Hhdr:
      plan.fixed.t_f_us = parse_number(take("t_f_us"), path);
      break;
    case Protocol::PmHhdr:
      if (plan.swept == SweptParameter::Nu)
        plan.fixed.omega_prime_khz = parse_number(take("omega_prime_khz"), path);
      else
        plan.fixed.nu_khz = parse_number(take("nu_khz"), path);
      plan.fixed.t_f_us = parse_number(take("t_f_us"), path);
      break;
    case Protocol::XyN:
      plan.fixed.n_pulses = static_cast<int>(parse_number(take("n_pulses"), path));
      break;
  }

  if (kv.count("resolution_floor_khz")) {
    plan.resolution_floor_khz = parse_number(take("resolution_floor_khz"), path);
    plan.enforce_floor = true;
  } else {
    plan.enforce_floor = false;
  }

  if (!kv.empty())
    throw ConfigError("unknown spectrum header key '" + kv.begin()->first +
                      "' in " + path);

  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        " is not an x,signal row");
    const std::string where = path + ":" + std::to_string(lineno);
    const double x = parse_number(line.substr(0, comma), where);
    const double s = parse_number(line.substr(comma + 1), where);
    plan.grid.push_back(x);
    spec.points.push_back({x, s});
  }
  if (spec.points.empty())
    throw ConfigError(path + " holds no data rows");

  spec.validate();
  return spec;
}

std::string dip_report_json(const DipReport& report) {
  nlohmann::json j;
  j["model"] = dip_model_tag(report.model);
  j["converged"] = report.converged;
  j["residual"] = report.fit_residual;
  j["dips"] = nlohmann::json::array();
  for (const auto& d : report.dips) {
    j["dips"].push_back({{"center_khz", d.center_khz},
                         {"width_khz", d.width_khz},
                         {"depth", d.depth},
                         {"a_par_khz", d.a_par_khz},
                         {"a_par_ambiguous", d.a_par_ambiguous}});
  }
  return j.dump(2) + "\n";
}

void write_dip_report_json(const std::string& path, const DipReport& report) {
  auto out = open_out(path);
  out << dip_report_json(report);
  if (!out) throw ConfigError("short write to " + path);
}

void write_power_table_csv(const std::string& path,
                           const std::vector<PowerRow>& rows) {
  auto out = open_out(path);
  out << "scheme,bz_gauss,rabi_khz,peak_mw,avg_mw\n";
  for (const auto& r : rows) {
    out << scheme_tag(r.scheme) << "," << g17(r.bz_gauss) << ","
        << g17(r.rabi_khz) << "," << g17(r.peak_mw) << "," << g17(r.avg_mw)
        << "\n";
  }
  if (!out) throw ConfigError("short write to " + path);
}

void write_manifest(const std::string& path, const std::string& config_echo,
                    std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = seed;
  if (config_echo.empty()) {
    j["config"] = nullptr;
  } else {
    j["config"] = nlohmann::json::parse(config_echo, nullptr, false);
    if (j["config"].is_discarded())
      throw ConfigError("config echo is not valid JSON");
  }
  j["outputs"] = outputs;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("short write to " + path);
}

}  // namespace nvdr
