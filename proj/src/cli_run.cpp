#include "nvdr/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nvdr/analytic.hpp"
#include "nvdr/config.hpp"
#include "nvdr/dip_fit.hpp"
#include "nvdr/errors.hpp"
#include "nvdr/io.hpp"
#include "nvdr/lab_oracle.hpp"
#include "nvdr/power.hpp"
#include "nvdr/sweep.hpp"
#include "nvdr/version.hpp"

namespace nvdr {
namespace {

std::string joined(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// stdout payload for sweep/fit; files carry the full-precision record
void print_report(const DipReport& rep, const std::string& format) {
  if (format == "json") {
    std::cout << dip_report_json(rep) << "\n";
    return;
  }
  std::cout << "center_khz,width_khz,depth,a_par_khz,ambiguous\n";
  for (const Dip& d : rep.dips)
    std::printf("%.6g,%.6g,%.6g,%.6g,%d\n", d.center_khz, d.width_khz, d.depth,
                d.a_par_khz, d.a_par_ambiguous ? 1 : 0);
}

void require_format(const std::string& format) {
  if (format != "csv" && format != "json")
    throw ConfigError("--format must be 'csv' or 'json', got '" + format +
                      "'");
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int threads, bool dump, std::string format) {
  if (config_path.empty()) throw ConfigError("sweep requires --config");
  if (threads < 1) throw ConfigError("--threads must be >= 1");
  ExperimentConfig cfg = load_config(config_path);
  if (format.empty()) format = cfg.output.format;
  require_format(format);

  if (dump) {
    // under independent composition every nucleus runs the same drive
    // schedule, so the first nucleus stands in for the lot
    const SpinSystemSpec& full = cfg.system;
    const SpinSystemSpec shown =
        (cfg.plan.composition == Composition::IndependentSpins &&
         full.n_nuclei() > 1)
            ? full.single_nucleus(0)
            : full;
    ControlProgram prog =
        compile_plan_point(shown, cfg.plan, cfg.plan.grid.front());
    dump_program(prog, std::cout);
  }

  Spectrum spec = run_sweep(cfg.system, cfg.plan, cfg.noise, threads);
  DipReport rep = fit_dips(spec);

  // single writer, and only after the whole computation succeeded; a config
  // or numeric throw above leaves the output directory untouched
  std::filesystem::create_directories(out_dir);
  const std::string spec_path = joined(out_dir, cfg.output.spectrum_csv);
  const std::string rep_path = joined(out_dir, cfg.output.report_json);
  const std::string man_path = joined(out_dir, cfg.output.manifest_json);
  write_spectrum_csv(spec_path, spec);
  write_dip_report_json(rep_path, rep);
  write_manifest(man_path, cfg.echo, cfg.noise.seed, {spec_path, rep_path});

  std::cerr << "wrote " << spec_path << ", " << rep_path << ", " << man_path
            << "\n";
  print_report(rep, format);
  return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& out_dir,
            std::string format) {
  if (format.empty()) format = "csv";
  require_format(format);
  Spectrum spec = read_spectrum_csv(csv_path);
  DipReport rep = fit_dips(spec);

  std::filesystem::create_directories(out_dir);
  const std::string rep_path = joined(out_dir, "report.json");
  const std::string man_path = joined(out_dir, "manifest.json");
  write_dip_report_json(rep_path, rep);
  nlohmann::json echo;
  echo["fit"] = {{"input", csv_path}, {"model", dip_model_tag(rep.model)}};
  write_manifest(man_path, echo.dump(), spec.seed, {rep_path});

  std::cerr << "wrote " << rep_path << ", " << man_path << "\n";
  print_report(rep, format);
  return 0;
}

int cmd_predict(double bz_gauss, double a_par_khz, double omega_prime_khz) {
  PmResonances r = predict_pm_resonances(bz_gauss, a_par_khz, omega_prime_khz);
  std::printf("target %.4f kHz\n", r.target_khz);
  std::printf("lower dip %.4f kHz\n", r.nu_minus_khz);
  std::printf("upper dip %.4f kHz\n", r.nu_plus_khz);
  if (r.degenerate)
    std::printf("lower sideband at nu <= 0; dips merge or vanish\n");
  return 0;
}

struct PowerArgs {
  double efficiency = 1.0;
  double bz_gauss = 1840.0;
  double omega_khz = 0.0;        // hhdr lock
  double omega_prime_khz = 0.0;  // pm tone
  double omega_pulse_khz = 0.0;  // xy pi-pulse rabi
  int n_pulses = 0;
  double tau_us = 0.0;
  double t_pi_us = 0.0;
  std::string scheme;  // empty: every scheme whose parameters were given
};

int cmd_power(const PowerArgs& a, const std::string& out_dir,
              bool write_files) {
  PowerConfig cfg;
  cfg.efficiency_khz_per_sqrt_mw = a.efficiency;
  cfg.validate();

  std::optional<Scheme> only;
  if (!a.scheme.empty()) {
    std::string tag = a.scheme;
    if (tag == "pm") tag = "pm_hhdr";
    if (tag == "xy") tag = "xy_n";
    only = parse_scheme(tag);
    if (!only) throw ConfigError("unknown scheme '" + a.scheme + "'");
  }
  auto wanted = [&](Scheme s) { return !only || *only == s; };

  std::vector<SchemePower> rows;
  if (wanted(Scheme::Hhdr) && a.omega_khz > 0.0)
    rows.push_back(power_hhdr(cfg, a.omega_khz));
  if (wanted(Scheme::PmHhdr) && a.omega_prime_khz > 0.0)
    rows.push_back(power_pm_hhdr(cfg, a.omega_prime_khz));
  if (wanted(Scheme::XyN) && a.omega_pulse_khz > 0.0)
    rows.push_back(power_xyn(cfg, a.omega_pulse_khz, a.n_pulses, a.tau_us,
                             a.t_pi_us));
  if (rows.empty())
    throw ConfigError(
        "no scheme parameters given; pass --omega, --omega-prime, or "
        "--omega-pulse with --n-pulses/--tau/--t-pi");

  for (const SchemePower& p : rows)
    std::printf("%s: drive %.6g kHz, peak %.6g mW, avg %.6g mW\n",
                scheme_tag(p.scheme), p.drive_khz, p.peak_mw, p.avg_mw);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const SchemePower& hi = rows[i];
      const SchemePower& lo = rows[j];
      std::printf("peak ratio %s/%s = %.6g (1/%.4g)\n", scheme_tag(lo.scheme),
                  scheme_tag(hi.scheme), lo.peak_mw / hi.peak_mw,
                  hi.peak_mw / lo.peak_mw);
    }

  if (write_files) {
    std::filesystem::create_directories(out_dir);
    const std::string table_path = joined(out_dir, "power.csv");
    const std::string man_path = joined(out_dir, "manifest.json");
    std::vector<PowerRow> table;
    for (const SchemePower& p : rows)
      table.push_back({p.scheme, a.bz_gauss, p.drive_khz, p.peak_mw,
                       p.avg_mw});
    write_power_table_csv(table_path, table);
    nlohmann::json echo;
    echo["power"] = {{"efficiency_khz_per_sqrt_mw", a.efficiency},
                     {"bz_gauss", a.bz_gauss},
                     {"omega_khz", a.omega_khz},
                     {"omega_prime_khz", a.omega_prime_khz},
                     {"omega_pulse_khz", a.omega_pulse_khz},
                     {"n_pulses", a.n_pulses},
                     {"tau_us", a.tau_us},
                     {"t_pi_us", a.t_pi_us}};
    write_manifest(man_path, echo.dump(), 0, {table_path});
    std::cerr << "wrote " << table_path << ", " << man_path << "\n";
  }
  return 0;
}

// rotating-frame fast path against the piecewise lab-frame integrator on a
// one-carbon modulation sweep; agreement is reported as plain RMS of the
// signal difference, pass below 1 percent
int cmd_oracle_check(int points, double carrier_mhz, double t_f_us,
                     int threads) {
  if (points < 2) throw ConfigError("--points must be >= 2");
  if (carrier_mhz <= 0.0) throw ConfigError("--carrier-mhz must be > 0");
  if (t_f_us <= 0.0) throw ConfigError("--t-f must be > 0");
  if (threads < 1) throw ConfigError("--threads must be >= 1");

  SpinSystemSpec sys;
  sys.bz_gauss = 1840.0;
  sys.nuclei.push_back({"c1", {40.0, 0.0, -11.3}, false});

  SweepPlan plan;
  plan.protocol = Protocol::PmHhdr;
  plan.swept = SweptParameter::Nu;
  plan.fixed.omega_prime_khz = 104.0;
  plan.fixed.t_f_us = t_f_us;
  plan.enforce_floor = false;
  const double lo = 1852.0, hi = 1892.0;
  for (int i = 0; i < points; ++i)
    plan.grid.push_back(lo + (hi - lo) * i / (points - 1));

  Spectrum fast = run_sweep(sys, plan, {}, threads);
  LabOracleOptions opt;
  opt.carrier_mhz = carrier_mhz;
  Spectrum slow = run_sweep_lab_oracle(sys, plan, opt, threads);

  double sq = 0.0;
  for (std::size_t i = 0; i < fast.points.size(); ++i) {
    const double d = fast.points[i].signal - slow.points[i].signal;
    sq += d * d;
  }
  const double rms = std::sqrt(sq / static_cast<double>(fast.points.size()));
  const bool pass = rms <= 0.01;
  std::printf("oracle-check: points=%d carrier=%.6g MHz rms=%.3e -> %s\n",
              points, carrier_mhz, rms, pass ? "pass" : "fail");
  return pass ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"nuclear-spin detection simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  bool dump = false;
  std::string format;
  app.add_option("--config", config_path, "experiment config (json)");
  auto* out_opt =
      app.add_option("--out-dir", out_dir, "directory for emitted files");
  app.add_option("--threads", threads, "worker cap for sweeps");
  app.add_flag("--dump-program", dump,
               "print the compiled program for the first grid point");
  app.add_option("--format", format, "stdout payload format (csv or json)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the configured sweep, fit it, emit spectrum and report");
  CLI::App* fit =
      app.add_subcommand("fit", "fit dips in a previously written spectrum");
  std::string fit_csv;
  fit->add_option("spectrum", fit_csv, "spectrum csv path")->required();

  CLI::App* predict = app.add_subcommand(
      "predict", "print the modulation-sideband dip positions");
  double p_bz = 0.0, p_apar = 0.0, p_omega = 0.0;
  predict->add_option("--bz", p_bz, "static field, gauss")->required();
  predict->add_option("--apar", p_apar, "parallel coupling, kHz")->required();
  predict->add_option("--omega,--omega-prime", p_omega, "tone amplitude, kHz")
      ->required();

  CLI::App* power = app.add_subcommand(
      "power", "microwave power per scheme at an antenna efficiency");
  PowerArgs pa;
  power->add_option("--scheme", pa.scheme,
                    "restrict to one scheme (hhdr, pm_hhdr, xy_n)");
  power->add_option("--efficiency", pa.efficiency,
                    "antenna efficiency, kHz per sqrt(mW)");
  power->add_option("--bz", pa.bz_gauss, "field column for the table, gauss");
  power->add_option("--omega", pa.omega_khz, "hhdr lock amplitude, kHz");
  power->add_option("--omega-prime", pa.omega_prime_khz, "pm tone, kHz");
  power->add_option("--omega-pulse", pa.omega_pulse_khz,
                    "pulsed pi rabi, kHz");
  power->add_option("--n-pulses", pa.n_pulses, "pulse count");
  power->add_option("--tau", pa.tau_us, "half inter-pulse spacing, us");
  power->add_option("--t-pi", pa.t_pi_us, "pi pulse length, us");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "rotating frame against the lab-frame integrator");
  int o_points = 25;
  double o_carrier = 50.0, o_tf = 12.0;
  oracle->add_option("--points", o_points, "grid points");
  oracle->add_option("--carrier-mhz", o_carrier, "lab carrier frequency");
  oracle->add_option("--t-f", o_tf, "interrogation time, us");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help and version exit clean, usage errors do not
  }

  try {
    if (sweep->parsed())
      return cmd_sweep(config_path, out_dir, threads, dump, format);
    if (fit->parsed()) return cmd_fit(fit_csv, out_dir, format);
    if (predict->parsed()) return cmd_predict(p_bz, p_apar, p_omega);
    if (power->parsed()) return cmd_power(pa, out_dir, out_opt->count() > 0);
    if (oracle->parsed())
      return cmd_oracle_check(o_points, o_carrier, o_tf, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;  // unreachable with require_subcommand(1)
}

}  // namespace nvdr
