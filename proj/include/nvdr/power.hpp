#pragma once

#include <optional>
#include <string>

namespace nvdr {

enum class Scheme { Hhdr, PmHhdr, XyN };
const char* scheme_tag(Scheme s);
std::optional<Scheme> parse_scheme(const std::string& tag);

// radiation efficiency converts drive amplitude to emitted power,
// field = efficiency * sqrt(power). the default is a placeholder; real
// values come from a per-setup calibration and belong in the config
struct PowerConfig {
  double efficiency_khz_per_sqrt_mw = 1.0;
  void validate() const;
};

// drive_khz is the scheme's characteristic amplitude (the number quoted
// when schemes are compared); peak_mw uses the largest instantaneous
// amplitude, which for pm-hhdr is twice the drive
struct SchemePower {
  Scheme scheme;
  double drive_khz;
  double peak_mw;
  double avg_mw;
};

SchemePower power_hhdr(const PowerConfig& cfg, double omega_khz);
SchemePower power_pm_hhdr(const PowerConfig& cfg, double omega_prime_khz);
SchemePower power_xyn(const PowerConfig& cfg, double omega_pulse_khz,
                      int n_pulses, double tau_us, double t_pi_us);

}  // namespace nvdr
