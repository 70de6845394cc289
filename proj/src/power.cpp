#include "nvdr/power.hpp"

#include <string>

#include "nvdr/errors.hpp"

namespace nvdr {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ConfigError(std::string(name) + " must be positive, got " +
                      std::to_string(v));
  }
}

double peak_of(const PowerConfig& cfg, double omega_max_khz) {
  const double field = omega_max_khz / cfg.efficiency_khz_per_sqrt_mw;
  return field * field;
}

}  // namespace

const char* scheme_tag(Scheme s) {
  switch (s) {
    case Scheme::Hhdr:
      return "hhdr";
    case Scheme::PmHhdr:
      return "pm_hhdr";
    default:
      return "xy_n";
  }
}

std::optional<Scheme> parse_scheme(const std::string& tag) {
  if (tag == "hhdr") return Scheme::Hhdr;
  if (tag == "pm_hhdr") return Scheme::PmHhdr;
  if (tag == "xy_n") return Scheme::XyN;
  return std::nullopt;
}

void PowerConfig::validate() const {
  require_positive(efficiency_khz_per_sqrt_mw, "radiation efficiency");
}

SchemePower power_hhdr(const PowerConfig& cfg, double omega_khz) {
  cfg.validate();
  require_positive(omega_khz, "omega");
  const double peak = peak_of(cfg, omega_khz);
  return {Scheme::Hhdr, omega_khz, peak, peak};
}

SchemePower power_pm_hhdr(const PowerConfig& cfg, double omega_prime_khz) {
  cfg.validate();
  require_positive(omega_prime_khz, "omega'");
  // amplitude toggles between 2 omega' and 0 with equal dwell
  const double peak = peak_of(cfg, 2.0 * omega_prime_khz);
  return {Scheme::PmHhdr, omega_prime_khz, peak, 0.5 * peak};
}

SchemePower power_xyn(const PowerConfig& cfg, double omega_pulse_khz,
                      int n_pulses, double tau_us, double t_pi_us) {
  cfg.validate();
  require_positive(omega_pulse_khz, "omega_pulse");
  require_positive(tau_us, "tau");
  require_positive(t_pi_us, "t_pi");
  if (n_pulses < 1) {
    throw ConfigError("n_pulses must be at least 1, got " +
                      std::to_string(n_pulses));
  }
  if (t_pi_us > 2.0 * tau_us) {
    throw ConfigError("pulses overlap: t_pi = " + std::to_string(t_pi_us) +
                      " us exceeds the 2 tau = " +
                      std::to_string(2.0 * tau_us) + " us spacing");
  }
  const double peak = peak_of(cfg, omega_pulse_khz);
  // n pulses of t_pi inside n spacings of 2 tau
  const double duty = t_pi_us / (2.0 * tau_us);
  return {Scheme::XyN, omega_pulse_khz, peak, peak * duty};
}

}  // namespace nvdr
