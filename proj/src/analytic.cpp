#include "nvdr/analytic.hpp"

#include <cmath>

#include "nvdr/bessel.hpp"
#include "nvdr/errors.hpp"

namespace nvdr {

PmResonances predict_pm_resonances(double bz_gauss, double a_par_khz,
                                   double omega_prime_khz,
                                   const PhysicalConstants& constants) {
  constants.validate();
  if (!(bz_gauss > 0.0)) throw ConfigError("bz_gauss must be positive");
  if (omega_prime_khz < 0.0) throw ConfigError("omega_prime_khz must be >= 0");

  PmResonances r;
  r.target_khz = std::abs(constants.larmor_khz(bz_gauss) - 0.5 * a_par_khz);
  r.nu_minus_khz = r.target_khz - omega_prime_khz;
  r.nu_plus_khz = r.target_khz + omega_prime_khz;
  r.degenerate = !(r.nu_minus_khz > 0.0);
  return r;
}

double pm_flip_flop_rate_khz(double a_perp_khz, double omega_prime_khz,
                             double nu_khz) {
  if (!(nu_khz > 0.0)) throw ConfigError("nu_khz must be positive");
  return 0.5 * a_perp_khz *
         bessel_j1(4.0 * omega_prime_khz / (M_PI * nu_khz));
}

double analytic_pm_signal(double a_perp_khz, double omega_prime_khz, double nu_khz,
                          double t_f_us) {
  const double rate_mhz =
      pm_flip_flop_rate_khz(a_perp_khz, omega_prime_khz, nu_khz) * kKhzToMhz;
  const double c = std::cos(2.0 * M_PI * 0.5 * rate_mhz * t_f_us);
  return c * c;
}

}  // namespace nvdr
