#pragma once

#include "nvdr/constants.hpp"

namespace nvdr {

// sideband resonance positions of the phase-modulated double-resonance
// condition |omega_prime +- nu| = |gamma_n Bz - A_par/2|
struct PmResonances {
  double target_khz = 0.0;    // |gamma_n Bz - A_par/2|
  double nu_minus_khz = 0.0;  // target - omega_prime (lower dip)
  double nu_plus_khz = 0.0;   // target + omega_prime (upper dip)
  bool degenerate = false;    // lower sideband at nu <= 0, dips merge or vanish
};

PmResonances predict_pm_resonances(double bz_gauss, double a_par_khz,
                                   double omega_prime_khz,
                                   const PhysicalConstants& constants = {});

// nuclear flip-flop rate at the sideband resonance, A_perp J1(4 omega'/(pi nu)) / 2
double pm_flip_flop_rate_khz(double a_perp_khz, double omega_prime_khz,
                             double nu_khz);

// on-resonance dressed population for a polarized resonant nucleus,
//   cos^2( 2 pi * A_perp J1(4 omega'/(pi nu)) * t_f / 4 )
// (A_perp in MHz inside the formula; the 2 pi matches the propagator
// convention and is pinned by a full-dynamics regression test).
// an unpolarized nucleus oscillates identically on a 1/2 baseline:
// (1 + signal)/2.
double analytic_pm_signal(double a_perp_khz, double omega_prime_khz, double nu_khz,
                          double t_f_us);

}  // namespace nvdr
