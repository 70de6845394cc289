#pragma once

#include "nvdr/program.hpp"
#include "nvdr/spin_system.hpp"

namespace nvdr {

// phase-modulated drive: two equal tones of amplitude omega_prime whose
// relative phase toggles between 0 and pi every half modulation period, so
// the effective drive amplitude alternates between 2*omega_prime and 0
struct PmParams {
  double omega_prime_khz = 0.0;  // > 0
  double nu_khz = 0.0;           // modulation frequency, > 0
  double t_f_us = 0.0;
  bool start_high = true;  // first half-period at the summed amplitude

  void validate() const;
};

enum class PulseModel { Ideal, Finite };

struct XyParams {
  int n_pulses = 0;    // multiple of 8 (XY-8 blocks)
  double tau_us = 0.0; // pulse spacing unit: tau - pi - 2tau - pi - tau
  PulseModel pulse = PulseModel::Ideal;
  double omega_pi_khz = 0.0;  // finite-pulse Rabi amplitude

  void validate() const;
};

// continuous spin-locking drive at fixed amplitude and phase 0, one segment
ControlProgram compile_hhdr(const SpinSystemSpec& sys, double omega_khz,
                            double t_f_us);

// alternating half-period segments of amplitude {2 omega_prime, 0}; the
// realized duration is floor(2 nu t_f) half-periods, echoed in metadata
// ("realized_t_f_us", "half_period_us", "n_half_periods")
ControlProgram compile_pm_hhdr(const SpinSystemSpec& sys, const PmParams& pm);

// XY-8 phase pattern X Y X Y Y X Y X, repeated n/8 times, each block
// tau [pi] 2tau [pi] ... tau; ideal pulses are instantaneous unitaries,
// finite pulses are resonant drive segments of length 1/(2 omega_pi)
// carved out of the free intervals around the ideal pulse centers
ControlProgram compile_xyn(const SpinSystemSpec& sys, const XyParams& xy);

}  // namespace nvdr
