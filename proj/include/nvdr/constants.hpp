#pragma once

namespace nvdr {

// Unit conventions, used everywhere without further comment:
//
//   frequency   MHz   (hyperfine couplings and drive amplitudes are usually
//                      quoted in kHz at the API surface, converted on entry)
//   time        us
//   field       Gauss
//
// Hamiltonian matrices hold ordinary frequencies in MHz. The single factor of
// 2*pi lives in the propagator, U = exp(-i 2 pi H t), so an on-resonance drive
// of amplitude Omega flips populations as sin^2(pi Omega t).
//
// The electron is the m_s = {0, +1} pseudo-spin of the NV ground-state triplet;
// S_z is the projector |1><1| (eigenvalues {0, 1}), not a Pauli operator.
// Gyromagnetic ratios are magnitudes; their signs are folded into the Zeeman
// terms built in hamiltonian.cpp.

inline constexpr double kKhzToMhz = 1e-3;

struct PhysicalConstants {
  double d_mhz = 2870.0;                // zero-field splitting
  double gamma_e_mhz_per_g = 2.802495;  // electron gyromagnetic ratio
  double gamma_n_khz_per_g = 1.07084;   // 13C nuclear gyromagnetic ratio

  // nuclear Larmor frequency at the given field
  double larmor_khz(double bz_gauss) const { return gamma_n_khz_per_g * bz_gauss; }

  void validate() const;  // d_mhz >= 1000 sanity bound, ratios > 0
};

}  // namespace nvdr
