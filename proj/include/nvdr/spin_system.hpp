#pragma once

#include <string>
#include <vector>

#include "nvdr/constants.hpp"

namespace nvdr {

// secular hyperfine vector (A_zx, A_zy, A_zz) in kHz; only the electron-z row
// of the coupling tensor survives the zero-field splitting
struct HyperfineVector {
  double azx_khz = 0.0;
  double azy_khz = 0.0;
  double azz_khz = 0.0;

  double a_par_khz() const { return azz_khz; }
  double a_perp_khz() const;
};

struct NuclearSpinSpec {
  std::string label;
  HyperfineVector hyperfine;
  bool bath_proxy = false;  // single-spin stand-in for an unresolved bath
};

// joint system of the electron pseudo-spin and k spin-1/2 nuclei.
// basis ordering: electron slowest index, then nuclei in list order,
// spin-up (I_z = +1/2) before spin-down within each nucleus.
struct SpinSystemSpec {
  double bz_gauss = 0.0;
  std::vector<NuclearSpinSpec> nuclei;
  PhysicalConstants constants;

  int n_nuclei() const { return static_cast<int>(nuclei.size()); }
  int dim() const { return 2 << n_nuclei(); }
  double larmor_khz() const { return constants.larmor_khz(bz_gauss); }

  // bz > 0, unique labels; any nucleus count (the joint-space cap applies
  // only where the joint Hilbert space is actually built)
  void validate() const;

  // k <= 4, keeping the joint Hilbert space at dim <= 32; called by the
  // Hamiltonian builders and by joint-composition sweeps
  void validate_joint() const;

  // copy of this system holding only nucleus j, for independent-spin sweeps
  SpinSystemSpec single_nucleus(int j) const;
};

}  // namespace nvdr
