#pragma once

#include "nvdr/hamiltonian.hpp"

namespace nvdr {

enum class ElectronInit { Zero, PlusX };
enum class NuclearInit { MaximallyMixed, Up, Down };
enum class ReadoutAxis { PlusX, ZeroOne };

// density matrix over the joint space, electron slowest index
struct DensityState {
  Matrix rho;
  int n_nuclei = 0;

  int dim() const { return static_cast<int>(rho.rows()); }

  // trace within 1e-9 of one, Hermitian to 1e-10, eigenvalues >= -1e-9
  void validate() const;
};

// PlusX prepares (|0>+|1>)/sqrt(2) on the electron (locked dressed state),
// Zero prepares |0>; nuclei default to the maximally mixed thermal state
DensityState make_initial_state(const SpinSystemSpec& sys,
                                ElectronInit electron = ElectronInit::PlusX,
                                NuclearInit nuclear = NuclearInit::MaximallyMixed);

// Tr(P rho) with P = |+><+| (x) 1 (PlusX) or |0><0| (x) 1 (ZeroOne)
double measure_dressed_population(const DensityState& state, ReadoutAxis axis);

// damps electron coherences between the dressed states |+> and |-> by
// exp(-2 pi rate duration), leaving dressed populations untouched.
// off by default everywhere; models rotating-frame decoherence, which for
// locked states is the millisecond-scale T1rho rather than T2*.
DensityState apply_dephasing(const DensityState& state, double rate_khz,
                             double duration_us);

// (1/2) ||a - b||_1
double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace nvdr
