#pragma once

#include <complex>

#include <Eigen/Dense>

#include "nvdr/spin_system.hpp"

namespace nvdr {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

enum class Frame { Lab, Rotating };

// dense Hermitian term with ordinary-frequency entries in MHz
struct HamiltonianTerm {
  Matrix matrix;
  Frame frame = Frame::Rotating;

  // enforces max|H - H^dag| < 1e-12 * max|H|; throws NumericError
  void validate() const;
};

Matrix kron(const Matrix& a, const Matrix& b);

namespace ops {

// spin-1/2 operators with eigenvalues +-1/2
Matrix ix();
Matrix iy();
Matrix iz();
// Pauli matrices on the {|0>, |1>} pseudo-spin
Matrix sx();
Matrix sy();
// projector |1><1|; the electron "S_z" of the m_s = {0,+1} manifold
Matrix sz_projector();
Matrix id(int dim);

}  // namespace ops

// op acting on nucleus `slot` of k nuclei, identity on the rest (electron excluded)
Matrix embed_nuclear(const Matrix& op, int slot, int k);
// op acting on the electron, identity on k nuclei
Matrix embed_electron(const Matrix& op, int k);

// lab-frame secular Hamiltonian:
//   diag{0, D - gamma_e Bz} on the electron,
//   - gamma_n Bz I_z per nucleus,
//   + |1><1| (x) (A_zx I_x + A_zy I_y + A_zz I_z) per nucleus.
HamiltonianTerm build_static_hamiltonian(const SpinSystemSpec& sys);

// frame co-rotating with the electron drive:
//   (Omega/2)(cos phi sigma_x + sin phi sigma_y) + detuning |1><1|,
//   nuclear Zeeman and hyperfine unchanged (they commute with the frame
//   rotation about |1><1|).
HamiltonianTerm build_rotating_frame_hamiltonian(const SpinSystemSpec& sys,
                                                 double drive_amplitude_khz,
                                                 double phase_rad = 0.0,
                                                 double detuning_khz = 0.0);

}  // namespace nvdr
