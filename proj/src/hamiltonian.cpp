#include "nvdr/hamiltonian.hpp"

#include <cmath>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

void PhysicalConstants::validate() const {
  if (d_mhz < 1000.0) {
    std::ostringstream msg;
    msg << "zero-field splitting d_mhz = " << d_mhz
        << " below the 1000 MHz sanity bound";
    throw ConfigError(msg.str());
  }
  if (gamma_e_mhz_per_g <= 0.0 || gamma_n_khz_per_g <= 0.0)
    throw ConfigError("gyromagnetic ratios must be positive magnitudes");
}

double HyperfineVector::a_perp_khz() const {
  return std::hypot(azx_khz, azy_khz);
}

void SpinSystemSpec::validate() const {
  constants.validate();
  if (!(bz_gauss > 0.0))
    throw ConfigError("bz_gauss must be positive");
  for (int i = 0; i < n_nuclei(); ++i)
    for (int j = i + 1; j < n_nuclei(); ++j)
      if (nuclei[i].label == nuclei[j].label)
        throw ConfigError("duplicate nucleus label: " + nuclei[i].label);
}

void SpinSystemSpec::validate_joint() const {
  validate();
  if (n_nuclei() > 4) {
    std::ostringstream msg;
    msg << "k = " << n_nuclei() << " nuclei exceeds the supported joint limit of 4 "
        << "(Hilbert dimension capped at 32); split the system or use "
        << "independent composition";
    throw ConfigError(msg.str());
  }
}

SpinSystemSpec SpinSystemSpec::single_nucleus(int j) const {
  SpinSystemSpec out = *this;
  out.nuclei = {nuclei.at(j)};
  return out;
}

void HamiltonianTerm::validate() const {
  if (matrix.rows() != matrix.cols())
    throw NumericError("hamiltonian matrix is not square");
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double asym = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (asym >= 1e-12 * std::max(scale, 1.0)) {
    std::ostringstream msg;
    msg << "hamiltonian is not Hermitian: max|H - H^dag| = " << asym
        << " against scale " << scale;
    throw NumericError(msg.str());
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace ops {

Matrix ix() {
  Matrix m(2, 2);
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}

Matrix iy() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -0.5), Complex(0, 0.5), Complex(0, 0);
  return m;
}

Matrix iz() {
  Matrix m(2, 2);
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}

Matrix sx() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix sy() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix sz_projector() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

Matrix id(int dim) { return Matrix::Identity(dim, dim); }

}  // namespace ops

Matrix embed_nuclear(const Matrix& op, int slot, int k) {
  if (slot < 0 || slot >= k) throw NumericError("nuclear slot out of range");
  Matrix out = ops::id(1 << slot);
  out = kron(out, op);
  out = kron(out, ops::id(1 << (k - slot - 1)));
  return out;
}

Matrix embed_electron(const Matrix& op, int k) {
  return kron(op, ops::id(1 << k));
}

HamiltonianTerm build_static_hamiltonian(const SpinSystemSpec& sys) {
  sys.validate_joint();
  const int k = sys.n_nuclei();
  const int dim = sys.dim();

  Matrix h = Matrix::Zero(dim, dim);

  // electron: diag{0, D - gamma_e Bz} (m_s = 0 level taken as energy zero)
  Matrix he = Matrix::Zero(2, 2);
  he(1, 1) = sys.constants.d_mhz - sys.constants.gamma_e_mhz_per_g * sys.bz_gauss;
  h += embed_electron(he, k);

  const double larmor_mhz = sys.larmor_khz() * kKhzToMhz;

  for (int j = 0; j < k; ++j) {
    const HyperfineVector& a = sys.nuclei[j].hyperfine;
    h -= larmor_mhz * kron(ops::id(2), embed_nuclear(ops::iz(), j, k));
    Matrix adoti = a.azx_khz * kKhzToMhz * ops::ix() +
                   a.azy_khz * kKhzToMhz * ops::iy() +
                   a.azz_khz * kKhzToMhz * ops::iz();
    h += kron(ops::sz_projector(), embed_nuclear(adoti, j, k));
  }

  HamiltonianTerm term{std::move(h), Frame::Lab};
  term.validate();
  return term;
}

HamiltonianTerm build_rotating_frame_hamiltonian(const SpinSystemSpec& sys,
                                                 double drive_amplitude_khz,
                                                 double phase_rad,
                                                 double detuning_khz) {
  sys.validate_joint();
  if (drive_amplitude_khz < 0.0)
    throw ConfigError("drive amplitude must be non-negative");
  const int k = sys.n_nuclei();
  const int dim = sys.dim();

  Matrix h = Matrix::Zero(dim, dim);

  const double omega_mhz = drive_amplitude_khz * kKhzToMhz;
  Matrix drive = 0.5 * omega_mhz *
                 (std::cos(phase_rad) * ops::sx() + std::sin(phase_rad) * ops::sy());
  drive += detuning_khz * kKhzToMhz * ops::sz_projector();
  h += embed_electron(drive, k);

  const double larmor_mhz = sys.larmor_khz() * kKhzToMhz;

  for (int j = 0; j < k; ++j) {
    const HyperfineVector& a = sys.nuclei[j].hyperfine;
    h -= larmor_mhz * kron(ops::id(2), embed_nuclear(ops::iz(), j, k));
    Matrix adoti = a.azx_khz * kKhzToMhz * ops::ix() +
                   a.azy_khz * kKhzToMhz * ops::iy() +
                   a.azz_khz * kKhzToMhz * ops::iz();
    h += kron(ops::sz_projector(), embed_nuclear(adoti, j, k));
  }

  HamiltonianTerm term{std::move(h), Frame::Rotating};
  term.validate();
  return term;
}

}  // namespace nvdr
