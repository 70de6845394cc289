#include "nvdr/state.hpp"

#include <cmath>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

void DensityState::validate() const {
  if (rho.rows() != rho.cols()) throw NumericError("density matrix not square");
  if (rho.rows() != (2LL << n_nuclei))
    throw NumericError("density matrix dimension inconsistent with nucleus count");
  const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_err > 1e-9) {
    std::ostringstream msg;
    msg << "density matrix trace off by " << tr_err;
    throw NumericError(msg.str());
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericError("density matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    std::ostringstream msg;
    msg << "density matrix has negative eigenvalue " << es.eigenvalues().minCoeff();
    throw NumericError(msg.str());
  }
}

DensityState make_initial_state(const SpinSystemSpec& sys, ElectronInit electron,
                                NuclearInit nuclear) {
  sys.validate_joint();
  const int k = sys.n_nuclei();

  Matrix rho_e(2, 2);
  switch (electron) {
    case ElectronInit::Zero:
      rho_e << 1.0, 0.0, 0.0, 0.0;
      break;
    case ElectronInit::PlusX:
      rho_e << 0.5, 0.5, 0.5, 0.5;
      break;
  }

  Matrix rho = rho_e;
  for (int j = 0; j < k; ++j) {
    Matrix rho_n = Matrix::Zero(2, 2);
    switch (nuclear) {
      case NuclearInit::MaximallyMixed:
        rho_n(0, 0) = rho_n(1, 1) = 0.5;
        break;
      case NuclearInit::Up:
        rho_n(0, 0) = 1.0;
        break;
      case NuclearInit::Down:
        rho_n(1, 1) = 1.0;
        break;
    }
    rho = kron(rho, rho_n);
  }
  return DensityState{std::move(rho), k};
}

double measure_dressed_population(const DensityState& state, ReadoutAxis axis) {
  const int k = state.n_nuclei;
  Matrix pe(2, 2);
  if (axis == ReadoutAxis::PlusX)
    pe << 0.5, 0.5, 0.5, 0.5;  // |+><+|
  else
    pe << 1.0, 0.0, 0.0, 0.0;  // |0><0|
  const Matrix proj = embed_electron(pe, k);
  return (proj * state.rho).trace().real();
}

DensityState apply_dephasing(const DensityState& state, double rate_khz,
                             double duration_us) {
  if (rate_khz < 0.0 || duration_us < 0.0)
    throw ConfigError("dephasing rate and duration must be non-negative");
  //   rho -> (1+lambda)/2 rho + (1-lambda)/2 X rho X,  X = sigma_x (x) 1
  // scales |+><-| coherences by lambda and fixes everything diagonal in the
  // dressed basis; completely positive and trace preserving for lambda in [0,1]
  const double lambda = std::exp(-2.0 * M_PI * rate_khz * kKhzToMhz * duration_us);
  const Matrix x = embed_electron(ops::sx(), state.n_nuclei);
  DensityState out = state;
  out.rho = 0.5 * (1.0 + lambda) * state.rho +
            0.5 * (1.0 - lambda) * x * state.rho * x;
  return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

}  // namespace nvdr
