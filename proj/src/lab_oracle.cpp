#include "nvdr/lab_oracle.hpp"

#include <cmath>
#include <sstream>

#include "nvdr/errors.hpp"
#include "nvdr/propagator.hpp"

namespace nvdr {

namespace {

// frame rotation R(t) = exp(+i 2 pi f_c t |1><1|) (x) 1; psi_rot = R psi_lab
Matrix frame_rotation(double carrier_mhz, double t_us, int k) {
  Matrix r = Matrix::Identity(2, 2);
  const double phase = 2.0 * M_PI * carrier_mhz * t_us;
  r(1, 1) = Complex(std::cos(phase), std::sin(phase));
  return embed_electron(r, k);
}

}  // namespace

DensityState lab_frame_oracle(const SpinSystemSpec& sys,
                              const ControlProgram& program,
                              const DensityState& in,
                              const LabOracleOptions& opt) {
  program.validate();
  if (!(opt.carrier_mhz > 0.0)) throw ConfigError("oracle carrier must be positive");
  const double dt_max = 1.0 / (50.0 * opt.carrier_mhz);
  double dt = opt.dt_us == 0.0 ? dt_max : opt.dt_us;
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "oracle step dt = " << dt << " us exceeds 1/(50 carrier) = " << dt_max;
    throw ConfigError(msg.str());
  }

  const int k = sys.n_nuclei();

  // static part with the electron transition replaced by the reduced carrier,
  // so the programmed drive is exactly on resonance
  Matrix h0 = build_static_hamiltonian(sys).matrix;
  Matrix he = Matrix::Zero(2, 2);
  he(1, 1) = opt.carrier_mhz - (sys.constants.d_mhz -
                                sys.constants.gamma_e_mhz_per_g * sys.bz_gauss);
  h0 += embed_electron(he, k);

  const Matrix x_op = embed_electron(ops::sx(), k);

  Matrix u_total = Matrix::Identity(in.rho.rows(), in.rho.cols());
  double now = 0.0;

  program.for_each_segment([&](const Segment& seg) {
    if (seg.instantaneous) {
      // a rotating-frame unitary applied at global time `now`
      const Matrix r = frame_rotation(opt.carrier_mhz, now, k);
      u_total = r.adjoint() * seg.unitary * r * u_total;
      return;
    }
    if (seg.duration_us == 0.0) return;
    const auto n_steps =
        static_cast<std::uint64_t>(std::ceil(seg.duration_us / dt - 1e-12));
    const double step = seg.duration_us / static_cast<double>(n_steps);
    const double omega_mhz = seg.amplitude_khz * kKhzToMhz;
    // rotating-frame phase phi maps to carrier phase -phi in this frame
    const double phi_lab = -seg.phase_rad;
    Matrix h(h0.rows(), h0.cols());
    for (std::uint64_t i = 0; i < n_steps; ++i) {
      const double t_mid = now + (static_cast<double>(i) + 0.5) * step;
      const double envelope =
          omega_mhz * std::cos(2.0 * M_PI * opt.carrier_mhz * t_mid + phi_lab);
      h = h0 + envelope * x_op;
      u_total = hermitian_propagator(h, step) * u_total;
    }
    now += seg.duration_us;
  });

  const Matrix r_end = frame_rotation(opt.carrier_mhz, now, k);
  DensityState out = in;
  out.rho = r_end * u_total * in.rho * u_total.adjoint() * r_end.adjoint();
  return out;
}

}  // namespace nvdr
