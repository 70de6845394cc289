#include "nvdr/sequences.hpp"

#include <cmath>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

namespace {

constexpr double kMinHalfPeriodUs = 1e-4;

Matrix ideal_pi_unitary(const SpinSystemSpec& sys, bool about_y) {
  // exp(-i pi sigma/2) = -i sigma
  const Matrix sigma = about_y ? ops::sy() : ops::sx();
  return embed_electron(Complex(0.0, -1.0) * sigma, sys.n_nuclei());
}

}  // namespace

void PmParams::validate() const {
  if (!(omega_prime_khz > 0.0))
    throw ConfigError("pm drive omega_prime_khz must be positive");
  if (!(nu_khz > 0.0))
    throw ConfigError("pm modulation nu_khz must be positive");
  if (!(t_f_us >= 0.0))
    throw ConfigError("pm t_f_us must be non-negative");
  const double half_us = 500.0 / nu_khz;
  if (half_us < kMinHalfPeriodUs) {
    std::ostringstream msg;
    msg << "modulation half-period " << half_us << " us is below the supported "
        << kMinHalfPeriodUs << " us floor (nu too large)";
    throw ConfigError(msg.str());
  }
}

void XyParams::validate() const {
  if (n_pulses < 0 || n_pulses % 8 != 0)
    throw ConfigError("n_pulses must be a non-negative multiple of 8");
  if (n_pulses > 0 && !(tau_us > 0.0))
    throw ConfigError("tau_us must be positive");
  if (pulse == PulseModel::Finite) {
    if (!(omega_pi_khz > 0.0))
      throw ConfigError("finite pulses need omega_pi_khz > 0");
    const double t_pi_us = 500.0 / omega_pi_khz;
    if (t_pi_us > 2.0 * tau_us) {
      std::ostringstream msg;
      msg << "pi time " << t_pi_us << " us does not fit in the 2 tau = "
          << 2.0 * tau_us << " us inter-pulse interval";
      throw ConfigError(msg.str());
    }
  }
}

ControlProgram compile_hhdr(const SpinSystemSpec& sys, double omega_khz,
                            double t_f_us) {
  if (!(omega_khz > 0.0)) throw ConfigError("hhdr drive omega_khz must be positive");
  if (!(t_f_us >= 0.0)) throw ConfigError("hhdr t_f_us must be non-negative");

  ControlProgram p;
  p.protocol = Protocol::Hhdr;
  p.palette.push_back(Segment::evolve(build_rotating_frame_hamiltonian(sys, omega_khz),
                                      t_f_us, omega_khz, 0.0, "lock"));
  p.schedule.push_back({{0}, 1});
  p.total_duration_us = t_f_us;
  p.metadata["omega_khz"] = omega_khz;
  p.validate();
  return p;
}

ControlProgram compile_pm_hhdr(const SpinSystemSpec& sys, const PmParams& pm) {
  pm.validate();
  const double half_us = 500.0 / pm.nu_khz;
  const auto n_half = static_cast<std::uint64_t>(
      std::floor(pm.t_f_us / half_us + 1e-9));
  if (n_half == 0)
    throw ConfigError("t_f shorter than one modulation half-period");

  ControlProgram p;
  p.protocol = Protocol::PmHhdr;
  const double high_khz = 2.0 * pm.omega_prime_khz;
  p.palette.push_back(Segment::evolve(build_rotating_frame_hamiltonian(sys, high_khz),
                                      half_us, high_khz, 0.0, "high"));
  p.palette.push_back(Segment::evolve(build_rotating_frame_hamiltonian(sys, 0.0),
                                      half_us, 0.0, 0.0, "low"));

  const std::uint32_t first = pm.start_high ? 0 : 1;
  const std::uint32_t second = pm.start_high ? 1 : 0;
  if (n_half >= 2)
    p.schedule.push_back({{first, second}, n_half / 2});
  if (n_half % 2 == 1)
    p.schedule.push_back({{first}, 1});

  p.total_duration_us = half_us * static_cast<double>(n_half);
  p.metadata["omega_prime_khz"] = pm.omega_prime_khz;
  p.metadata["nu_khz"] = pm.nu_khz;
  p.metadata["half_period_us"] = half_us;
  p.metadata["n_half_periods"] = static_cast<double>(n_half);
  p.metadata["realized_t_f_us"] = p.total_duration_us;
  p.validate();
  return p;
}

ControlProgram compile_xyn(const SpinSystemSpec& sys, const XyParams& xy) {
  xy.validate();

  ControlProgram p;
  p.protocol = Protocol::XyN;
  const HamiltonianTerm h_free = build_rotating_frame_hamiltonian(sys, 0.0);

  if (xy.n_pulses == 0) {
    p.palette.push_back(Segment::evolve(h_free, 0.0, 0.0, 0.0, "free"));
    p.schedule.push_back({{0}, 1});
    p.total_duration_us = 0.0;
    p.validate();
    return p;
  }

  // pattern indices: 0 = edge free, 1 = interior free, 2 = pi_x, 3 = pi_y
  static constexpr bool kXy8AboutY[8] = {false, true, false, true,
                                         true, false, true, false};
  std::vector<std::uint32_t> block;
  double block_dur = 0.0;

  if (xy.pulse == PulseModel::Ideal) {
    p.palette.push_back(Segment::evolve(h_free, xy.tau_us, 0.0, 0.0, "free"));
    p.palette.push_back(Segment::evolve(h_free, 2.0 * xy.tau_us, 0.0, 0.0, "free"));
    p.palette.push_back(Segment::pulse(ideal_pi_unitary(sys, false), "pi_x"));
    p.palette.push_back(Segment::pulse(ideal_pi_unitary(sys, true), "pi_y"));
  } else {
    const double t_pi = 500.0 / xy.omega_pi_khz;
    // pulse centers stay at the ideal positions; free intervals shrink
    p.palette.push_back(Segment::evolve(h_free, xy.tau_us - 0.5 * t_pi, 0.0, 0.0,
                                        "free"));
    p.palette.push_back(Segment::evolve(h_free, 2.0 * xy.tau_us - t_pi, 0.0, 0.0,
                                        "free"));
    p.palette.push_back(Segment::evolve(
        build_rotating_frame_hamiltonian(sys, xy.omega_pi_khz, 0.0), t_pi,
        xy.omega_pi_khz, 0.0, "pi_x"));
    p.palette.push_back(Segment::evolve(
        build_rotating_frame_hamiltonian(sys, xy.omega_pi_khz, M_PI / 2.0), t_pi,
        xy.omega_pi_khz, M_PI / 2.0, "pi_y"));
    p.metadata["t_pi_us"] = t_pi;
  }

  block.push_back(0);
  for (int i = 0; i < 8; ++i) {
    block.push_back(kXy8AboutY[i] ? 3 : 2);
    block.push_back(i == 7 ? 0 : 1);
  }
  for (std::uint32_t idx : block) block_dur += p.palette[idx].duration_us;

  p.schedule.push_back({std::move(block), static_cast<std::uint64_t>(xy.n_pulses / 8)});
  p.total_duration_us = block_dur * (xy.n_pulses / 8.0);
  p.metadata["tau_us"] = xy.tau_us;
  p.metadata["n_pulses"] = xy.n_pulses;
  p.validate();
  return p;
}

}  // namespace nvdr
