#include <cmath>

#include "doctest.h"
#include "nvdr/analytic.hpp"
#include "nvdr/propagator.hpp"
#include "nvdr/sequences.hpp"
#include "nvdr/state.hpp"
#include "test_helpers.hpp"

using namespace nvdr;

namespace {

// dressed |+x> population after a compiled program
double run_protocol(const SpinSystemSpec& sys, const ControlProgram& p,
                    NuclearInit nuc) {
  const auto in = make_initial_state(sys, ElectronInit::PlusX, nuc);
  const auto out = propagate_to_end(in, p);
  return measure_dressed_population(out, ReadoutAxis::PlusX);
}

SpinSystemSpec carbon(double a_perp_khz, double a_par_khz = -11.3) {
  SpinSystemSpec sys;
  sys.bz_gauss = 1840.0;
  sys.nuclei.push_back({"c", {a_perp_khz, 0.0, a_par_khz}, false});
  return sys;
}

}  // namespace

TEST_CASE("locked population follows the flip-flop law on resonance") {
  // matching condition: drive amplitude equal to the shifted nuclear frequency
  const double a_perp = 40.0;
  const auto sys = carbon(a_perp);
  const double target = predict_pm_resonances(1840.0, -11.3, 104.0).target_khz;
  REQUIRE(target == doctest::Approx(1975.9956));

  // full transfer |+, up> -> |-, down> at t = 1/A_perp; the analytic curve
  // carries corrections of order A_perp / Omega ~ 2e-2
  for (double t : {3.0, 8.0, 12.5, 18.0, 25.0}) {
    const auto p = compile_hhdr(sys, target, t);
    const double got = run_protocol(sys, p, NuclearInit::Up);
    const double want = std::pow(std::cos(2.0 * M_PI * a_perp * 1e-3 * t / 4.0), 2);
    CHECK(std::abs(got - want) < 0.03);
  }

  const auto p_zero = compile_hhdr(sys, target, 25.0);
  CHECK(run_protocol(sys, p_zero, NuclearInit::Up) < 0.05);

  // the opposite polarization is the counter-rotating branch and holds still
  CHECK(run_protocol(sys, p_zero, NuclearInit::Down) > 0.95);

  // an unpolarized nucleus bottoms out on the 1/2 baseline
  CHECK(run_protocol(sys, p_zero, NuclearInit::MaximallyMixed) ==
        doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("detuned lock leaves the population high") {
  const auto sys = carbon(40.0);
  const auto p = compile_hhdr(sys, 1700.0, 25.0);  // 276 kHz off the condition
  CHECK(run_protocol(sys, p, NuclearInit::Up) > 0.95);
}

TEST_CASE("pm signal matches the Bessel-scaled analytic curve") {
  // this comparison pins the 2 pi bookkeeping of the whole stack: a factor
  // slip anywhere moves the first zero by an integer factor
  const double a_perp = 100.0;
  const double omega_prime = 300.0;
  const auto sys = carbon(a_perp);
  const auto res = predict_pm_resonances(1840.0, -11.3, omega_prime);
  const double nu = res.nu_minus_khz;
  REQUIRE(nu == doctest::Approx(1675.9956));

  const double rate_mhz =
      pm_flip_flop_rate_khz(a_perp, omega_prime, nu) * 1e-3;
  const double t_zero = 1.0 / (2.0 * rate_mhz);  // ~88 us

  for (double frac : {0.15, 0.4, 0.6, 0.85, 1.0}) {
    PmParams pm;
    pm.omega_prime_khz = omega_prime;
    pm.nu_khz = nu;
    pm.t_f_us = frac * t_zero;
    const auto p = compile_pm_hhdr(sys, pm);
    const double got = run_protocol(sys, p, NuclearInit::Up);
    const double want = analytic_pm_signal(a_perp, omega_prime, nu,
                                           p.metadata.at("realized_t_f_us"));
    CHECK(std::abs(got - want) < 0.05);
  }
}

TEST_CASE("pm sidebands address opposite nuclear polarizations") {
  // moderate coupling: the leading-order resonance condition carries a
  // quadratic-in-A_perp shift (nuclear axis tilt plus level repulsion), so the
  // clean-transfer check belongs in the perturbative regime
  const double a_perp = 30.0;
  const double omega_prime = 300.0;
  const auto sys = carbon(a_perp);
  const auto res = predict_pm_resonances(1840.0, -11.3, omega_prime);

  SUBCASE("lower sideband flips spin-up") {
    const double rate = pm_flip_flop_rate_khz(a_perp, omega_prime,
                                              res.nu_minus_khz) * 1e-3;
    PmParams pm;
    pm.omega_prime_khz = omega_prime;
    pm.nu_khz = res.nu_minus_khz;
    pm.t_f_us = 1.0 / (2.0 * rate);
    const auto p = compile_pm_hhdr(sys, pm);
    CHECK(run_protocol(sys, p, NuclearInit::Up) < 0.05);
    CHECK(run_protocol(sys, p, NuclearInit::Down) > 0.9);
  }

  SUBCASE("upper sideband flips spin-down") {
    const double rate = pm_flip_flop_rate_khz(a_perp, omega_prime,
                                              res.nu_plus_khz) * 1e-3;
    PmParams pm;
    pm.omega_prime_khz = omega_prime;
    pm.nu_khz = res.nu_plus_khz;
    pm.t_f_us = 1.0 / (2.0 * rate);
    const auto p = compile_pm_hhdr(sys, pm);
    CHECK(run_protocol(sys, p, NuclearInit::Down) < 0.05);
    CHECK(run_protocol(sys, p, NuclearInit::Up) > 0.9);
  }
}

TEST_CASE("pm off the sideband stays locked") {
  const auto sys = carbon(100.0);
  PmParams pm;
  pm.omega_prime_khz = 300.0;
  pm.nu_khz = 1500.0;  // 176 kHz below the lower sideband
  pm.t_f_us = 88.0;
  const auto p = compile_pm_hhdr(sys, pm);
  CHECK(run_protocol(sys, p, NuclearInit::Up) > 0.9);
}

TEST_CASE("xy-n dips at the averaged precession half-period") {
  const auto sys = carbon(60.0);
  const double f0_mhz = sys.larmor_khz() * 1e-3;
  const double f1_mhz = f0_mhz + 11.3e-3;  // m_s = 1 gap, a_zz < 0
  const double tau_res = 1.0 / (2.0 * (f0_mhz + f1_mhz));

  XyParams xy;
  xy.n_pulses = 96;
  xy.tau_us = tau_res;
  CHECK(run_protocol(sys, compile_xyn(sys, xy), NuclearInit::MaximallyMixed) <
        0.1);

  for (double off : {-0.01, 0.01}) {
    xy.tau_us = tau_res + off;
    CHECK(run_protocol(sys, compile_xyn(sys, xy),
                       NuclearInit::MaximallyMixed) > 0.95);
  }
}

TEST_CASE("xy-n contrast deepens with pulse number before rephasing") {
  const auto sys = carbon(60.0);
  const double tau_res = 1.0 / (2.0 * (2.0 * sys.larmor_khz() * 1e-3 + 11.3e-3));
  XyParams xy;
  xy.tau_us = tau_res;

  xy.n_pulses = 32;
  const double p32 = run_protocol(sys, compile_xyn(sys, xy),
                                  NuclearInit::MaximallyMixed);
  xy.n_pulses = 96;
  const double p96 = run_protocol(sys, compile_xyn(sys, xy),
                                  NuclearInit::MaximallyMixed);
  CHECK(p32 > 0.6);  // partial rotation
  CHECK(p96 < 0.1);  // near-complete contrast
}
