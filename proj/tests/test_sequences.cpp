#include <cstdint>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "nvdr/errors.hpp"
#include "nvdr/propagator.hpp"
#include "nvdr/sequences.hpp"
#include "nvdr/state.hpp"
#include "test_helpers.hpp"

using namespace nvdr;

TEST_CASE("hhdr compiles to one locking segment") {
  const auto sys = test::bare_electron();
  const auto p = compile_hhdr(sys, 1970.0, 250.0);
  CHECK_NOTHROW(p.validate());
  CHECK(p.protocol == Protocol::Hhdr);
  CHECK(p.segment_count() == 1);
  CHECK(p.total_duration_us == doctest::Approx(250.0));
  CHECK(p.palette[0].amplitude_khz == doctest::Approx(1970.0));
  CHECK(p.metadata.at("omega_khz") == doctest::Approx(1970.0));
}

TEST_CASE("pm program realizes a whole number of half-periods") {
  const auto sys = test::bare_electron();
  PmParams pm;
  pm.omega_prime_khz = 104.0;
  pm.nu_khz = 1871.9956;
  pm.t_f_us = 300.0;
  const auto p = compile_pm_hhdr(sys, pm);
  CHECK_NOTHROW(p.validate());
  CHECK(p.protocol == Protocol::PmHhdr);

  const double half = 500.0 / pm.nu_khz;
  CHECK(p.metadata.at("half_period_us") == doctest::Approx(half).epsilon(1e-12));
  CHECK(p.metadata.at("n_half_periods") == doctest::Approx(1123.0));
  CHECK(p.segment_count() == 1123);
  CHECK(p.metadata.at("realized_t_f_us") ==
        doctest::Approx(1123 * half).epsilon(1e-12));
  CHECK(p.total_duration_us == doctest::Approx(1123 * half).epsilon(1e-12));

  // palette alternates the summed amplitude with zero
  REQUIRE(p.palette.size() == 2);
  CHECK(p.palette[0].amplitude_khz == doctest::Approx(208.0));
  CHECK(p.palette[1].amplitude_khz == doctest::Approx(0.0));

  // logical order: high, low, high, low, ... starting high
  std::vector<double> amps;
  p.for_each_segment([&](const Segment& s) {
    if (amps.size() < 6) amps.push_back(s.amplitude_khz);
  });
  CHECK(amps == std::vector<double>{208.0, 0.0, 208.0, 0.0, 208.0, 0.0});
}

TEST_CASE("pm compile rejects degenerate timing") {
  const auto sys = test::bare_electron();
  PmParams pm;
  pm.omega_prime_khz = 104.0;
  pm.nu_khz = 1872.0;
  pm.t_f_us = 0.1;  // shorter than one half-period
  CHECK_THROWS_AS(compile_pm_hhdr(sys, pm), ConfigError);

  pm.t_f_us = 300.0;
  pm.nu_khz = 6.0e6;  // half-period below the supported floor
  CHECK_THROWS_AS(pm.validate(), ConfigError);

  pm.nu_khz = -2.0;
  CHECK_THROWS_AS(pm.validate(), ConfigError);

  pm.nu_khz = 1872.0;
  pm.omega_prime_khz = 0.0;
  CHECK_THROWS_AS(pm.validate(), ConfigError);
}

TEST_CASE("xy-32 block structure") {
  const auto sys = test::one_carbon(-11.3, 20.0);
  XyParams xy;
  xy.n_pulses = 32;
  xy.tau_us = 0.25;
  const auto p = compile_xyn(sys, xy);
  CHECK_NOTHROW(p.validate());
  CHECK(p.protocol == Protocol::XyN);

  // per XY-8 block: tau, 8 pulses, 7 inner 2tau gaps, closing tau
  CHECK(p.segment_count() == 4 * 17);
  CHECK(p.total_duration_us == doctest::Approx(4 * 16 * 0.25).epsilon(1e-12));

  std::uint64_t pulses = 0;
  double dur = 0.0;
  p.for_each_segment([&](const Segment& s) {
    if (s.instantaneous) ++pulses;
    dur += s.duration_us;
  });
  CHECK(pulses == 32);
  CHECK(dur == doctest::Approx(p.total_duration_us).epsilon(1e-12));
}

TEST_CASE("xy-8 phase pattern is a palindrome") {
  const auto sys = test::bare_electron();
  XyParams xy;
  xy.n_pulses = 8;
  xy.tau_us = 0.5;
  const auto p = compile_xyn(sys, xy);

  std::vector<std::string> labels;
  p.for_each_segment([&](const Segment& s) {
    if (s.instantaneous) labels.push_back(s.label);
  });
  REQUIRE(labels.size() == 8);
  const std::vector<std::string> want = {"pi_x", "pi_y", "pi_x", "pi_y",
                                         "pi_y", "pi_x", "pi_y", "pi_x"};
  CHECK(labels == want);

  // the reversed program plays the identical segment sequence
  std::vector<std::string> fwd, bwd;
  p.for_each_segment([&](const Segment& s) { fwd.push_back(s.label); });
  p.reversed().for_each_segment(
      [&](const Segment& s) { bwd.push_back(s.label); });
  CHECK(fwd == bwd);
}

TEST_CASE("finite pulses carve drive time out of the free gaps") {
  const auto sys = test::bare_electron();
  XyParams xy;
  xy.n_pulses = 8;
  xy.tau_us = 0.5;
  xy.pulse = PulseModel::Finite;
  xy.omega_pi_khz = 10000.0;  // t_pi = 0.05 us
  const auto p = compile_xyn(sys, xy);
  CHECK_NOTHROW(p.validate());

  // total wall time is unchanged by the pulse model
  CHECK(p.total_duration_us == doctest::Approx(16 * 0.5).epsilon(1e-12));
  CHECK(p.metadata.at("t_pi_us") == doctest::Approx(0.05).epsilon(1e-12));

  double drive_time = 0.0;
  p.for_each_segment([&](const Segment& s) {
    if (s.amplitude_khz > 0.0) drive_time += s.duration_us;
  });
  CHECK(drive_time == doctest::Approx(8 * 0.05).epsilon(1e-12));
}

TEST_CASE("xy parameter validation") {
  XyParams xy;
  xy.n_pulses = 7;
  xy.tau_us = 0.5;
  CHECK_THROWS_AS(xy.validate(), ConfigError);

  xy.n_pulses = 8;
  xy.tau_us = -1.0;
  CHECK_THROWS_AS(xy.validate(), ConfigError);

  xy.tau_us = 0.02;
  xy.pulse = PulseModel::Finite;
  xy.omega_pi_khz = 10000.0;  // t_pi = 0.05 > 2 tau = 0.04
  CHECK_THROWS_AS(xy.validate(), ConfigError);

  xy.tau_us = 0.5;
  CHECK_NOTHROW(xy.validate());

  xy.n_pulses = 0;
  const auto p = compile_xyn(test::bare_electron(), xy);
  CHECK(p.total_duration_us == 0.0);
}

TEST_CASE("ideal and finite xy pulses agree for fast pulses") {
  // a finite pi pulse much faster than any internal frequency approaches the
  // instantaneous limit
  const auto sys = test::one_carbon(-11.3, 15.0);
  XyParams ideal;
  ideal.n_pulses = 8;
  ideal.tau_us = 0.3;

  XyParams finite = ideal;
  finite.pulse = PulseModel::Finite;
  finite.omega_pi_khz = 2.0e5;  // t_pi = 2.5 ns

  const auto in = make_initial_state(sys, ElectronInit::PlusX, NuclearInit::Up);
  const auto a = propagate_to_end(in, compile_xyn(sys, ideal));
  const auto b = propagate_to_end(in, compile_xyn(sys, finite));
  CHECK(trace_distance(a.rho, b.rho) < 5e-3);
}

TEST_CASE("dump lists one line per logical segment") {
  const auto sys = test::bare_electron();
  PmParams pm;
  pm.omega_prime_khz = 50.0;
  pm.nu_khz = 1000.0;
  pm.t_f_us = 2.0;  // four half-periods
  const auto p = compile_pm_hhdr(sys, pm);
  std::ostringstream os;
  dump_program(p, os);
  int lines = 0;
  std::string line;
  std::istringstream is(os.str());
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++lines;
  CHECK(lines == 4);
}
