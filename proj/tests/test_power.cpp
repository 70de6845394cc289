#include <cmath>
#include <random>

#include "doctest.h"
#include "nvdr/errors.hpp"
#include "nvdr/power.hpp"

using namespace nvdr;

TEST_CASE("hhdr runs the drive continuously") {
  PowerConfig cfg;
  const auto p = power_hhdr(cfg, 1970.0);
  CHECK(p.scheme == Scheme::Hhdr);
  CHECK(p.drive_khz == 1970.0);
  CHECK(p.peak_mw == 1970.0 * 1970.0);
  CHECK(p.avg_mw == p.peak_mw);
}

TEST_CASE("pm-hhdr toggles twice the tone amplitude at half duty") {
  PowerConfig cfg;
  const auto p = power_pm_hhdr(cfg, 104.0);
  CHECK(p.drive_khz == 104.0);
  CHECK(p.peak_mw == 208.0 * 208.0);
  CHECK(p.avg_mw == 0.5 * p.peak_mw);
}

TEST_CASE("xy-n averages over the pulse duty cycle") {
  PowerConfig cfg;
  const auto p = power_xyn(cfg, 26000.0, 32, 0.128, 0.004);
  CHECK(p.peak_mw == 26000.0 * 26000.0);
  // t_pi / (2 tau) = 0.004 / 0.256
  CHECK(p.avg_mw == doctest::Approx(p.peak_mw * 0.004 / 0.256).epsilon(1e-15));
  CHECK(p.avg_mw < p.peak_mw);
}

TEST_CASE("scheme comparison ratios are exact arithmetic") {
  PowerConfig cfg;
  const auto hh = power_hhdr(cfg, 1970.0);
  const auto pm = power_pm_hhdr(cfg, 104.0);
  const auto xy = power_xyn(cfg, 250.0 * 104.0, 32, 0.128, 0.004);

  CHECK(hh.drive_khz / pm.drive_khz == 1970.0 / 104.0);
  CHECK(xy.drive_khz / pm.drive_khz == 250.0);

  const double pm_drive_power = pm.drive_khz * pm.drive_khz;
  CHECK(xy.peak_mw / pm_drive_power == 62500.0);
}

TEST_CASE("power scales quadratically in drive and inversely in efficiency") {
  std::mt19937_64 rng(20240818);
  std::uniform_real_distribution<double> amp(1.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const double w = amp(rng);
    PowerConfig cfg;
    CHECK(power_hhdr(cfg, 2.0 * w).peak_mw / power_hhdr(cfg, w).peak_mw ==
          4.0);

    PowerConfig half = cfg;
    half.efficiency_khz_per_sqrt_mw = 2.0;
    CHECK(power_hhdr(half, w).peak_mw == power_hhdr(cfg, w).peak_mw / 4.0);
  }
}

TEST_CASE("average never exceeds peak") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(1.0, 30000.0);
  std::uniform_real_distribution<double> tau(0.05, 2.0);
  for (int i = 0; i < 200; ++i) {
    PowerConfig cfg;
    cfg.efficiency_khz_per_sqrt_mw = amp(rng) / 100.0;
    const double t = tau(rng);
    const auto hh = power_hhdr(cfg, amp(rng));
    const auto pm = power_pm_hhdr(cfg, amp(rng));
    const auto xy = power_xyn(cfg, amp(rng), 8, t, 0.9 * 2.0 * t);
    CHECK(hh.avg_mw <= hh.peak_mw);
    CHECK(pm.avg_mw <= pm.peak_mw);
    CHECK(xy.avg_mw <= xy.peak_mw);
  }
}

TEST_CASE("power input validation") {
  PowerConfig bad;
  bad.efficiency_khz_per_sqrt_mw = 0.0;
  CHECK_THROWS_AS(power_hhdr(bad, 1970.0), ConfigError);

  PowerConfig cfg;
  CHECK_THROWS_AS(power_hhdr(cfg, 0.0), ConfigError);
  CHECK_THROWS_AS(power_pm_hhdr(cfg, -5.0), ConfigError);
  CHECK_THROWS_AS(power_xyn(cfg, 1000.0, 0, 0.1, 0.01), ConfigError);
  // pulses longer than their spacing
  CHECK_THROWS_AS(power_xyn(cfg, 1000.0, 8, 0.1, 0.3), ConfigError);

  CHECK(parse_scheme("hhdr") == Scheme::Hhdr);
  CHECK(parse_scheme("pm_hhdr") == Scheme::PmHhdr);
  CHECK(parse_scheme("xy_n") == Scheme::XyN);
  CHECK(!parse_scheme("cw").has_value());
  CHECK(scheme_tag(Scheme::PmHhdr) == std::string("pm_hhdr"));
}
