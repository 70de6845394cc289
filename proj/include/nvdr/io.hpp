#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvdr/dip_fit.hpp"
#include "nvdr/power.hpp"
#include "nvdr/sweep.hpp"

namespace nvdr {

// one '#' header line carrying the run context the fitter needs, then
// x,signal rows. %.17g keeps the round trip bit-exact
void write_spectrum_csv(const std::string& path, const Spectrum& spec);
Spectrum read_spectrum_csv(const std::string& path);

std::string dip_report_json(const DipReport& report);
void write_dip_report_json(const std::string& path, const DipReport& report);

struct PowerRow {
  Scheme scheme;
  double bz_gauss;
  double rabi_khz;
  double peak_mw;
  double avg_mw;
};

void write_power_table_csv(const std::string& path,
                           const std::vector<PowerRow>& rows);

// config echo + version + seed + emitted files; everything needed to rerun
void write_manifest(const std::string& path, const std::string& config_echo,
                    std::uint64_t seed,
                    const std::vector<std::string>& outputs);

}  // namespace nvdr
