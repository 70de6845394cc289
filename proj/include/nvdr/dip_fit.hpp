#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvdr/sweep.hpp"

namespace nvdr {

enum class DipModel { LorentzianSum, GaussianSum };
const char* dip_model_tag(DipModel m);
std::optional<DipModel> parse_dip_model(const std::string& tag);

struct Dip {
  // fitted in the sweep's own x units (kHz for frequency sweeps, us for tau)
  double center_x = 0.0;
  double width_x = 0.0;  // full width at half depth
  double depth = 0.0;    // baseline minus minimum, signal units

  // canonical frequency-domain values; tau dips are mapped through the
  // probed frequency 1/(2 tau)
  double center_khz = 0.0;
  double width_khz = 0.0;

  // coupling assigned by inverting the protocol's resonance condition; the
  // sideband sign comes from which side of the Larmor frequency the dip
  // lies, and dips within one grid step of it are flagged instead of guessed
  double a_par_khz = 0.0;
  bool a_par_ambiguous = false;
};

struct DipReport {
  std::vector<Dip> dips;     // sorted by center
  double fit_residual = 0.0; // RMS of data minus model
  DipModel model = DipModel::LorentzianSum;
  bool converged = false;    // RMS improvement fell below 1e-6 within budget
  int cycles = 0;

  void validate() const;  // widths > 0, depths in (0,1], centers in range
};

// detects local minima below baseline - 3x the robust noise level (median
// absolute deviation), then refines a sum-of-dips model: depths and baseline
// solved linearly, centers and widths polished by per-dip Nelder-Mead sweeps
// until the RMS residual improves by less than 1e-6 or 500 cycles pass.
// a flat spectrum yields an empty report; fewer than 10 points is an error.
DipReport fit_dips(const Spectrum& spec, int max_dips = 8,
                   DipModel model = DipModel::LorentzianSum);

struct NoiseWidthPoint {
  double sigma = 0.0;
  double width_khz = 0.0;
  bool ok = false;  // a dominant dip was found and the fit converged
};

// fitted width of the dominant dip as a function of amplitude-noise level
std::vector<NoiseWidthPoint> linewidth_vs_noise(
    const SpinSystemSpec& sys, const SweepPlan& plan,
    const std::vector<double>& sigma_grid, int shots, std::uint64_t seed,
    int n_threads = 1);

}  // namespace nvdr
