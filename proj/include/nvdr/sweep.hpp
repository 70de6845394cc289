#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvdr/lab_oracle.hpp"
#include "nvdr/program.hpp"
#include "nvdr/sequences.hpp"
#include "nvdr/spin_system.hpp"
#include "nvdr/state.hpp"

namespace nvdr {

enum class SweptParameter { Nu, Omega, Tau };
const char* swept_parameter_tag(SweptParameter p);
std::optional<SweptParameter> parse_swept_parameter(const std::string& tag);

// joint: one Hilbert space holding every listed nucleus (dimension-capped);
// independent: each nucleus simulated alone against the electron, signals
// combined per protocol (coherence-factor product for pulsed sequences,
// survival product for dressed ones)
enum class Composition { Joint, IndependentSpins };
const char* composition_tag(Composition c);
std::optional<Composition> parse_composition(const std::string& tag);

// protocol parameters that stay fixed while one is swept
struct FixedParams {
  double omega_prime_khz = 0.0;  // pm tone amplitude
  double omega_khz = 0.0;        // hhdr lock amplitude
  double nu_khz = 0.0;           // pm modulation frequency
  double t_f_us = 0.0;           // dressed interrogation time
  int n_pulses = 0;              // xy
  PulseModel pulse = PulseModel::Ideal;
  double omega_pi_khz = 0.0;
  ElectronInit electron = ElectronInit::PlusX;
  NuclearInit nuclear = NuclearInit::MaximallyMixed;
  ReadoutAxis readout = ReadoutAxis::PlusX;
  double dephasing_khz = 0.0;  // contrast damping toward 1/2, 0 disables
};

struct SweepPlan {
  Protocol protocol = Protocol::PmHhdr;
  SweptParameter swept = SweptParameter::Nu;
  std::vector<double> grid;  // kHz for nu/omega, us for tau; strictly increasing
  FixedParams fixed;
  Composition composition = Composition::Joint;

  // hardware modulation-resolution emulation: frequency grids must not step
  // finer than this when enforcement is on (tau grids are exempt)
  double resolution_floor_khz = 2.0;
  bool enforce_floor = true;

  void validate() const;
};

// per-shot gaussian factor (1 + delta) on the active drive amplitude
struct AmplitudeNoise {
  double relative_std = 0.0;
  int shots = 1;
  std::uint64_t seed = 0;
  void validate() const;
};

struct SpectrumPoint {
  double x = 0.0;
  double signal = 0.0;
};

struct Spectrum {
  SweepPlan plan;
  std::vector<SpectrumPoint> points;
  int shots = 1;
  std::uint64_t seed = 0;
  double larmor_khz = 0.0;  // of the swept system, for coupling extraction

  // one signal per grid point, signals within [-1e-6, 1 + 1e-6]
  void validate() const;
};

// program for one grid value with the drive amplitude scaled by
// amplitude_scale; exposed so callers can inspect what a sweep would run
ControlProgram compile_plan_point(const SpinSystemSpec& sys,
                                  const SweepPlan& plan, double x,
                                  double amplitude_scale = 1.0);

// per grid point: average the measured signal over shots, each shot with an
// independently perturbed amplitude; the per-(point, shot) rng stream makes
// the result deterministic and independent of thread scheduling
Spectrum run_sweep(const SpinSystemSpec& sys, const SweepPlan& plan,
                   const AmplitudeNoise& noise = {}, int n_threads = 1);

// same sweep evaluated by the piecewise lab-frame integrator (noiseless);
// slow, intended for equivalence checks against run_sweep
Spectrum run_sweep_lab_oracle(const SpinSystemSpec& sys, const SweepPlan& plan,
                              const LabOracleOptions& opt = {},
                              int n_threads = 1);

}  // namespace nvdr
