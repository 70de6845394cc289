#pragma once

#include "nvdr/program.hpp"
#include "nvdr/state.hpp"

namespace nvdr {

// brute-force integration of the untransformed Hamiltonian with the drive
// carrier written out explicitly, midpoint-sampled piecewise-constant steps.
// keeps the counter-rotating terms the rotating-frame engine drops, so the
// two agree only as well as the rotating-wave approximation holds.
//
// the carrier is numerically reduced (tens of MHz instead of GHz) and the
// electron transition is set equal to it, i.e. the drive is applied on
// resonance; carrier separation from the internal dynamics is preserved as
// long as carrier_mhz stays >= 25x every internal frequency.
struct LabOracleOptions {
  double carrier_mhz = 50.0;
  double dt_us = 0.0;  // 0 picks 1/(50 carrier); larger values are rejected
};

// evolves `in` through `program` (drive envelope and phase taken from its
// segments) and returns the final state expressed back in the rotating frame
DensityState lab_frame_oracle(const SpinSystemSpec& sys,
                              const ControlProgram& program,
                              const DensityState& in,
                              const LabOracleOptions& opt = {});

}  // namespace nvdr
