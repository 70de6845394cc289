#pragma once

#include <vector>

#include "nvdr/program.hpp"
#include "nvdr/state.hpp"

namespace nvdr {

// U = exp(-i 2 pi H t) by self-adjoint eigendecomposition; H in MHz, t in us
Matrix hermitian_propagator(const Matrix& h, double duration_us);

Matrix segment_unitary(const Segment& seg);

// U^n by binary powering
Matrix unitary_power(Matrix u, std::uint64_t n);

DensityState propagate_segment(const DensityState& in, const Segment& seg);

// evolves through the whole program; palette propagators are computed once
// and periodic runs are collapsed by binary powering
DensityState propagate_to_end(const DensityState& in, const ControlProgram& program);

struct Sample {
  double time_us = 0.0;  // snapped boundary time actually sampled
  DensityState state;
};

// samples snap to the nearest segment boundary at or after the requested
// time; a request beyond the program end throws NumericError
std::vector<Sample> propagate_program(const DensityState& in,
                                      const ControlProgram& program,
                                      const std::vector<double>& sample_times_us);

}  // namespace nvdr
