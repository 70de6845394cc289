#include "nvdr/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

Matrix hermitian_propagator(const Matrix& h, double duration_us) {
  const Eigen::Index n = h.rows();
  if (duration_us == 0.0) return Matrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed in propagator");
  // U = V exp(-i 2 pi E t) V^dag, one phase column at a time
  Matrix scaled = es.eigenvectors();
  for (Eigen::Index c = 0; c < n; ++c) {
    const double phase = -2.0 * M_PI * es.eigenvalues()[c] * duration_us;
    scaled.col(c) *= Complex(std::cos(phase), std::sin(phase));
  }
  return scaled * es.eigenvectors().adjoint();
}

Matrix segment_unitary(const Segment& seg) {
  if (seg.instantaneous) return seg.unitary;
  seg.hamiltonian.validate();
  return hermitian_propagator(seg.hamiltonian.matrix, seg.duration_us);
}

Matrix unitary_power(Matrix u, std::uint64_t n) {
  Matrix acc = Matrix::Identity(u.rows(), u.cols());
  while (n > 0) {
    if (n & 1) acc = u * acc;
    u = u * u;
    n >>= 1;
  }
  return acc;
}

DensityState propagate_segment(const DensityState& in, const Segment& seg) {
  const Matrix u = segment_unitary(seg);
  if (u.rows() != in.rho.rows())
    throw NumericError("segment dimension does not match the state");
  DensityState out = in;
  out.rho = u * in.rho * u.adjoint();
  return out;
}

namespace {

// total unitary of one schedule run, palette propagators supplied by caller
Matrix run_unitary(const ControlProgram::Run& run,
                   const std::vector<Matrix>& palette_u) {
  const Eigen::Index dim = palette_u[run.block.front()].rows();
  Matrix block = Matrix::Identity(dim, dim);
  for (std::uint32_t idx : run.block) block = palette_u[idx] * block;
  return unitary_power(std::move(block), run.repeats);
}

std::vector<Matrix> palette_unitaries(const ControlProgram& program) {
  std::vector<Matrix> out;
  out.reserve(program.palette.size());
  for (const Segment& seg : program.palette) out.push_back(segment_unitary(seg));
  return out;
}

}  // namespace

DensityState propagate_to_end(const DensityState& in, const ControlProgram& program) {
  program.validate();
  const std::vector<Matrix> palette_u = palette_unitaries(program);
  Matrix total = Matrix::Identity(in.rho.rows(), in.rho.cols());
  for (const ControlProgram::Run& run : program.schedule)
    total = run_unitary(run, palette_u) * total;
  if (total.rows() != in.rho.rows())
    throw NumericError("program dimension does not match the state");
  DensityState out = in;
  out.rho = total * in.rho * total.adjoint();
  return out;
}

std::vector<Sample> propagate_program(const DensityState& in,
                                      const ControlProgram& program,
                                      const std::vector<double>& sample_times_us) {
  program.validate();
  const double tol = 1e-9 * std::max(1.0, std::abs(program.total_duration_us));
  for (double t : sample_times_us) {
    if (t > program.total_duration_us + tol) {
      std::ostringstream msg;
      msg << "sample time " << t << " us lies beyond the program end at "
          << program.total_duration_us << " us";
      throw NumericError(msg.str());
    }
  }

  std::vector<std::size_t> order(sample_times_us.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample_times_us[a] < sample_times_us[b];
  });

  const std::vector<Matrix> palette_u = palette_unitaries(program);
  std::vector<Sample> out(sample_times_us.size());

  DensityState cur = in;
  double now = 0.0;
  std::size_t next = 0;  // position in `order`

  auto emit_while_satisfied = [&](double boundary_time) {
    while (next < order.size() && sample_times_us[order[next]] <= boundary_time + tol) {
      out[order[next]] = Sample{boundary_time, cur};
      ++next;
    }
  };

  emit_while_satisfied(now);  // program start counts as a boundary

  for (const ControlProgram::Run& run : program.schedule) {
    if (next >= order.size()) break;
    double block_dur = 0.0;
    for (std::uint32_t idx : run.block) block_dur += program.palette[idx].duration_us;
    const double run_end = now + block_dur * static_cast<double>(run.repeats);

    // runs with no samples inside collapse to a single powered unitary
    if (sample_times_us[order[next]] > run_end + tol || block_dur == 0.0) {
      const Matrix u = run_unitary(run, palette_u);
      cur.rho = u * cur.rho * u.adjoint();
      now = run_end;
      emit_while_satisfied(now);
      continue;
    }

    for (std::uint64_t r = 0; r < run.repeats; ++r) {
      // skip ahead over sample-free whole blocks
      if (next < order.size()) {
        const double remaining_target = sample_times_us[order[next]];
        const std::uint64_t skippable = static_cast<std::uint64_t>(std::max(
            0.0, std::floor((remaining_target - now - tol) / block_dur)));
        if (skippable > 1 && r + skippable < run.repeats) {
          Matrix block = Matrix::Identity(cur.rho.rows(), cur.rho.cols());
          for (std::uint32_t idx : run.block) block = palette_u[idx] * block;
          const Matrix u = unitary_power(std::move(block), skippable);
          cur.rho = u * cur.rho * u.adjoint();
          now += block_dur * static_cast<double>(skippable);
          r += skippable - 1;
          continue;
        }
      }
      for (std::uint32_t idx : run.block) {
        cur.rho = palette_u[idx] * cur.rho * palette_u[idx].adjoint();
        now += program.palette[idx].duration_us;
        emit_while_satisfied(now);
      }
      if (next >= order.size()) break;
    }
    now = run_end;  // absorb accumulated rounding at run boundaries
  }

  emit_while_satisfied(program.total_duration_us);
  return out;
}

}  // namespace nvdr
