#include "nvdr/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "nvdr/errors.hpp"

namespace nvdr {

const char* protocol_tag(Protocol p) {
  switch (p) {
    case Protocol::Hhdr: return "hhdr";
    case Protocol::PmHhdr: return "pm_hhdr";
    case Protocol::XyN: return "xy_n";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(const std::string& tag) {
  if (tag == "hhdr") return Protocol::Hhdr;
  if (tag == "pm_hhdr") return Protocol::PmHhdr;
  if (tag == "xy_n") return Protocol::XyN;
  return std::nullopt;
}

Segment Segment::evolve(HamiltonianTerm h, double duration_us, double amplitude_khz,
                        double phase_rad, std::string label) {
  if (duration_us < 0.0) throw ConfigError("segment duration must be >= 0");
  h.validate();
  Segment seg;
  seg.duration_us = duration_us;
  seg.hamiltonian = std::move(h);
  seg.amplitude_khz = amplitude_khz;
  seg.phase_rad = phase_rad;
  seg.label = std::move(label);
  return seg;
}

Segment Segment::pulse(Matrix u, std::string label) {
  const Matrix err = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (err.cwiseAbs().maxCoeff() > 1e-10)
    throw NumericError("instantaneous segment is not unitary within 1e-10");
  Segment seg;
  seg.instantaneous = true;
  seg.unitary = std::move(u);
  seg.label = std::move(label);
  return seg;
}

std::uint64_t ControlProgram::segment_count() const {
  std::uint64_t n = 0;
  for (const Run& run : schedule) n += run.repeats * run.block.size();
  return n;
}

void ControlProgram::recompute_duration() {
  double total = 0.0;
  for (const Run& run : schedule) {
    double block_dur = 0.0;
    for (std::uint32_t idx : run.block) block_dur += palette.at(idx).duration_us;
    total += block_dur * static_cast<double>(run.repeats);
  }
  total_duration_us = total;
}

void ControlProgram::validate() const {
  if (segment_count() == 0) throw ConfigError("control program holds no segments");
  for (const Run& run : schedule) {
    if (run.block.empty()) throw ConfigError("empty run block in program schedule");
    for (std::uint32_t idx : run.block)
      if (idx >= palette.size())
        throw ConfigError("schedule references segment outside the palette");
  }
  ControlProgram check = *this;
  check.recompute_duration();
  const double scale = std::max(std::abs(total_duration_us), 1e-12);
  if (std::abs(check.total_duration_us - total_duration_us) > 1e-9 * scale)
    throw NumericError("program duration bookkeeping out of tolerance");
}

ControlProgram ControlProgram::reversed() const {
  ControlProgram out = *this;
  out.schedule.clear();
  for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
    Run r = *it;
    std::reverse(r.block.begin(), r.block.end());
    out.schedule.push_back(std::move(r));
  }
  return out;
}

void dump_program(const ControlProgram& program, std::ostream& os) {
  std::uint64_t index = 0;
  program.for_each_segment([&](const Segment& seg) {
    os << index++ << ' ' << seg.duration_us << ' ' << seg.amplitude_khz << ' '
       << seg.phase_rad;
    if (!seg.label.empty()) os << ' ' << seg.label;
    os << '\n';
  });
}

}  // namespace nvdr
