#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvdr/hamiltonian.hpp"

namespace nvdr {

enum class Protocol { Hhdr, PmHhdr, XyN };

const char* protocol_tag(Protocol p);
std::optional<Protocol> parse_protocol(const std::string& tag);

// one slice of a control sequence: either evolve under a constant
// rotating-frame Hamiltonian for duration_us, or apply an instantaneous
// unitary (duration exactly zero)
struct Segment {
  double duration_us = 0.0;
  HamiltonianTerm hamiltonian;
  Matrix unitary;  // used only when instantaneous
  bool instantaneous = false;

  // descriptive fields echoed by dump_program
  double amplitude_khz = 0.0;
  double phase_rad = 0.0;
  std::string label;

  static Segment evolve(HamiltonianTerm h, double duration_us,
                        double amplitude_khz = 0.0, double phase_rad = 0.0,
                        std::string label = {});
  static Segment pulse(Matrix u, std::string label = {});
};

// time-ordered segment list, stored as a palette of distinct segments plus a
// run-length schedule so that long periodic sequences stay cheap to hold and
// to propagate (half-period propagators are built once and reused)
struct ControlProgram {
  struct Run {
    std::vector<std::uint32_t> block;  // palette indices, played in order
    std::uint64_t repeats = 1;
  };

  std::vector<Segment> palette;
  std::vector<Run> schedule;
  Protocol protocol = Protocol::Hhdr;
  double total_duration_us = 0.0;
  std::map<std::string, double> metadata;  // realized t_f, half period, ...

  std::uint64_t segment_count() const;
  void recompute_duration();  // restores total_duration_us = sum over schedule

  // >= 1 segment, indices in range, durations >= 0, duration bookkeeping
  // consistent to 1e-9 relative
  void validate() const;

  // same palette, schedule played backwards
  ControlProgram reversed() const;

  // visits logical segments in order; f(const Segment&)
  template <typename F>
  void for_each_segment(F&& f) const {
    for (const Run& run : schedule)
      for (std::uint64_t r = 0; r < run.repeats; ++r)
        for (std::uint32_t idx : run.block) f(palette[idx]);
  }
};

// one logical segment per line: index, duration_us, amplitude_khz, phase_rad
void dump_program(const ControlProgram& program, std::ostream& os);

}  // namespace nvdr
