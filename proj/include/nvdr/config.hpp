#pragma once

#include <string>

#include "nvdr/spin_system.hpp"
#include "nvdr/sweep.hpp"

namespace nvdr {

struct OutputConfig {
  std::string spectrum_csv = "spectrum.csv";
  std::string report_json = "report.json";
  std::string manifest_json = "manifest.json";
  std::string format = "csv";  // stdout summary format: csv or json
};

struct ExperimentConfig {
  SpinSystemSpec system;
  SweepPlan plan;
  AmplitudeNoise noise;
  OutputConfig output;
  std::string echo;  // normalized config text, embedded in the manifest
};

// rejects unknown keys naming key and section; validates every block before
// returning so nothing downstream computes from a half-checked config
ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin);
ExperimentConfig load_config(const std::string& path);

}  // namespace nvdr
