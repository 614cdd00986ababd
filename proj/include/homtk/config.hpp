#pragma once

#include <optional>
#include <string>

#include "homtk/mcsim.hpp"
#include "homtk/photophys.hpp"
#include "homtk/spectra.hpp"

// JSON run configuration. The schema is strict: unknown keys are rejected
// and every key carries its unit as a suffix. See docs/formats.md.

namespace homtk::config {

struct HistogramConfig {
  double bin_width_ps = 256.0;
  double window_ps = 100000.0;
  double norm_min_ps = 50000.0;
};

struct ModelGridConfig {
  double step_ps = 5.0;
  double half_window_ps = 20000.0;
};

struct SpectrumConfig {
  spectra::LevelStructure levels;
  double line_fwhm_ghz = 4.0;
  spectra::GridSpec grid;
  spectra::EtalonParams etalon;
};

struct OutputConfig {
  std::optional<std::string> clicks_path;
  std::optional<std::string> histogram_path;
  std::optional<std::string> curve_path;
  std::optional<std::string> spectrum_path;
  std::optional<std::string> fit_path;
};

struct RunConfig {
  photophys::HomExperiment experiment;  // emitters folded in
  double excitation_rate_hz = 1e7;
  double duration_ps = 1e9;
  std::uint64_t rng_seed = 1;
  int chunk_count = 1;
  HistogramConfig histogram;
  ModelGridConfig model;
  SpectrumConfig spectrum;
  OutputConfig output;

  mcsim::SimConfig sim_config() const;
};

// Parses and validates; throws domain_error naming the offending key on
// unknown keys, wrong types or violated invariants.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text,
                       const std::string& origin = "<config>");

}  // namespace homtk::config
