#pragma once

#include <string>
#include <utility>
#include <vector>

#include "homtk/fitkit.hpp"
#include "homtk/mcsim.hpp"
#include "homtk/photophys.hpp"
#include "homtk/spectra.hpp"

// File formats; see docs/formats.md. Times are integer picoseconds in files,
// other numbers are written with enough digits to round-trip exactly.

namespace homtk::csvio {

void write_curve(const std::string& path,
                 const photophys::CorrelationCurve& curve);
photophys::CorrelationCurve read_curve(const std::string& path);

void write_spectrum(const std::string& path, const spectra::Spectrum& spec);
void write_lines_json(const std::string& path, const spectra::Spectrum& spec);

// Both detector channels interleaved, sorted by time.
void write_clicks(const std::string& path, const mcsim::ClickStream& d1,
                  const mcsim::ClickStream& d2);
std::pair<mcsim::ClickStream, mcsim::ClickStream> read_clicks(
    const std::string& path);

void write_histogram(const std::string& path,
                     const mcsim::CorrelationHistogram& h);
mcsim::CorrelationHistogram read_histogram(const std::string& path);

// Generic numeric table with 2 or 3 columns (x, y[, sigma]); reports the
// offending row number on malformed input.
struct XyData {
  std::vector<double> x, y, sigma;
};
XyData read_xy(const std::string& path);

std::string fit_result_json(const fitkit::FitResult& result);
void write_fit_result(const std::string& path,
                      const fitkit::FitResult& result);

}  // namespace homtk::csvio
