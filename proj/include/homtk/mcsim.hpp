#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "homtk/photophys.hpp"

// Event-level Monte Carlo: renewal-process photon streams from two emitters,
// stochastic-wavetrain interference at a 50:50 beamsplitter, Poisson
// background, detector jitter and a full cross-correlator. The normalized
// coincidence histogram converges to the photophys analytic model.

namespace homtk::mcsim {

// One emitted wavetrain: excitation (wavetrain start) and detection time.
struct Photon {
  double start_ps;
  double time_ps;
};

struct EmitterStream {
  std::vector<Photon> photons;  // ordered by detection time
  double duration_ps = 0.0;
  std::uint64_t seed = 0;
};

struct ClickStream {
  int channel = 1;
  std::vector<double> times_ps;  // strictly increasing
  double duration_ps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t signal_count = 0;
  std::uint64_t background_count = 0;
};

struct SimConfig {
  photophys::HomExperiment experiment;
  double excitation_rate_hz = 1e7;  // re-pump rate of the renewal process
  double duration_ps = 1e9;
  std::uint64_t rng_seed = 1;
  int chunk_count = 1;

  // enforces the low-excitation regime, excitation_rate <= 0.1/tau0
  void validate() const;
};

struct CorrelationHistogram {
  double bin_width_ps = 256.0;
  std::vector<double> centers_ps;  // symmetric about tau = 0
  std::vector<std::int64_t> counts;
  double normalization = 0.0;  // mean counts over the normalization region
  double norm_min_ps = 0.0;
  double norm_max_ps = 0.0;
  std::vector<double> g2;  // counts / normalization; empty until normalized

  double window_ps() const {
    return centers_ps.empty() ? 0.0 : centers_ps.back() + 0.5 * bin_width_ps;
  }
};

// Renewal process: wait Exp(1/excitation_rate), then Exp(tau0) to detection.
// Optional shelving inserts Exp(tau_shelf) dead times with probability
// p_shelf after an emission. excitation_rate = 0 yields an empty stream.
EmitterStream simulate_emitter_stream(const photophys::EmitterParams& emitter,
                                      double excitation_rate_hz,
                                      double duration_ps, std::uint64_t seed);

// Routes photons to the two detectors. Cross-emitter pairs inside the
// coherence window get correlated routing with cross-port probability
// 1/2 (1 - chi cos(2 pi Delta dt + dphi)) where dphi is the increment of the
// relative diffusive phase of the two emitters between the detection times;
// photons without a coherent partner route 50:50 independently.
std::pair<ClickStream, ClickStream> mix_at_beamsplitter(
    const EmitterStream& a, const EmitterStream& b,
    const photophys::HomExperiment& exp, std::uint64_t seed);

// Homogeneous Poisson clicks at rate fraction/(1-fraction) * r_signal, so
// background/total = fraction in expectation.
ClickStream add_background(ClickStream s, double background_fraction,
                           std::uint64_t seed);

// Per-click Gaussian timing jitter; re-sorts, drops clicks below t = 0.
ClickStream apply_detector(ClickStream s, double sigma_ps, std::uint64_t seed);

// Full cross-correlation: every pair with |t2 - t1| <= window, binned into
// bins centered at k * bin_width.
CorrelationHistogram correlate(const ClickStream& s1, const ClickStream& s2,
                               double bin_width_ps, double window_ps);

// g2 = counts / mean(counts over norm_min <= |tau| <= norm_max);
// norm_max = 0 means the histogram window. Needs >= 10 bins in the region.
CorrelationHistogram normalize(CorrelationHistogram h,
                               double norm_min_ps = 50000.0,
                               double norm_max_ps = 0.0);

void merge_counts(CorrelationHistogram& into, const CorrelationHistogram& from);

// Physical per-channel Poisson background fraction that reproduces the
// analytic model's linear (1 - c_B) scaling; background enters measured
// correlations quadratically, hence the square root.
inline double physical_background_fraction(double c_background) {
  return 1.0 - std::sqrt(1.0 - c_background);
}

// Deterministic end-to-end run (chunked, parallel across chunks): emitter
// streams -> beamsplitter -> background -> detector jitter.
std::pair<ClickStream, ClickStream> run_simulation(const SimConfig& cfg);

}  // namespace homtk::mcsim
