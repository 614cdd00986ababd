#pragma once

#include <optional>
#include <vector>

// Domain types and the closed-form two-emitter correlation model:
//
//   g2(tau) = 1/2 g2_1(tau) + 1/2 (1 - chi |g1_1(tau)|^2 cos(2 pi Delta tau))
//
// with g2_1(tau) = 1 - (1-c_B) exp(-|tau|/tau0) and
// |g1_1(tau)|^2 = (1-c_B) exp(-|tau|/tau_c), optionally convolved with the
// detector timing response. All operations are pure functions.

namespace homtk::photophys {

struct Shelving {
  double p_shelf = 0.0;       // branching probability into the metastable state
  double tau_shelf_ns = 0.0;  // mean dwell time
};

// One emitter's photophysics under CW excitation.
struct EmitterParams {
  double lifetime_ns = 1.73;
  double frequency_offset_mhz = 0.0;  // detuning from the shared reference
  double fwhm_mhz = 135.2;            // Lorentzian optical linewidth
  double emission_rate_hz = 1e5;      // detected photon rate
  std::optional<Shelving> shelving;

  // throws domain_error on unphysical values (e.g. sub-transform-limit fwhm)
  void validate() const;
};

// Two emitters paired on a 50:50 beamsplitter plus shared nuisance parameters.
struct HomExperiment {
  EmitterParams emitter_a;
  EmitterParams emitter_b;
  double chi = 1.0;                  // 1 identical polarization, 0 orthogonal
  double c_background = 0.0;         // ratio of background events to total events
  double detector_sigma_ps = 150.0;  // per-detector Gaussian timing jitter
  std::optional<double> detuning_delta_mhz;  // default |offset_a - offset_b|
  std::optional<double> tau_c_override_ns;   // default from the mean linewidth

  void validate() const;
  double delta_mhz() const;
  double tau0_ns() const;   // mean excited-state lifetime
  double tau_c_ns() const;  // coherence time 1/(2 pi fwhm_mean) unless overridden
};

struct CurveMeta {
  bool convolved = false;
  double chi = 0.0;
  double c_background = 0.0;
};

// g2 samples on an ordered delay grid; the common currency between the
// analytic model, the Monte Carlo histograms and the fits.
struct CorrelationCurve {
  std::vector<double> tau_ps;
  std::vector<double> g2;
  CurveMeta meta;
};

// FWHM of a transform-limited line, 1/(2 pi tau0).
double transform_limited_linewidth_mhz(double tau0_ns);

// Coherence time tau_c = 1/(2 pi fwhm), so |g1(tau)|^2 ~ exp(-|tau|/tau_c).
double coherence_time_ns(double fwhm_mhz);

// Excess (pure-dephasing) field decay rate gamma* = pi fwhm - 1/(2 tau0).
double pure_dephasing_rate_per_ns(double tau0_ns, double fwhm_mhz);

double g2_single(double tau_ns, double tau0_ns, double c_b);
double g1_sq(double tau_ns, double tau_c_ns, double c_b);
double g2_hom(double tau_ns, const HomExperiment& exp);

// Unconvolved model sampled on a symmetric uniform grid.
CorrelationCurve model_curve(const HomExperiment& exp,
                             double half_window_ps = 20000.0,
                             double step_ps = 5.0);

// Convolution with the coincidence-delay jitter kernel, a Gaussian of
// sigma_pair = sqrt(2) * detector_sigma (difference of two independent
// per-detector jitters). Requires a uniform grid with step <= sigma/10;
// sigma below step/10 is treated as a delta kernel.
CorrelationCurve convolve_with_jitter(const CorrelationCurve& curve,
                                      double detector_sigma_ps);

// eta = g2_perp(0) / (g2_par(0) + g2_perp(0))
double hom_visibility(double g2_par0, double g2_perp0);

// Mean of the (optionally convolved) model over each histogram bin
// [center - bw/2, center + bw/2]; what an ideal binned measurement shows.
std::vector<double> binned_model(const HomExperiment& exp,
                                 const std::vector<double>& centers_ps,
                                 double bin_width_ps, bool convolved = true);

}  // namespace homtk::photophys
