#include "homtk/photophys.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homtk/errors.hpp"
#include "homtk/units.hpp"

namespace homtk::photophys {

void EmitterParams::validate() const {
  if (!(lifetime_ns > 0.0)) throw domain_error("emitter lifetime must be > 0");
  if (!(emission_rate_hz > 0.0))
    throw domain_error("emitter emission rate must be > 0");
  const double limit = transform_limited_linewidth_mhz(lifetime_ns);
  if (fwhm_mhz < limit * (1.0 - 1e-12))
    throw domain_error("fwhm " + std::to_string(fwhm_mhz) +
                       " MHz below the transform limit " +
                       std::to_string(limit) + " MHz");
  if (shelving) {
    if (!(shelving->p_shelf >= 0.0 && shelving->p_shelf < 1.0))
      throw domain_error("p_shelf must be in [0,1)");
    if (!(shelving->tau_shelf_ns > 0.0))
      throw domain_error("tau_shelf must be > 0");
  }
}

void HomExperiment::validate() const {
  emitter_a.validate();
  emitter_b.validate();
  if (!(chi >= 0.0 && chi <= 1.0)) throw domain_error("chi must be in [0,1]");
  if (!(c_background >= 0.0 && c_background < 1.0))
    throw domain_error("c_background must be in [0,1)");
  if (!(detector_sigma_ps >= 0.0))
    throw domain_error("detector sigma must be >= 0");
  if (detuning_delta_mhz && !(*detuning_delta_mhz >= 0.0))
    throw domain_error("detuning must be >= 0");
  if (tau_c_override_ns && !(*tau_c_override_ns > 0.0))
    throw domain_error("tau_c override must be > 0");
}

double HomExperiment::delta_mhz() const {
  if (detuning_delta_mhz) return *detuning_delta_mhz;
  return std::abs(emitter_a.frequency_offset_mhz -
                  emitter_b.frequency_offset_mhz);
}

double HomExperiment::tau0_ns() const {
  return 0.5 * (emitter_a.lifetime_ns + emitter_b.lifetime_ns);
}

double HomExperiment::tau_c_ns() const {
  if (tau_c_override_ns) return *tau_c_override_ns;
  return coherence_time_ns(0.5 * (emitter_a.fwhm_mhz + emitter_b.fwhm_mhz));
}

double transform_limited_linewidth_mhz(double tau0_ns) {
  if (!(tau0_ns > 0.0)) throw domain_error("tau0 must be > 0");
  return 1e3 / (kTwoPi * tau0_ns);
}

double coherence_time_ns(double fwhm_mhz) {
  if (!(fwhm_mhz > 0.0)) throw domain_error("fwhm must be > 0");
  return 1e3 / (kTwoPi * fwhm_mhz);
}

double pure_dephasing_rate_per_ns(double tau0_ns, double fwhm_mhz) {
  const double limit = transform_limited_linewidth_mhz(tau0_ns);
  if (fwhm_mhz < limit * (1.0 - 1e-12))
    throw domain_error("fwhm below the transform limit");
  // total field decay pi*fwhm = 1/(2 tau0) + gamma*; clamp rounding residue
  return std::max(0.0, kPi * fwhm_mhz * 1e-3 - 0.5 / tau0_ns);
}

double g2_single(double tau_ns, double tau0_ns, double c_b) {
  if (!(tau0_ns > 0.0)) throw domain_error("tau0 must be > 0");
  if (!(c_b >= 0.0 && c_b < 1.0)) throw domain_error("c_b must be in [0,1)");
  return 1.0 - (1.0 - c_b) * std::exp(-std::abs(tau_ns) / tau0_ns);
}

double g1_sq(double tau_ns, double tau_c_ns, double c_b) {
  if (!(tau_c_ns > 0.0)) throw domain_error("tau_c must be > 0");
  if (!(c_b >= 0.0 && c_b < 1.0)) throw domain_error("c_b must be in [0,1)");
  return (1.0 - c_b) * std::exp(-std::abs(tau_ns) / tau_c_ns);
}

double g2_hom(double tau_ns, const HomExperiment& exp) {
  exp.validate();
  const double interference =
      exp.chi * g1_sq(tau_ns, exp.tau_c_ns(), exp.c_background) *
      std::cos(detuning_phase_rad(exp.delta_mhz(), ps_from_ns(tau_ns)));
  return 0.5 * g2_single(tau_ns, exp.tau0_ns(), exp.c_background) +
         0.5 * (1.0 - interference);
}

CorrelationCurve model_curve(const HomExperiment& exp, double half_window_ps,
                             double step_ps) {
  if (!(step_ps > 0.0) || !(half_window_ps > 0.0))
    throw domain_error("curve grid must have positive step and window");
  const auto n = static_cast<long>(std::llround(half_window_ps / step_ps));
  CorrelationCurve c;
  c.tau_ps.reserve(2 * n + 1);
  c.g2.reserve(2 * n + 1);
  for (long k = -n; k <= n; ++k) {
    const double tau_ps = static_cast<double>(k) * step_ps;
    c.tau_ps.push_back(tau_ps);
    c.g2.push_back(g2_hom(ns_from_ps(tau_ps), exp));
  }
  c.meta = {false, exp.chi, exp.c_background};
  return c;
}

CorrelationCurve convolve_with_jitter(const CorrelationCurve& curve,
                                      double detector_sigma_ps) {
  if (!(detector_sigma_ps >= 0.0))
    throw domain_error("detector sigma must be >= 0");
  if (detector_sigma_ps == 0.0) return curve;
  if (curve.tau_ps.size() < 2)
    throw domain_error("curve needs at least two samples");

  const double step = curve.tau_ps[1] - curve.tau_ps[0];
  if (!(step > 0.0)) throw domain_error("tau grid must be increasing");
  for (std::size_t i = 1; i < curve.tau_ps.size(); ++i) {
    if (std::abs(curve.tau_ps[i] - curve.tau_ps[i - 1] - step) > 1e-6 * step)
      throw domain_error("tau grid must be uniform");
  }

  CorrelationCurve out = curve;
  out.meta.convolved = true;
  // below a tenth of a grid step the kernel is indistinguishable from a delta
  if (detector_sigma_ps < 0.1 * step) return out;
  if (step > 0.1 * detector_sigma_ps)
    throw precision_error("grid step must be <= detector_sigma/10");

  const double sigma_pair = std::sqrt(2.0) * detector_sigma_ps;
  const auto m = static_cast<long>(std::ceil(6.0 * sigma_pair / step));
  std::vector<double> kernel(2 * m + 1);
  double sum = 0.0;
  for (long k = -m; k <= m; ++k) {
    const double x = static_cast<double>(k) * step / sigma_pair;
    kernel[k + m] = std::exp(-0.5 * x * x);
    sum += kernel[k + m];
  }
  for (double& w : kernel) w /= sum;

  const long n = static_cast<long>(curve.g2.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -m; k <= m; ++k) {
      const long j = std::clamp(i - k, 0L, n - 1);  // replicate edges
      acc += kernel[k + m] * curve.g2[j];
    }
    out.g2[i] = acc;
  }
  return out;
}

double hom_visibility(double g2_par0, double g2_perp0) {
  if (!(g2_par0 >= 0.0) || !(g2_perp0 >= 0.0))
    throw domain_error("g2 values must be >= 0");
  const double total = g2_par0 + g2_perp0;
  if (total == 0.0) throw domain_error("visibility undefined for 0/0");
  return g2_perp0 / total;
}

namespace {

double interpolate(const CorrelationCurve& c, double tau_ps) {
  const double step = c.tau_ps[1] - c.tau_ps[0];
  const double pos = (tau_ps - c.tau_ps.front()) / step;
  const auto n = static_cast<long>(c.g2.size());
  const long i = std::clamp(static_cast<long>(std::floor(pos)), 0L, n - 2);
  const double f = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
  return (1.0 - f) * c.g2[i] + f * c.g2[i + 1];
}

}  // namespace

std::vector<double> binned_model(const HomExperiment& exp,
                                 const std::vector<double>& centers_ps,
                                 double bin_width_ps, bool convolved) {
  if (!(bin_width_ps > 0.0)) throw domain_error("bin width must be > 0");
  if (centers_ps.empty()) return {};

  double extent = 0.0;
  for (double c : centers_ps) extent = std::max(extent, std::abs(c));
  const double margin =
      bin_width_ps + 8.0 * std::sqrt(2.0) * exp.detector_sigma_ps + 100.0;
  const double step = std::min(5.0, bin_width_ps / 64.0);
  CorrelationCurve curve = model_curve(exp, extent + margin, step);
  if (convolved) curve = convolve_with_jitter(curve, exp.detector_sigma_ps);

  // trapezoid average over each bin
  constexpr int kSub = 64;
  std::vector<double> out;
  out.reserve(centers_ps.size());
  for (double c : centers_ps) {
    const double lo = c - 0.5 * bin_width_ps;
    const double h = bin_width_ps / kSub;
    double acc = 0.5 * (interpolate(curve, lo) +
                        interpolate(curve, lo + bin_width_ps));
    for (int k = 1; k < kSub; ++k) acc += interpolate(curve, lo + k * h);
    out.push_back(acc / kSub);
  }
  return out;
}

}  // namespace homtk::photophys
