#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "homtk/mcsim.hpp"
#include "homtk/photophys.hpp"

// Damped (Levenberg-Marquardt) weighted least squares plus the fit recipes
// used throughout: PLE doublet, inhomogeneous Gaussian, lifetime decay and
// the single-parameter background fit to paired HOM histograms.

namespace homtk::fitkit {

struct Param {
  std::string name;
  double init = 0.0;
  double lo = -1e300;
  double hi = 1e300;
};

using ModelFn = std::function<double(double x, std::span<const double> p)>;
// writes d(model)/d(p_i) into out[i]
using JacobianFn =
    std::function<void(double x, std::span<const double> p, std::span<double> out)>;

struct FitProblem {
  std::string model_name;
  ModelFn model;
  JacobianFn jacobian;  // optional; numeric central differences otherwise
  std::vector<Param> params;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // empty -> shot noise sqrt(max(y,1))

  void validate() const;
};

struct FitResult {
  std::string model_name;
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> uncertainties;  // 1-sigma, from the scaled covariance
  double residual_norm = 0.0;         // chi^2 at the optimum
  double reduced_chi2 = 0.0;
  bool converged = false;
  int iterations = 0;
  bool degenerate = false;  // singular normal equations or unidentifiable fit

  double value(const std::string& name) const;
  double sigma_of(const std::string& name) const;
};

FitResult least_squares(const FitProblem& problem);

// Two Lorentzians plus a constant offset; params c1, c2, fwhm1, fwhm2,
// amp1, amp2, offset (centers canonicalized c1 <= c2). Degeneracy of the two
// centers is reported via FitResult::degenerate.
FitResult fit_ple_doublet(const std::vector<double>& freq_mhz,
                          const std::vector<double>& counts);

// Gaussian (center, sigma, amplitude) plus constant offset.
FitResult fit_inhomogeneous(const std::vector<double>& freq_mhz,
                            const std::vector<double>& counts);

// amp * exp(-t/tau0) + offset.
FitResult fit_lifetime(const std::vector<double>& t_ns,
                       const std::vector<double>& counts);

// Shared c_B against the convolved model with chi = 1 (par) and chi = 0
// (perp); tau0, tau_c, Delta and detector sigma come from `fixed`. Both
// histograms must be normalized. Fits |tau| <= fit_window_ps.
FitResult fit_cb_joint(const mcsim::CorrelationHistogram& par,
                       const mcsim::CorrelationHistogram& perp,
                       const photophys::HomExperiment& fixed,
                       double fit_window_ps = 20000.0);

}  // namespace homtk::fitkit
