#include "homtk/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homtk/errors.hpp"
#include "homtk/spectra.hpp"
#include "homtk/units.hpp"

namespace homtk::fitkit {

namespace {

// Cholesky solve of the (small, SPD) normal equations; false if not SPD.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, int n,
                    std::vector<double>& out) {
  std::vector<double> l(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  // forward then backward substitution
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
  out = std::move(b);
  return true;
}

struct Workspace {
  const FitProblem& prob;
  std::vector<double> weights;  // 1/sigma_i

  explicit Workspace(const FitProblem& p) : prob(p) {
    weights.resize(p.y.size());
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      const double s = p.sigma.empty()
                           ? std::sqrt(std::max(p.y[i], 1.0))
                           : p.sigma[i];
      if (!(s > 0.0)) throw domain_error("sigma_y must be > 0");
      weights[i] = 1.0 / s;
    }
  }

  double chi2(std::span<const double> p) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < prob.x.size(); ++i) {
      const double r = (prob.y[i] - prob.model(prob.x[i], p)) * weights[i];
      acc += r * r;
    }
    return acc;
  }

  // weighted Jacobian of the residuals (row-major n x p) and gradient rhs
  void jacobian(std::span<const double> p, std::vector<double>& jw,
                std::vector<double>& resid) const {
    const int np = static_cast<int>(p.size());
    const auto n = prob.x.size();
    jw.assign(n * np, 0.0);
    resid.resize(n);
    std::vector<double> row(np);
    std::vector<double> plus(p.begin(), p.end());
    std::vector<double> minus(p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (prob.jacobian) {
        prob.jacobian(prob.x[i], p, row);
      } else {
        for (int j = 0; j < np; ++j) {
          const double h = 1e-6 * std::max(std::abs(p[j]), 1.0);
          const double hi = std::min(p[j] + h, prob.params[j].hi);
          const double lo = std::max(p[j] - h, prob.params[j].lo);
          if (hi == lo) {
            row[j] = 0.0;
            continue;
          }
          plus[j] = hi;
          minus[j] = lo;
          row[j] = (prob.model(prob.x[i], plus) -
                    prob.model(prob.x[i], minus)) /
                   (hi - lo);
          plus[j] = p[j];
          minus[j] = p[j];
        }
      }
      resid[i] = (prob.y[i] - prob.model(prob.x[i], p)) * weights[i];
      for (int j = 0; j < np; ++j) jw[i * np + j] = row[j] * weights[i];
    }
  }
};

}  // namespace

void FitProblem::validate() const {
  if (!model) throw domain_error("fit problem needs a model");
  if (params.empty()) throw domain_error("fit needs >= 1 free parameter");
  if (x.size() != y.size()) throw domain_error("x/y size mismatch");
  if (!sigma.empty() && sigma.size() != y.size())
    throw domain_error("sigma size mismatch");
  if (x.size() <= params.size())
    throw domain_error("need more data points than free parameters");
  for (const auto& p : params) {
    if (!(p.lo <= p.init && p.init <= p.hi))
      throw domain_error("initial value of '" + p.name + "' outside bounds");
  }
}

double FitResult::value(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return estimates[i];
  throw domain_error("unknown fit parameter '" + name + "'");
}

double FitResult::sigma_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return uncertainties[i];
  throw domain_error("unknown fit parameter '" + name + "'");
}

FitResult least_squares(const FitProblem& problem) {
  problem.validate();
  const Workspace ws(problem);
  const int np = static_cast<int>(problem.params.size());
  const auto n = problem.x.size();

  std::vector<double> p(np);
  for (int j = 0; j < np; ++j) p[j] = problem.params[j].init;

  FitResult res;
  res.model_name = problem.model_name;
  for (const auto& par : problem.params) res.names.push_back(par.name);

  double chi2 = ws.chi2(p);
  double lambda = 1e-3;
  constexpr int kMaxIter = 10000;
  std::vector<double> jw, resid, a(np * np), g(np), delta, trial(np);

  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    ws.jacobian(p, jw, resid);
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < np; ++j) {
        g[j] += jw[i * np + j] * resid[i];
        for (int k = 0; k <= j; ++k)
          a[j * np + k] += jw[i * np + j] * jw[i * np + k];
      }
    }
    for (int j = 0; j < np; ++j)
      for (int k = j + 1; k < np; ++k) a[j * np + k] = a[k * np + j];

    bool accepted = false;
    while (lambda < 1e15) {
      std::vector<double> damped = a;
      for (int j = 0; j < np; ++j) {
        const double d = a[j * np + j];
        // a flat direction (zero curvature) is damped against lambda alone
        damped[j * np + j] = d > 0.0 ? d * (1.0 + lambda) : lambda;
      }
      if (!cholesky_solve(damped, g, np, delta)) {
        lambda *= 10.0;
        continue;
      }
      double step_norm = 0.0, p_norm = 0.0;
      for (int j = 0; j < np; ++j) {
        trial[j] = std::clamp(p[j] + delta[j], problem.params[j].lo,
                              problem.params[j].hi);
        step_norm += (trial[j] - p[j]) * (trial[j] - p[j]);
        p_norm += p[j] * p[j];
      }
      const double trial_chi2 = ws.chi2(trial);
      if (trial_chi2 <= chi2) {
        const double rel_drop = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
        p.assign(trial.begin(), trial.end());
        chi2 = trial_chi2;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel_drop < 1e-9 ||
            std::sqrt(step_norm) < 1e-12 * (1.0 + std::sqrt(p_norm)))
          res.converged = true;
        break;
      }
      lambda *= 2.0;
    }
    if (!accepted) {
      // no downhill step found: at a (possibly flat) minimum
      res.converged = chi2 < 1e300;
      break;
    }
    if (res.converged) break;
  }

  res.iterations = iter + 1;
  if (iter >= kMaxIter) res.converged = false;
  res.estimates = p;
  res.residual_norm = chi2;
  const double dof = static_cast<double>(n) - np;
  res.reduced_chi2 = dof > 0 ? chi2 / dof : 0.0;

  // covariance = scaled inverse of the normal-equations matrix at the optimum
  ws.jacobian(p, jw, resid);
  std::fill(a.begin(), a.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < np; ++j)
      for (int k = 0; k < np; ++k)
        a[j * np + k] += jw[i * np + j] * jw[i * np + k];

  const double scale = dof > 0 ? std::max(res.reduced_chi2, 1e-30) : 1.0;
  res.uncertainties.assign(np, 0.0);
  std::vector<double> col(np), unit(np, 0.0);
  std::vector<double> ridged = a;
  bool singular = false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    singular = false;
    for (int j = 0; j < np && !singular; ++j) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[j] = 1.0;
      if (!cholesky_solve(ridged, unit, np, col) || !(col[j] >= 0.0)) {
        singular = true;
        break;
      }
      res.uncertainties[j] = std::sqrt(col[j] * scale);
    }
    if (!singular) break;
    double dmax = 0.0;
    for (int j = 0; j < np; ++j) dmax = std::max(dmax, a[j * np + j]);
    ridged = a;
    for (int j = 0; j < np; ++j)
      ridged[j * np + j] += std::max(dmax, 1.0) * 1e-12;
    res.degenerate = true;
  }
  if (singular) {
    res.degenerate = true;
    std::fill(res.uncertainties.begin(), res.uncertainties.end(), 1e300);
  }
  return res;
}

namespace {

struct PeakGuess {
  double offset, height, center, halfmax_width;
};

PeakGuess guess_peak(const std::vector<double>& x,
                     const std::vector<double>& y) {
  PeakGuess g{};
  g.offset = *std::min_element(y.begin(), y.end());
  double peak = g.offset;
  std::size_t peak_i = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > peak) peak = y[i], peak_i = i;
  g.height = peak - g.offset;
  const double half = g.offset + 0.5 * g.height;
  std::size_t lo = peak_i, hi = peak_i;
  while (lo > 0 && y[lo] > half) --lo;
  while (hi + 1 < y.size() && y[hi] > half) ++hi;
  g.halfmax_width = std::max(std::abs(x[hi] - x[lo]),
                             std::abs(x[1] - x[0]));
  // centroid over the above-half region is noise-robust
  double wsum = 0.0, xsum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double w = std::max(y[i] - g.offset, 0.0);
    wsum += w;
    xsum += w * x[i];
  }
  g.center = wsum > 0.0 ? xsum / wsum : x[peak_i];
  return g;
}

double span_of(const std::vector<double>& x) {
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

}  // namespace

FitResult fit_ple_doublet(const std::vector<double>& freq_mhz,
                          const std::vector<double>& counts) {
  if (freq_mhz.size() < 8) throw domain_error("doublet fit needs >= 8 points");
  const PeakGuess g = guess_peak(freq_mhz, counts);
  const double span = span_of(freq_mhz);
  auto [xlo, xhi] = std::minmax_element(freq_mhz.begin(), freq_mhz.end());
  const double ymax = g.offset + g.height;

  FitProblem prob;
  prob.model_name = "ple_doublet";
  prob.model = [](double x, std::span<const double> p) {
    return spectra::lorentzian(x, p[0], p[2], p[4]) +
           spectra::lorentzian(x, p[1], p[3], p[5]) + p[6];
  };
  prob.jacobian = [](double x, std::span<const double> p,
                     std::span<double> out) {
    for (int line = 0; line < 2; ++line) {
      const double c = p[line], w = p[2 + line], a = p[4 + line];
      const double hw = 0.5 * w, d = x - c, den = d * d + hw * hw;
      const double shape = hw * hw / den;
      out[line] = a * 2.0 * d * hw * hw / (den * den);
      out[2 + line] = a * (hw / den - hw * hw * hw / (den * den));
      out[4 + line] = shape;
    }
    out[6] = 1.0;
  };
  prob.params = {
      {"center1", g.center - 0.25 * g.halfmax_width, *xlo, *xhi},
      {"center2", g.center + 0.25 * g.halfmax_width, *xlo, *xhi},
      {"fwhm1", 0.8 * g.halfmax_width, 1e-3 * span, 2.0 * span},
      {"fwhm2", 0.8 * g.halfmax_width, 1e-3 * span, 2.0 * span},
      {"amp1", 0.6 * g.height, 0.0, 10.0 * ymax},
      {"amp2", 0.6 * g.height, 0.0, 10.0 * ymax},
      {"offset", g.offset, 0.0, ymax},
  };
  prob.x = freq_mhz;
  prob.y = counts;

  FitResult res = least_squares(prob);
  // canonical order center1 <= center2
  if (res.estimates[0] > res.estimates[1]) {
    std::swap(res.estimates[0], res.estimates[1]);
    std::swap(res.estimates[2], res.estimates[3]);
    std::swap(res.estimates[4], res.estimates[5]);
    std::swap(res.uncertainties[0], res.uncertainties[1]);
    std::swap(res.uncertainties[2], res.uncertainties[3]);
    std::swap(res.uncertainties[4], res.uncertainties[5]);
  }
  const double sep = res.estimates[1] - res.estimates[0];
  if (sep < res.uncertainties[0] + res.uncertainties[1])
    res.degenerate = true;
  return res;
}

FitResult fit_inhomogeneous(const std::vector<double>& freq_mhz,
                            const std::vector<double>& counts) {
  if (freq_mhz.size() < 5) throw domain_error("gaussian fit needs >= 5 points");
  const PeakGuess g = guess_peak(freq_mhz, counts);
  const double span = span_of(freq_mhz);

  FitProblem prob;
  prob.model_name = "inhomogeneous_gaussian";
  prob.model = [](double x, std::span<const double> p) {
    return spectra::gaussian(x, p[0], p[1], p[2]);
  };
  prob.jacobian = [](double x, std::span<const double> p,
                     std::span<double> out) {
    const double z = (x - p[0]) / p[1];
    const double e = std::exp(-0.5 * z * z);
    out[0] = p[2] * e * z / p[1];
    out[1] = p[2] * e * z * z / p[1];
    out[2] = e;
  };
  // half-max width of a Gaussian is 2.355 sigma
  prob.params = {
      {"center", g.center, g.center - span, g.center + span},
      {"sigma", std::max(g.halfmax_width / 2.355, 1e-3 * span), 1e-4 * span,
       2.0 * span},
      {"amplitude", g.offset + g.height, 0.0, 10.0 * (g.offset + g.height)},
  };
  prob.x = freq_mhz;
  prob.y = counts;
  return least_squares(prob);
}

FitResult fit_lifetime(const std::vector<double>& t_ns,
                       const std::vector<double>& counts) {
  if (t_ns.size() < 5) throw domain_error("lifetime fit needs >= 5 points");
  const double span = span_of(t_ns);
  // offset from the tail of the histogram
  const std::size_t tail = std::max<std::size_t>(1, t_ns.size() / 10);
  double offset = 0.0;
  for (std::size_t i = t_ns.size() - tail; i < t_ns.size(); ++i)
    offset += counts[i];
  offset /= static_cast<double>(tail);
  const double amp0 =
      *std::max_element(counts.begin(), counts.end()) - offset;

  // crude tau from the 1/e crossing
  double tau0 = span / 3.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] - offset < amp0 * std::exp(-1.0)) {
      tau0 = std::max(t_ns[i] - t_ns[0], span / 100.0);
      break;
    }
  }

  FitProblem prob;
  prob.model_name = "lifetime_decay";
  prob.model = [](double x, std::span<const double> p) {
    return p[0] * std::exp(-x / p[1]) + p[2];
  };
  prob.jacobian = [](double x, std::span<const double> p,
                     std::span<double> out) {
    const double e = std::exp(-x / p[1]);
    out[0] = e;
    out[1] = p[0] * e * x / (p[1] * p[1]);
    out[2] = 1.0;
  };
  const double ymax = *std::max_element(counts.begin(), counts.end());
  prob.params = {
      {"amplitude", std::max(amp0, 1.0), 0.0, 10.0 * std::max(ymax, 1.0)},
      {"tau0", tau0, span * 1e-4, span * 100.0},
      {"offset", std::max(offset, 0.0), 0.0, std::max(ymax, 1.0)},
  };
  prob.x = t_ns;
  prob.y = counts;

  FitResult res = least_squares(prob);
  // amplitude consistent with zero means there is no decay to fit
  if (res.estimates[0] <= res.uncertainties[0]) {
    res.degenerate = true;
    res.converged = false;
  }
  return res;
}

FitResult fit_cb_joint(const mcsim::CorrelationHistogram& par,
                       const mcsim::CorrelationHistogram& perp,
                       const photophys::HomExperiment& fixed,
                       double fit_window_ps) {
  for (const auto* h : {&par, &perp}) {
    if (h->g2.empty() || !(h->normalization > 0.0))
      throw domain_error("fit_cb_joint needs normalized histograms");
  }

  // The model is affine in c_B: g2 = 1 - (1 - c_B) K(tau), with K the
  // bin-averaged convolved dip shape at c_B = 0. Precompute K per dataset.
  std::vector<double> xs, ys, sigmas, shape;
  for (int which = 0; which < 2; ++which) {
    const auto& h = which == 0 ? par : perp;
    photophys::HomExperiment model = fixed;
    model.chi = which == 0 ? 1.0 : 0.0;
    model.c_background = 0.0;
    std::vector<double> centers;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < h.centers_ps.size(); ++i) {
      if (std::abs(h.centers_ps[i]) <= fit_window_ps) {
        centers.push_back(h.centers_ps[i]);
        keep.push_back(i);
      }
    }
    if (centers.size() < 10)
      throw domain_error("fit_cb_joint: too few bins inside the fit window");
    const auto m0 = photophys::binned_model(model, centers, h.bin_width_ps,
                                            fixed.detector_sigma_ps > 0.0);
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const std::size_t i = keep[k];
      xs.push_back(static_cast<double>(shape.size()));
      ys.push_back(h.g2[i]);
      sigmas.push_back(std::sqrt(std::max(h.g2[i], 1.0 / h.normalization) /
                                 h.normalization));
      shape.push_back(1.0 - m0[k]);  // K(tau_i)
    }
  }

  FitProblem prob;
  prob.model_name = "cb_joint";
  prob.model = [shape](double x, std::span<const double> p) {
    return 1.0 - (1.0 - p[0]) * shape[static_cast<std::size_t>(x)];
  };
  prob.jacobian = [shape](double x, std::span<const double>,
                          std::span<double> out) {
    out[0] = shape[static_cast<std::size_t>(x)];
  };
  prob.params = {{"c_background", 0.1, 0.0, 0.999}};
  prob.x = xs;
  prob.y = ys;
  prob.sigma = sigmas;
  return least_squares(prob);
}

}  // namespace homtk::fitkit
