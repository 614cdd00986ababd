#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "homtk/errors.hpp"
#include "homtk/photophys.hpp"
#include "homtk/units.hpp"

using namespace homtk;
using namespace homtk::photophys;

namespace {

HomExperiment nominal(double chi, double c_b) {
  HomExperiment exp;
  exp.emitter_a.lifetime_ns = 1.73;
  exp.emitter_b.lifetime_ns = 1.73;
  exp.emitter_a.fwhm_mhz = 135.8;
  exp.emitter_b.fwhm_mhz = 134.6;
  exp.emitter_a.frequency_offset_mhz = 0.0;
  exp.emitter_b.frequency_offset_mhz = 52.1;
  exp.chi = chi;
  exp.c_background = c_b;
  exp.detector_sigma_ps = 150.0;
  return exp;
}

// Independent oracle for the jitter convolution: Simpson quadrature of
// g2(t) N(t - tau; 0, sqrt(2) sigma) directly against the closed form.
double quadrature_convolution(const HomExperiment& exp, double tau_ps,
                              double sigma_det_ps) {
  const double sigma = std::sqrt(2.0) * sigma_det_ps;
  const double half = 8.0 * sigma;
  const int n = 4000;  // even
  const double h = 2.0 * half / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = -half + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double kernel =
        std::exp(-0.5 * t * t / (sigma * sigma)) / (sigma * std::sqrt(kTwoPi));
    acc += w * kernel * g2_hom(ns_from_ps(tau_ps + t), exp);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("transform-limited linewidth") {
  CHECK(transform_limited_linewidth_mhz(1.73) == doctest::Approx(92.0).epsilon(0.002));
  // reciprocal identity: tau0 = 1/(2 pi) ns -> 1000 MHz
  CHECK(transform_limited_linewidth_mhz(1.0 / kTwoPi) == doctest::Approx(1000.0));
  // long lifetimes limit to zero width
  CHECK(transform_limited_linewidth_mhz(1e12) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(transform_limited_linewidth_mhz(0.0), domain_error);
  CHECK_THROWS_AS(transform_limited_linewidth_mhz(-1.0), domain_error);
}

TEST_CASE("coherence time from linewidth") {
  CHECK(coherence_time_ns(135.2) == doctest::Approx(1.177).epsilon(0.001));
  CHECK(coherence_time_ns(135.8) == doctest::Approx(1.172).epsilon(0.001));
  CHECK(coherence_time_ns(1000.0 / kTwoPi) == doctest::Approx(1.0));
  CHECK_THROWS_AS(coherence_time_ns(0.0), domain_error);
}

TEST_CASE("pure dephasing rate") {
  CHECK(pure_dephasing_rate_per_ns(1.73, 135.2) ==
        doctest::Approx(0.1357).epsilon(0.001));
  const double limit = transform_limited_linewidth_mhz(1.73);
  CHECK(pure_dephasing_rate_per_ns(1.73, limit) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pure_dephasing_rate_per_ns(1.73, limit - 1.0), domain_error);
}

TEST_CASE("consistency chain at the transform limit") {
  for (double tau0 : {0.5, 1.73, 10.0}) {
    const double fwhm = transform_limited_linewidth_mhz(tau0);
    CHECK(coherence_time_ns(fwhm) == doctest::Approx(tau0).epsilon(1e-12));
    CHECK(pure_dephasing_rate_per_ns(tau0, fwhm) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("single-emitter autocorrelation") {
  CHECK(g2_single(0.0, 1.73, 0.0) == doctest::Approx(0.0));
  CHECK(g2_single(0.0, 1.73, 0.12) == doctest::Approx(0.12));
  CHECK(g2_single(1.73, 1.73, 0.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(g2_single(1e6, 1.73, 0.0) == doctest::Approx(1.0));
  CHECK(g2_single(-0.5, 1.73, 0.0) == g2_single(0.5, 1.73, 0.0));
  CHECK_THROWS_AS(g2_single(0.0, -1.0, 0.0), domain_error);
  CHECK_THROWS_AS(g2_single(0.0, 1.0, 1.0), domain_error);
}

TEST_CASE("squared field autocorrelation") {
  CHECK(g1_sq(0.0, 1.18, 0.0) == doctest::Approx(1.0));
  CHECK(g1_sq(0.0, 1.18, 0.12) == doctest::Approx(0.88));
  CHECK(g1_sq(1.18, 1.18, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // monotone decreasing in |tau|
  double prev = 2.0;
  for (double tau = 0.0; tau < 5.0; tau += 0.25) {
    const double v = g1_sq(tau, 1.18, 0.05);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(g1_sq(0.0, 0.0, 0.0), domain_error);
}

TEST_CASE("g2_hom endpoints") {
  CHECK(g2_hom(0.0, nominal(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g2_hom(0.0, nominal(0.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g2_hom(0.0, nominal(1.0, 0.12)) == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(g2_hom(0.0, nominal(0.0, 0.12)) == doctest::Approx(0.56).epsilon(1e-12));
}

TEST_CASE("g2_hom symmetry, bounds and limits") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    HomExperiment exp = nominal(u(gen), 0.9 * u(gen));
    exp.detuning_delta_mhz = 200.0 * u(gen);
    const double tau = -30.0 + 60.0 * u(gen);
    const double fwd = g2_hom(tau, exp);
    CHECK(fwd == g2_hom(-tau, exp));  // exact by construction
    CHECK(fwd >= 0.0);
    CHECK(fwd <= 1.5);
  }

  // distinguishable limit: chi=0 equals 1/2 g2_single + 1/2 pointwise
  HomExperiment perp = nominal(0.0, 0.12);
  for (double tau = -8.0; tau <= 8.0; tau += 0.37) {
    CHECK(g2_hom(tau, perp) ==
          doctest::Approx(0.5 * g2_single(tau, perp.tau0_ns(), 0.12) + 0.5)
              .epsilon(1e-12));
  }

  // g2 -> 1 at long delays (no shelving)
  HomExperiment par = nominal(1.0, 0.12);
  for (double tau = 50.0; tau < 150.0; tau += 10.0)
    CHECK(std::abs(g2_hom(tau, par) - 1.0) < 1e-3);

  // monotone in the background at tau=0; equals c_b exactly when delta=0
  HomExperiment zero_delta = nominal(1.0, 0.0);
  zero_delta.detuning_delta_mhz = 0.0;
  double prev = -1.0;
  for (double cb = 0.0; cb < 0.95; cb += 0.05) {
    zero_delta.c_background = cb;
    const double v = g2_hom(0.0, zero_delta);
    CHECK(v == doctest::Approx(cb).epsilon(1e-12));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("experiment derived quantities") {
  HomExperiment exp = nominal(1.0, 0.12);
  CHECK(exp.delta_mhz() == doctest::Approx(52.1));
  CHECK(exp.tau_c_ns() == doctest::Approx(coherence_time_ns(135.2)));
  exp.detuning_delta_mhz = 10.0;
  CHECK(exp.delta_mhz() == doctest::Approx(10.0));
  exp.tau_c_override_ns = 1.18;
  CHECK(exp.tau_c_ns() == doctest::Approx(1.18));

  HomExperiment bad = nominal(1.0, 0.12);
  bad.emitter_a.fwhm_mhz = 50.0;  // below the 92 MHz transform limit
  CHECK_THROWS_AS(bad.validate(), domain_error);
}

TEST_CASE("jitter convolution basics") {
  HomExperiment exp = nominal(1.0, 0.12);
  auto curve = model_curve(exp, 20000.0, 5.0);

  // sigma = 0 leaves the curve untouched
  auto same = convolve_with_jitter(curve, 0.0);
  CHECK(same.g2 == curve.g2);

  // constant curve stays constant under the normalized kernel
  CorrelationCurve flat = curve;
  for (auto& v : flat.g2) v = 1.0;
  auto conv_flat = convolve_with_jitter(flat, 150.0);
  for (double v : conv_flat.g2) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  // sigma far below the grid step acts as a delta kernel
  auto delta = convolve_with_jitter(curve, 5.0 / 100.0);
  double sup = 0.0;
  for (std::size_t i = 0; i < curve.g2.size(); ++i)
    sup = std::max(sup, std::abs(delta.g2[i] - curve.g2[i]));
  CHECK(sup < 1e-3);
  CHECK(delta.meta.convolved);

  // under-resolved grids are rejected
  CHECK_THROWS_AS(convolve_with_jitter(curve, 20.0), precision_error);
  CHECK_THROWS_AS(convolve_with_jitter(curve, -1.0), domain_error);

  // non-uniform grids are rejected
  CorrelationCurve ragged = curve;
  ragged.tau_ps[10] += 1.0;
  CHECK_THROWS_AS(convolve_with_jitter(ragged, 150.0), domain_error);

  CHECK_THROWS_AS(model_curve(exp, 0.0, 5.0), domain_error);
  CHECK_THROWS_AS(model_curve(exp, 1000.0, -5.0), domain_error);

  HomExperiment bad_chi = exp;
  bad_chi.chi = 1.5;
  CHECK_THROWS_AS(bad_chi.validate(), domain_error);
  HomExperiment bad_sigma = exp;
  bad_sigma.detector_sigma_ps = -1.0;
  CHECK_THROWS_AS(bad_sigma.validate(), domain_error);
}

TEST_CASE("convolved dip against the quadrature oracle") {
  HomExperiment exp = nominal(1.0, 0.12);
  exp.tau_c_override_ns = 1.18;
  exp.detuning_delta_mhz = 52.1;

  auto curve = model_curve(exp, 20000.0, 5.0);
  auto conv = convolve_with_jitter(curve, 150.0);
  const std::size_t mid = conv.g2.size() / 2;
  CHECK(conv.tau_ps[mid] == doctest::Approx(0.0));

  const double oracle0 = quadrature_convolution(exp, 0.0, 150.0);
  CHECK(conv.g2[mid] == doctest::Approx(oracle0).epsilon(2e-4));
  // frozen from the quadrature oracle; the reference measurement is 0.26 +- 0.05
  CHECK(oracle0 == doctest::Approx(0.21738).epsilon(5e-4));
  CHECK(conv.g2[mid] > 0.21);
  CHECK(conv.g2[mid] < 0.31);

  // a few off-center delays too, evaluated at the actual grid points
  for (double tau_ps : {510.0, 1025.0, 4095.0}) {
    const auto idx = mid + static_cast<std::size_t>(tau_ps / 5.0);
    CHECK(conv.g2[idx] ==
          doctest::Approx(quadrature_convolution(exp, conv.tau_ps[idx], 150.0))
              .epsilon(2e-4));
  }

  // integral over the central window preserved to < 1e-6 relative
  double before = 0.0, after = 0.0;
  const std::size_t margin = 400;  // stay clear of the replicated edges
  for (std::size_t i = margin; i + margin < curve.g2.size(); ++i) {
    before += curve.g2[i];
    after += conv.g2[i];
  }
  CHECK(std::abs(after - before) / before < 1e-6);

  // perpendicular configuration
  HomExperiment perp = exp;
  perp.chi = 0.0;
  auto conv_perp =
      convolve_with_jitter(model_curve(perp, 20000.0, 5.0), 150.0);
  CHECK(conv_perp.g2[mid] ==
        doctest::Approx(quadrature_convolution(perp, 0.0, 150.0)).epsilon(2e-4));
  CHECK(conv_perp.g2[mid] > 0.58);
  CHECK(conv_perp.g2[mid] < 0.74);
}

TEST_CASE("visibility") {
  CHECK(hom_visibility(0.26, 0.66) == doctest::Approx(0.7174).epsilon(2e-4));
  CHECK(hom_visibility(0.0, 0.4) == doctest::Approx(1.0));
  CHECK(hom_visibility(0.3, 0.3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(hom_visibility(0.0, 0.0), domain_error);
  CHECK_THROWS_AS(hom_visibility(-0.1, 0.5), domain_error);
}

TEST_CASE("binned model averages the cusp") {
  HomExperiment exp = nominal(1.0, 0.0);
  exp.detuning_delta_mhz = 0.0;
  exp.detector_sigma_ps = 0.0;
  const std::vector<double> centers{0.0, 1024.0, -1024.0};
  const auto binned = binned_model(exp, centers, 1024.0, false);
  // bin average over the cusp sits well above the pointwise value
  CHECK(binned[0] > g2_hom(0.0, exp) + 0.05);
  CHECK(binned[1] == doctest::Approx(binned[2]).epsilon(1e-10));
  // wide flat region averages to the pointwise value
  const auto far = binned_model(exp, {80000.0}, 1024.0, false);
  CHECK(far[0] == doctest::Approx(1.0).epsilon(1e-4));
}
