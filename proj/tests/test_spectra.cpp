#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homtk/errors.hpp"
#include "homtk/spectra.hpp"
#include "homtk/units.hpp"

using namespace homtk;
using namespace homtk::spectra;

TEST_CASE("lorentzian lineshape") {
  CHECK(lorentzian(100.0, 100.0, 135.8, 3.0) == doctest::Approx(3.0));
  CHECK(lorentzian(100.0 + 135.8 / 2, 100.0, 135.8, 3.0) ==
        doctest::Approx(1.5));
  CHECK(lorentzian(100.0 - 135.8 / 2, 100.0, 135.8, 3.0) ==
        doctest::Approx(1.5));
  CHECK(lorentzian(135.8, 0.0, 135.8, 1.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(lorentzian(0.0, 0.0, 0.0, 1.0), domain_error);
}

TEST_CASE("gaussian lineshape") {
  CHECK(gaussian(0.0, 0.0, 364.5, 2.0) == doctest::Approx(2.0));
  CHECK(gaussian(364.5, 0.0, 364.5, 1.0) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(gaussian(-364.5, 0.0, 364.5, 1.0) ==
        doctest::Approx(0.6065).epsilon(1e-4));
  CHECK_THROWS_AS(gaussian(0.0, 0.0, -1.0, 1.0), domain_error);
}

TEST_CASE("boltzmann branch population ratio") {
  // independent evaluation from the defining constants
  const double expected = std::exp(-6.62607015e-34 * 250e9 /
                                   (1.380649e-23 * 5.0));
  CHECK(boltzmann_ratio(250.0, 5.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(boltzmann_ratio(250.0, 5.0) == doctest::Approx(0.0907).epsilon(0.005));
  CHECK(boltzmann_ratio(0.0, 5.0) == doctest::Approx(1.0));
  CHECK(boltzmann_ratio(250.0, 1e12) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(boltzmann_ratio(250.0, 0.0), domain_error);

  // monotone increasing in T, decreasing in the splitting
  double prev = 0.0;
  for (double t = 1.0; t < 40.0; t += 2.0) {
    const double r = boltzmann_ratio(250.0, t);
    CHECK(r > prev);
    CHECK(r <= 1.0);
    prev = r;
  }
  prev = 2.0;
  for (double d = 0.0; d < 500.0; d += 50.0) {
    const double r = boltzmann_ratio(d, 5.0);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("four-line ZPL structure") {
  LevelStructure ls;
  ls.temperature_k = 5.0;
  const auto spec = zpl_spectrum(ls, 1.0);
  REQUIRE(spec.lines.size() == 4);
  CHECK(spec.lines[0].label == 'A');
  CHECK(spec.lines[0].center_ghz == doctest::Approx(250.0));
  CHECK(spec.lines[1].label == 'B');
  CHECK(spec.lines[1].center_ghz == doctest::Approx(200.0));
  CHECK(spec.lines[2].label == 'C');
  CHECK(spec.lines[2].center_ghz == doctest::Approx(0.0));
  CHECK(spec.lines[3].label == 'D');
  CHECK(spec.lines[3].center_ghz == doctest::Approx(-50.0));

  // frequency ordering A > B > C > D for positive splittings
  for (int i = 0; i < 3; ++i)
    CHECK(spec.lines[i].center_ghz > spec.lines[i + 1].center_ghz);

  // upper-branch lines carry the Boltzmann weight
  CHECK(spec.lines[0].amplitude / spec.lines[2].amplitude ==
        doctest::Approx(boltzmann_ratio(250.0, 5.0)));
  CHECK(spec.lines[0].amplitude == doctest::Approx(spec.lines[1].amplitude));
  CHECK(spec.lines[3].amplitude == doctest::Approx(1.0));

  // high-temperature limit: all four amplitudes equal
  ls.temperature_k = 1e9;
  const auto hot = zpl_spectrum(ls, 1.0);
  for (const auto& line : hot.lines)
    CHECK(line.amplitude == doctest::Approx(1.0).epsilon(1e-6));

  // sampled intensity is nonnegative and peaks near line C
  for (double v : spec.intensity) CHECK(v >= 0.0);
}

TEST_CASE("etalon transmission") {
  EtalonParams et;  // 20 GHz FSR, 1 GHz bandwidth
  CHECK(etalon_transmission(0.0, et) == doctest::Approx(1.0));
  CHECK(etalon_transmission(0.5, et) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(etalon_transmission(-0.5, et) == doctest::Approx(0.5).epsilon(1e-12));

  // half-FSR suppression: F = 1/sin^2(pi/40)
  const double expected = 1.0 / (1.0 + 1.0 / std::pow(std::sin(kPi / 40.0), 2));
  CHECK(etalon_transmission(10.0, et) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(etalon_transmission(10.0, et) ==
        doctest::Approx(6.12e-3).epsilon(0.01));

  // periodic to machine precision
  for (double nu : {0.31, 3.7, 9.99, 14.2}) {
    CHECK(etalon_transmission(nu + 20.0, et) ==
          doctest::Approx(etalon_transmission(nu, et)).epsilon(1e-12));
    CHECK(etalon_transmission(nu + 200.0, et) ==
          doctest::Approx(etalon_transmission(nu, et)).epsilon(1e-9));
  }

  // stages square the transmission
  EtalonParams two = et;
  two.stages = 2;
  const double t1 = etalon_transmission(3.0, et);
  CHECK(etalon_transmission(3.0, two) == doctest::Approx(t1 * t1));

  CHECK_THROWS_AS(etalon_transmission(0.0, EtalonParams{1.0, 2.0, 0.0, 1}),
                  domain_error);
}

TEST_CASE("etalon filtering of the ZPL spectrum") {
  LevelStructure ls;
  ls.temperature_k = 5.0;
  const auto spec = zpl_spectrum(ls, 0.5);
  EtalonParams et;  // peak at C
  const auto filtered = filter_spectrum(spec, et);

  REQUIRE(filtered.lines.size() == 4);
  const double amp_c = filtered.lines[2].amplitude;
  CHECK(amp_c == doctest::Approx(1.0));

  // A (12.5 FSR away) and D (2.5 FSR away) sit half-way between transmission
  // orders and are crushed by the half-FSR Airy value
  CHECK(amp_c / filtered.lines[0].amplitude > 20.0);
  CHECK(amp_c / filtered.lines[3].amplitude > 20.0);
  CHECK(filtered.lines[3].amplitude ==
        doctest::Approx(6.12e-3).epsilon(0.01));

  // B at +200 GHz = 10 FSR coincides with a transmission order for the
  // nominal structure, so only its Boltzmann weight suppresses it
  CHECK(amp_c / filtered.lines[1].amplitude ==
        doctest::Approx(1.0 / boltzmann_ratio(250.0, 5.0)).epsilon(1e-6));

  // pointwise product on the sampled grid
  for (std::size_t i = 0; i < spec.freq_ghz.size(); i += 97) {
    CHECK(filtered.intensity[i] ==
          doctest::Approx(spec.intensity[i] *
                          etalon_transmission(spec.freq_ghz[i], et)));
  }

  // linear in the input spectrum
  Spectrum doubled = spec;
  for (auto& v : doubled.intensity) v *= 2.0;
  const auto filtered2 = filter_spectrum(doubled, et);
  for (std::size_t i = 0; i < spec.freq_ghz.size(); i += 131)
    CHECK(filtered2.intensity[i] ==
          doctest::Approx(2.0 * filtered.intensity[i]));

  // flat unity transmission is the identity; zero spectrum stays zero
  Spectrum zero = spec;
  for (auto& v : zero.intensity) v = 0.0;
  const auto fz = filter_spectrum(zero, et);
  for (double v : fz.intensity) CHECK(v == 0.0);

  // idempotent only for {0,1}-valued transmission: applying the smooth
  // etalon twice is the stages=2 filter, not the stages=1 one
  const auto once_more = filter_spectrum(filtered, et);
  EtalonParams sq = et;
  sq.stages = 2;
  const auto two_stage = filter_spectrum(spec, sq);
  double max_diff_vs_once = 0.0;
  for (std::size_t i = 0; i < spec.freq_ghz.size(); ++i) {
    CHECK(once_more.intensity[i] ==
          doctest::Approx(two_stage.intensity[i]).epsilon(1e-9));
    max_diff_vs_once = std::max(
        max_diff_vs_once, std::abs(once_more.intensity[i] - filtered.intensity[i]));
  }
  CHECK(max_diff_vs_once > 1e-3);
}

TEST_CASE("thermal broadening estimate") {
  CHECK(thermal_broadening_mhz(4.75) == doctest::Approx(12.0));
  CHECK(thermal_broadening_mhz(9.5) == doctest::Approx(96.0));
  CHECK(thermal_broadening_mhz(1e-6) == doctest::Approx(0.0).epsilon(1e-12));
  // configurable exponent
  CHECK(thermal_broadening_mhz(9.5, 1.0) == doctest::Approx(24.0));
  CHECK_THROWS_AS(thermal_broadening_mhz(0.0), domain_error);
}
