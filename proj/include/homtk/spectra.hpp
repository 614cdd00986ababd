#pragma once

#include <vector>

// Lineshapes, the four-line SiV zero-phonon-line structure with thermal
// population weights, Airy etalon filtering and the inhomogeneous
// distribution model. Frequencies are GHz relative to transition C unless
// a _mhz suffix says otherwise.

namespace homtk::spectra {

// Fraction of the total fluorescence emitted into the ZPL (lower bound);
// used for rate budgeting only, there is no phonon-sideband model.
inline constexpr double kZplFluorescenceFraction = 0.70;

struct LevelStructure {
  double zpl_c_thz = 406.7001;         // transition C absolute reference
  double lambda_so_ground_ghz = 50.0;  // ground-state spin-orbit splitting
  double lambda_so_excited_ghz = 250.0;
  double temperature_k = 5.0;

  void validate() const;
};

struct SpectralLine {
  char label;  // 'A'..'D'
  double center_ghz;
  double fwhm_ghz;
  double amplitude;
};

struct Spectrum {
  std::vector<double> freq_ghz;
  std::vector<double> intensity;
  std::vector<SpectralLine> lines;
};

struct InhomogeneousModel {
  double center_mhz = 0.0;
  double sigma_mhz = 364.5;
  double amplitude = 1.0;

  void validate() const;
};

struct GridSpec {
  double min_ghz = -120.0;
  double max_ghz = 320.0;
  double step_ghz = 0.05;
};

struct EtalonParams {
  double fsr_ghz = 20.0;
  double bandwidth_fwhm_ghz = 1.0;
  double peak_offset_ghz = 0.0;
  int stages = 1;  // >1 squares/cubes the single-pass transmission
};

double lorentzian(double nu, double center, double fwhm, double amplitude);
double gaussian(double nu, double center, double sigma, double amplitude);

// Upper/lower branch population ratio exp(-h Delta / kB T).
double boltzmann_ratio(double delta_e_ghz, double temperature_k);

// Four Lorentzian ZPL lines at offsets A=+lu, B=+lu-lg, C=0, D=-lg relative
// to transition C; A and B are weighted by the Boltzmann population of the
// upper excited branch. Equal dipole strengths are assumed.
Spectrum zpl_spectrum(const LevelStructure& ls, double line_fwhm_ghz,
                      const GridSpec& grid = {});

// Airy transmission, period fsr, unity at the peaks, FWHM = bandwidth.
double etalon_transmission(double nu_ghz, const EtalonParams& et);

// Pointwise product of spectrum and etalon transmission; line amplitudes are
// scaled by the transmission at their centers.
Spectrum filter_spectrum(const Spectrum& spec, const EtalonParams& et);

// Phonon broadening of transition C, anchored to 12 MHz at 4.75 K with a
// configurable power-law exponent (default cubic).
double thermal_broadening_mhz(double temperature_k, double exponent = 3.0);

}  // namespace homtk::spectra
