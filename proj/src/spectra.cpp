#include "homtk/spectra.hpp"

#include <cmath>

#include "homtk/errors.hpp"
#include "homtk/units.hpp"

namespace homtk::spectra {

void LevelStructure::validate() const {
  if (!(lambda_so_ground_ghz > 0.0) || !(lambda_so_excited_ghz > 0.0))
    throw domain_error("spin-orbit splittings must be > 0");
  if (!(temperature_k > 0.0)) throw domain_error("temperature must be > 0");
}

void InhomogeneousModel::validate() const {
  if (!(sigma_mhz > 0.0)) throw domain_error("sigma must be > 0");
  if (!(amplitude > 0.0)) throw domain_error("amplitude must be > 0");
}

double lorentzian(double nu, double center, double fwhm, double amplitude) {
  if (!(fwhm > 0.0)) throw domain_error("lorentzian fwhm must be > 0");
  const double hwhm = 0.5 * fwhm;
  const double d = nu - center;
  return amplitude * hwhm * hwhm / (d * d + hwhm * hwhm);
}

double gaussian(double nu, double center, double sigma, double amplitude) {
  if (!(sigma > 0.0)) throw domain_error("gaussian sigma must be > 0");
  const double z = (nu - center) / sigma;
  return amplitude * std::exp(-0.5 * z * z);
}

double boltzmann_ratio(double delta_e_ghz, double temperature_k) {
  if (!(temperature_k > 0.0)) throw domain_error("temperature must be > 0");
  if (delta_e_ghz == 0.0) return 1.0;
  const double exponent =
      kPlanckOverBoltzmann_sK * delta_e_ghz * 1e9 / temperature_k;
  return std::exp(-exponent);
}

Spectrum zpl_spectrum(const LevelStructure& ls, double line_fwhm_ghz,
                      const GridSpec& grid) {
  ls.validate();
  if (!(line_fwhm_ghz > 0.0)) throw domain_error("line fwhm must be > 0");
  if (!(grid.step_ghz > 0.0) || !(grid.max_ghz > grid.min_ghz))
    throw domain_error("bad spectrum grid");

  const double upper_weight =
      boltzmann_ratio(ls.lambda_so_excited_ghz, ls.temperature_k);
  Spectrum s;
  s.lines = {
      {'A', ls.lambda_so_excited_ghz, line_fwhm_ghz, upper_weight},
      {'B', ls.lambda_so_excited_ghz - ls.lambda_so_ground_ghz, line_fwhm_ghz,
       upper_weight},
      {'C', 0.0, line_fwhm_ghz, 1.0},
      {'D', -ls.lambda_so_ground_ghz, line_fwhm_ghz, 1.0},
  };

  const auto n = static_cast<long>(
      std::floor((grid.max_ghz - grid.min_ghz) / grid.step_ghz)) + 1;
  s.freq_ghz.reserve(n);
  s.intensity.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double nu = grid.min_ghz + static_cast<double>(i) * grid.step_ghz;
    double value = 0.0;
    for (const auto& line : s.lines)
      value += lorentzian(nu, line.center_ghz, line.fwhm_ghz, line.amplitude);
    s.freq_ghz.push_back(nu);
    s.intensity.push_back(value);
  }
  return s;
}

double etalon_transmission(double nu_ghz, const EtalonParams& et) {
  if (!(et.bandwidth_fwhm_ghz > 0.0) || !(et.fsr_ghz > et.bandwidth_fwhm_ghz))
    throw domain_error("etalon requires 0 < bandwidth < fsr");
  if (et.stages < 1) throw domain_error("etalon stages must be >= 1");
  const double sin_half = std::sin(kPi * et.bandwidth_fwhm_ghz / (2.0 * et.fsr_ghz));
  const double finesse_coeff = 1.0 / (sin_half * sin_half);
  const double s = std::sin(kPi * (nu_ghz - et.peak_offset_ghz) / et.fsr_ghz);
  const double single = 1.0 / (1.0 + finesse_coeff * s * s);
  double t = single;
  for (int i = 1; i < et.stages; ++i) t *= single;
  return t;
}

Spectrum filter_spectrum(const Spectrum& spec, const EtalonParams& et) {
  if (spec.freq_ghz.size() != spec.intensity.size())
    throw domain_error("spectrum grid/intensity size mismatch");
  Spectrum out = spec;
  for (std::size_t i = 0; i < out.freq_ghz.size(); ++i)
    out.intensity[i] *= etalon_transmission(out.freq_ghz[i], et);
  for (auto& line : out.lines)
    line.amplitude *= etalon_transmission(line.center_ghz, et);
  return out;
}

double thermal_broadening_mhz(double temperature_k, double exponent) {
  if (!(temperature_k > 0.0)) throw domain_error("temperature must be > 0");
  constexpr double kReferenceMhz = 12.0;
  constexpr double kReferenceK = 4.75;
  return kReferenceMhz * std::pow(temperature_k / kReferenceK, exponent);
}

}  // namespace homtk::spectra
