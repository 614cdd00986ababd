#pragma once

// Unit conventions used throughout the toolkit: identifiers carry their unit
// as a suffix (_ns, _ps, _mhz, _ghz, _k, _hz). Files store times as integer
// picoseconds; internal computation is double precision. See docs/formats.md.

namespace homtk {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double ns_from_ps(double t_ps) { return t_ps * 1e-3; }
inline constexpr double ps_from_ns(double t_ns) { return t_ns * 1e3; }

// h/k_B in s*K, from the exact SI values of h and k_B.
inline constexpr double kPlanckOverBoltzmann_sK = 6.62607015e-34 / 1.380649e-23;

// Phase in radians accumulated by a detuning given in MHz over a delay in ps.
inline constexpr double detuning_phase_rad(double delta_mhz, double tau_ps) {
  return kTwoPi * delta_mhz * tau_ps * 1e-6;
}

}  // namespace homtk
