#pragma once

// All quantities in this project are CGS: erg, dyne, cm, g, s, K, poise.

namespace torsion {

inline constexpr double k_boltzmann = 1.380649e-16;  // erg/K
inline constexpr double g_standard = 980.665;        // cm/s^2
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace torsion
