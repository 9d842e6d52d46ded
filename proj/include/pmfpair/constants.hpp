#pragma once

#include <cmath>
#include <numbers>

namespace pmfpair {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = std::numbers::pi;

// Unit policy: frequencies are angular (rad/s) and lengths are metres inside
// the library. Wavelengths in nm and delays in fs appear only at API
// boundaries, converted with the helpers below.
inline double wavelength_nm_to_omega(double wavelength_nm) {
  return 2.0 * pi * speed_of_light / (wavelength_nm * 1e-9);
}

inline double omega_to_wavelength_nm(double omega) {
  return 2.0 * pi * speed_of_light / omega * 1e9;
}

inline double fs_to_s(double fs) { return fs * 1e-15; }
inline double s_to_fs(double s) { return s * 1e15; }

}  // namespace pmfpair
