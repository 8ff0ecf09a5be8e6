#pragma once

#include <numbers>

namespace orca::phys {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double k_B = 1.380649e-23;        // J/K
inline constexpr double h = 6.62607015e-34;        // J s
inline constexpr double hbar = h / two_pi;
inline constexpr double c = 299792458.0;           // m/s
inline constexpr double eps0 = 8.8541878128e-12;   // F/m
inline constexpr double e_charge = 1.602176634e-19;
inline constexpr double a0 = 5.29177210903e-11;

inline constexpr double MHz_to_rad = two_pi * 1e6;

}  // namespace orca::phys
