#pragma once

#include <numbers>

// Everything inside the library is SI. Only the file readers accept um / pF / MHz
// style keys, and convert on the way in.
namespace trapqa::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double cm = 1e-2;
inline constexpr double nm = 1e-9;

inline constexpr double pF = 1e-12;
inline constexpr double fF = 1e-15;

inline constexpr double mW = 1e-3;
inline constexpr double mV = 1e-3;
inline constexpr double mA = 1e-3;
inline constexpr double uA = 1e-6;
inline constexpr double nA = 1e-9;
inline constexpr double kOhm = 1e3;
inline constexpr double MOhm = 1e6;

inline constexpr double kHz = 1e3;
inline constexpr double MHz = 1e6;

/// Angular frequency from an ordinary frequency in Hz.
constexpr double angular(double hz) { return two_pi * hz; }

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

}  // namespace trapqa::units
