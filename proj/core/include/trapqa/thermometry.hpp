#pragma once

// Metallic meander thermometers: Bloch-Grueneisen R(T), calibration fits,
// sensitivity in a temperature window and inversion with uncertainty.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trapqa/materials.hpp"

namespace trapqa {

struct SensorSpec {
    std::string name;
    TraceGeometry trace;
    double room_temp_mean = 0.0;  // Ohm
    double room_temp_std = 0.0;   // Ohm
};

/// TS1: 2 um x 1 um x 70.5 cm meander, 10.8(2) kOhm at room temperature.
SensorSpec ts1_sensor();
/// TS2: 1 um x 1 um x 93.5 cm meander, 32.3(16) kOhm at room temperature.
SensorSpec ts2_sensor();

/// R(T) = R_res + A (T/Theta)^5 J5(Theta/T).
struct RTModel {
    double residual_resistance = 0.0;  // Ohm
    double amplitude = 0.0;            // Ohm
    double debye_temperature = 0.0;    // K
};

void validate(const RTModel& model);

/// J5(u) = integral_0^u x^5 / ((e^x - 1)(1 - e^-x)) dx, adaptive Gauss-Kronrod.
/// J5(inf) = 120 zeta(5).
double bloch_gruneisen_integral(double upper);

double model_resistance(const RTModel& model, double temperature);
/// Analytic dR/dT.
double model_slope(const RTModel& model, double temperature);

struct RTSample {
    double temperature = 0.0;  // K
    double resistance = 0.0;   // Ohm
};

struct RTFit {
    RTModel model;
    double rms_residual = 0.0;  // Ohm
    int iterations = 0;
    std::vector<double> residuals;  // model - measured, Ohm, in input order
};

/// Least squares on relative residuals (the meters' error is roughly
/// multiplicative). Needs >= 5 samples with T_max / T_min >= 4.
/// Throws DomainError for bad input and FitError when the fit does not converge.
RTFit fit_rt_curve(std::span<const RTSample> samples);

/// Slope (Ohm/K) of a straight-line fit to `points` model samples spread
/// evenly over [t_lo, t_hi].
double sensitivity(const RTModel& model, double t_lo, double t_hi, int points = 11);

struct TemperatureEstimate {
    double temperature = 0.0;  // K
    double sigma = 0.0;        // K
};

/// Root-finds R(T) = measured on [t_floor, t_ceiling]. sigma = resolution / dR/dT.
/// Throws RangeError when `measured` lies outside [R(t_floor), R(t_ceiling)].
TemperatureEstimate invert_temperature(const RTModel& model, double measured,
                                       double meter_resolution, double t_floor = 1.0,
                                       double t_ceiling = 300.0);

/// sigma_cryo = room_std * cryo_mean / room_mean.
double wafer_spread_projection(double room_std, double room_mean, double cryo_mean);

/// Solves for the model that passes through R(300 K) = r300 and R(10 K) = r10 and
/// has `slope` Ohm/K as its 10-15 K sensitivity. Throws FitError if no Debye
/// temperature in [50, 2000] K satisfies the three conditions.
RTModel calibrate_rt_model(double r300, double r10, double slope);

}  // namespace trapqa
