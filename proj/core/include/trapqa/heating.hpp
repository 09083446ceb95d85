#pragma once

// Sideband-ratio thermometry, heating-rate extraction and power-law fits of
// heating rate against axial frequency.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trapqa {

struct SidebandMeasurement {
    double red_excitation = 0.0;   // probability
    double blue_excitation = 0.0;  // probability
    int shots = 1;
    double wait_time = 0.0;  // s
};

void validate(const SidebandMeasurement& m);

struct NbarEstimate {
    double nbar = 0.0;
    double sigma = 0.0;
};

/// nbar = r / (1 - r), r = red / blue. sigma by first-order propagation of the
/// binomial projection noise sqrt(p (1 - p) / shots) on both excitations.
/// Throws DomainError when blue = 0 or r >= 1.
NbarEstimate nbar_from_sidebands(const SidebandMeasurement& m);

/// Parametric bootstrap: resample both excitations binomially and take the
/// standard deviation of nbar over the draws with r < 1.
NbarEstimate nbar_bootstrap(const SidebandMeasurement& m, int draws, std::uint64_t seed);

struct NbarPoint {
    double wait_time = 0.0;  // s
    double nbar = 0.0;
    double sigma = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_sigma = 0.0;
    double intercept_sigma = 0.0;
    double covariance = 0.0;  // cov(slope, intercept)
    double chi2 = 0.0;
    int dof = 0;
};

/// Weighted straight-line fit y = intercept + slope x with weights 1/sigma^2.
/// When every sigma is zero the fit is unweighted and the covariance is
/// scaled by the residual variance. Throws DomainError on fewer than two
/// distinct x values or on a mix of zero and nonzero sigmas.
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);

/// nbar against wait time: slope is the heating rate (quanta/s).
LineFit heating_rate_fit(std::span<const NbarPoint> points);

struct HeatingPoint {
    std::string site;
    double axial_frequency = 0.0;  // rad/s
    double rate = 0.0;             // quanta/s
    double rate_sigma = 0.0;       // quanta/s
};

struct PowerLawFit {
    double amplitude = 0.0;  // rate at omega = 1 rad/s
    double alpha = 0.0;      // rate ~ omega^-alpha
    double alpha_sigma = 0.0;          // from the stated uncertainties
    double alpha_sigma_scaled = 0.0;   // inflated by sqrt(chi2/dof) when chi2/dof > 1
    double chi2 = 0.0;
    int dof = 0;
    int points = 0;
};

/// Weighted least squares of ln(rate) against ln(omega), sigma_ln = sigma / rate.
/// Throws DomainError on fewer than 3 points or a nonpositive rate/frequency.
PowerLawFit power_law_fit(std::span<const HeatingPoint> points);

/// First-order low-pass power response 1 / (1 + (omega / cutoff)^2).
double filtered_noise_shape(double omega, double cutoff);

}  // namespace trapqa
