#include "trapqa/heating.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trapqa/errors.hpp"
#include "trapqa/random.hpp"

namespace trapqa {

void validate(const SidebandMeasurement& m) {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(m.red_excitation) || !prob(m.blue_excitation)) {
        throw DomainError("sideband excitations must lie in [0, 1]");
    }
    if (m.shots < 1) throw DomainError("sideband measurement needs at least one shot");
}

NbarEstimate nbar_from_sidebands(const SidebandMeasurement& m) {
    validate(m);
    if (!(m.blue_excitation > 0.0)) throw DomainError("blue sideband excitation is zero");
    const double r = m.red_excitation / m.blue_excitation;
    if (!(r < 1.0)) throw DomainError("sideband ratio r >= 1: not a thermal state");
    const double n = static_cast<double>(m.shots);
    const double var_red = m.red_excitation * (1.0 - m.red_excitation) / n;
    const double var_blue = m.blue_excitation * (1.0 - m.blue_excitation) / n;
    // d nbar / d r = 1 / (1 - r)^2; dr/dred = 1/blue, dr/dblue = -r/blue.
    const double dn_dr = 1.0 / ((1.0 - r) * (1.0 - r));
    const double var_r = var_red / (m.blue_excitation * m.blue_excitation) +
                         r * r * var_blue / (m.blue_excitation * m.blue_excitation);
    return {r / (1.0 - r), dn_dr * std::sqrt(var_r)};
}

NbarEstimate nbar_bootstrap(const SidebandMeasurement& m, int draws, std::uint64_t seed) {
    const NbarEstimate point = nbar_from_sidebands(m);
    if (draws < 2) throw DomainError("bootstrap needs at least two draws");
    SplitMix64 rng(seed);
    std::binomial_distribution<int> red(m.shots, m.red_excitation);
    std::binomial_distribution<int> blue(m.shots, m.blue_excitation);
    double sum = 0.0, sum2 = 0.0;
    int kept = 0;
    for (int i = 0; i < draws; ++i) {
        const int kr = red(rng);
        const int kb = blue(rng);
        if (kb == 0 || kr >= kb) continue;
        const double r = static_cast<double>(kr) / kb;
        const double nb = r / (1.0 - r);
        sum += nb;
        sum2 += nb * nb;
        ++kept;
    }
    if (kept < 2) throw DomainError("bootstrap: too few draws with r < 1");
    const double mean = sum / kept;
    return {point.nbar, std::sqrt(std::max(0.0, (sum2 - kept * mean * mean) / (kept - 1)))};
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
    const std::size_t n = x.size();
    if (y.size() != n || sigma.size() != n) throw DomainError("line fit: input size mismatch");
    const auto zero = static_cast<std::size_t>(std::count(sigma.begin(), sigma.end(), 0.0));
    for (double s : sigma) {
        if (!(s >= 0.0)) throw DomainError("line fit: uncertainties must be nonnegative");
    }
    if (zero != 0 && zero != n) {
        throw DomainError("line fit: either all or none of the uncertainties may be zero");
    }
    const bool weighted = zero == 0;

    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        s += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double xm = sx / s;
    const double ym = sy / s;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        sxx += w * (x[i] - xm) * (x[i] - xm);
        sxy += w * (x[i] - xm) * (y[i] - ym);
    }
    const bool distinct = std::any_of(x.begin(), x.end(), [&](double v) { return v != x.front(); });
    if (n < 2 || !distinct || !(sxx > 0.0)) throw DomainError("line fit needs at least two distinct x values");

    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    f.dof = static_cast<int>(n) - 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        const double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        f.chi2 += w * r * r;
    }
    // Centred-coordinate covariance, mapped back to (intercept, slope).
    double var_slope = 1.0 / sxx;
    double var_mean = 1.0 / s;
    if (!weighted) {
        const double scale = f.dof > 0 ? f.chi2 / f.dof : 0.0;
        var_slope *= scale;
        var_mean *= scale;
    }
    f.slope_sigma = std::sqrt(var_slope);
    f.intercept_sigma = std::sqrt(var_mean + xm * xm * var_slope);
    f.covariance = -xm * var_slope;
    return f;
}

LineFit heating_rate_fit(std::span<const NbarPoint> points) {
    std::vector<double> x, y, s;
    for (const auto& p : points) {
        if (!(p.wait_time >= 0.0)) throw DomainError("wait time must be nonnegative");
        x.push_back(p.wait_time);
        y.push_back(p.nbar);
        s.push_back(p.sigma);
    }
    return weighted_line_fit(x, y, s);
}

PowerLawFit power_law_fit(std::span<const HeatingPoint> points) {
    if (points.size() < 3) throw DomainError("power-law fit needs at least 3 points");
    std::vector<double> x, y, s;
    for (const auto& p : points) {
        if (!(p.rate > 0.0)) throw DomainError("heating rate must be positive at site '" + p.site + "'");
        if (!(p.axial_frequency > 0.0)) throw DomainError("axial frequency must be positive");
        if (!(p.rate_sigma >= 0.0)) throw DomainError("rate uncertainty must be nonnegative");
        x.push_back(std::log(p.axial_frequency));
        y.push_back(std::log(p.rate));
        s.push_back(p.rate_sigma / p.rate);
    }
    const LineFit line = weighted_line_fit(x, y, s);
    PowerLawFit f;
    f.alpha = -line.slope;
    f.amplitude = std::exp(line.intercept);
    f.alpha_sigma = line.slope_sigma;
    f.chi2 = line.chi2;
    f.dof = line.dof;
    f.points = static_cast<int>(points.size());
    const double red = f.dof > 0 ? f.chi2 / f.dof : 0.0;
    const bool weighted = s.front() > 0.0;
    f.alpha_sigma_scaled = weighted && red > 1.0 ? f.alpha_sigma * std::sqrt(red) : f.alpha_sigma;
    return f;
}

double filtered_noise_shape(double omega, double cutoff) {
    if (!(omega >= 0.0) || !(cutoff > 0.0)) throw DomainError("filter shape needs omega >= 0, cutoff > 0");
    const double u = omega / cutoff;
    return 1.0 / (1.0 + u * u);
}

}  // namespace trapqa
