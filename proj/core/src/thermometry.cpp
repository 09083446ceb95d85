#include "trapqa/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "trapqa/errors.hpp"
#include "trapqa/units.hpp"

namespace trapqa {

namespace {

// Beyond this the integrand is below 1e-75 and J5 is at its limit.
constexpr double kIntegralCap = 200.0;

double bg_integrand(double x) {
    if (x < 1e-4) return x * x * x * (1.0 - x * x / 12.0);
    const double d = -std::expm1(-x);
    return std::pow(x, 5) * std::exp(-x) / (d * d);
}

}  // namespace

SensorSpec ts1_sensor() {
    return {"TS1", {70.5 * units::cm, 2.0 * units::um, 1.0 * units::um}, 10.8e3, 0.2e3};
}

SensorSpec ts2_sensor() {
    return {"TS2", {93.5 * units::cm, 1.0 * units::um, 1.0 * units::um}, 32.3e3, 1.6e3};
}

void validate(const RTModel& model) {
    if (!(model.residual_resistance > 0.0)) throw DomainError("residual resistance must be positive");
    if (!(model.amplitude >= 0.0)) throw DomainError("amplitude must be nonnegative");
    if (!(model.debye_temperature > 0.0)) throw DomainError("Debye temperature must be positive");
}

double bloch_gruneisen_integral(double upper) {
    if (!(upper >= 0.0)) throw DomainError("integral upper limit must be nonnegative");
    if (upper == 0.0) return 0.0;
    const double u = std::min(upper, kIntegralCap);
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bg_integrand, 0.0, u, 15,
                                                                           1e-13);
}

double model_resistance(const RTModel& model, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
    const double u = model.debye_temperature / temperature;
    return model.residual_resistance +
           model.amplitude * std::pow(temperature / model.debye_temperature, 5) *
               bloch_gruneisen_integral(u);
}

double model_slope(const RTModel& model, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
    const double theta = model.debye_temperature;
    const double u = theta / temperature;
    const double s = temperature / theta;
    const double tail = u < kIntegralCap ? bg_integrand(u) : 0.0;
    return model.amplitude * (5.0 * std::pow(s, 4) / theta * bloch_gruneisen_integral(u) -
                              std::pow(s, 5) * tail * u / temperature);
}

namespace {

struct Design {
    Eigen::VectorXd t, r;
};

// Residual vector (relative) and Jacobian w.r.t. (R_res, A, Theta).
void evaluate_fit(const Design& d, const Eigen::Vector3d& p, Eigen::VectorXd& res,
                  Eigen::MatrixXd& jac) {
    const Eigen::Index n = d.t.size();
    res.resize(n);
    jac.resize(n, 3);
    const RTModel m{p[0], p[1], p[2]};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = d.t[i];
        const double u = p[2] / t;
        const double s5 = std::pow(t / p[2], 5);
        const double j5 = bloch_gruneisen_integral(u);
        const double tail = u < kIntegralCap ? bg_integrand(u) : 0.0;
        const double w = 1.0 / d.r[i];
        res[i] = (m.residual_resistance + p[1] * s5 * j5 - d.r[i]) * w;
        jac(i, 0) = w;
        jac(i, 1) = s5 * j5 * w;
        jac(i, 2) = p[1] * (-5.0 * s5 / p[2] * j5 + s5 * tail / t) * w;
    }
}

// For fixed Theta the model is linear in (R_res, A): solve it directly.
std::pair<Eigen::Vector3d, double> linear_given_theta(const Design& d, double theta) {
    const Eigen::Index n = d.t.size();
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 1.0 / d.r[i];
        a(i, 0) = w;
        a(i, 1) = std::pow(d.t[i] / theta, 5) * bloch_gruneisen_integral(theta / d.t[i]) * w;
        b[i] = 1.0;
    }
    const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
    return {Eigen::Vector3d(x[0], x[1], theta), (a * x - b).squaredNorm()};
}

}  // namespace

RTFit fit_rt_curve(std::span<const RTSample> samples) {
    if (samples.size() < 5) throw DomainError("R(T) fit needs at least 5 samples");
    Design d;
    d.t.resize(static_cast<Eigen::Index>(samples.size()));
    d.r.resize(d.t.size());
    double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!(s.temperature > 0.0) || !(s.resistance > 0.0)) {
            throw DomainError("R(T) samples need positive temperature and resistance");
        }
        d.t[static_cast<Eigen::Index>(i)] = s.temperature;
        d.r[static_cast<Eigen::Index>(i)] = s.resistance;
        t_min = std::min(t_min, s.temperature);
        t_max = std::max(t_max, s.temperature);
    }
    if (t_max < 4.0 * t_min) {
        throw DomainError("R(T) samples must span low and high temperatures (T_max >= 4 T_min)");
    }

    // Seed Theta by a logarithmic scan of the separable problem.
    Eigen::Vector3d p;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 60; ++k) {
        const double theta = 30.0 * std::pow(100.0, k / 60.0);
        auto [cand, ssr] = linear_given_theta(d, theta);
        if (ssr < best && cand[0] > 0.0 && cand[1] > 0.0) {
            best = ssr;
            p = cand;
        }
    }
    if (!std::isfinite(best)) throw FitError("R(T) fit: no admissible starting point");

    // Levenberg-Marquardt with scaled damping.
    Eigen::VectorXd res;
    Eigen::MatrixXd jac;
    evaluate_fit(d, p, res, jac);
    double cost = res.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    for (; it < 200; ++it) {
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d g = jac.transpose() * res;
        Eigen::Matrix3d a = jtj;
        a.diagonal() += lambda * jtj.diagonal();
        const Eigen::Vector3d step = a.ldlt().solve(-g);
        Eigen::Vector3d trial = p + step;
        if (trial[0] <= 0.0 || trial[1] <= 0.0 || trial[2] <= 0.0) {
            lambda *= 10.0;
            continue;
        }
        Eigen::VectorXd r2;
        Eigen::MatrixXd j2;
        evaluate_fit(d, trial, r2, j2);
        const double c2 = r2.squaredNorm();
        if (c2 < cost) {
            const bool small = step.cwiseAbs().cwiseQuotient(p.cwiseAbs()).maxCoeff() < 1e-12;
            const bool flat = cost - c2 < 1e-15 * (cost + 1e-300);
            p = trial;
            res = std::move(r2);
            jac = std::move(j2);
            cost = c2;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (small || flat || cost < 1e-28) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                converged = true;  // no descent direction left: stationary point
                break;
            }
        }
    }
    if (!converged) {
        throw FitError("R(T) fit did not converge after " + std::to_string(it) +
                       " iterations (relative cost " + std::to_string(cost) + ")");
    }

    RTFit fit;
    fit.model = {p[0], p[1], p[2]};
    fit.iterations = it;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < d.t.size(); ++i) {
        const double r = model_resistance(fit.model, d.t[i]) - d.r[i];
        fit.residuals.push_back(r);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(d.t.size()));
    return fit;
}

double sensitivity(const RTModel& model, double t_lo, double t_hi, int points) {
    if (!(t_hi > t_lo) || !(t_lo > 0.0)) throw DomainError("sensitivity window must satisfy 0 < lo < hi");
    if (points < 2) throw DomainError("sensitivity needs at least two sample points");
    double st = 0.0, sr = 0.0, stt = 0.0, str = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (points - 1);
        const double r = model_resistance(model, t);
        st += t;
        sr += r;
        stt += t * t;
        str += t * r;
    }
    const double n = points;
    return (n * str - st * sr) / (n * stt - st * st);
}

TemperatureEstimate invert_temperature(const RTModel& model, double measured,
                                       double meter_resolution, double t_floor,
                                       double t_ceiling) {
    validate(model);
    if (!(meter_resolution >= 0.0)) throw DomainError("meter resolution must be nonnegative");
    const double r_lo = model_resistance(model, t_floor);
    const double r_hi = model_resistance(model, t_ceiling);
    if (!(measured >= r_lo && measured <= r_hi)) {
        throw RangeError("resistance " + std::to_string(measured) + " Ohm outside model range [" +
                         std::to_string(r_lo) + ", " + std::to_string(r_hi) + "] Ohm");
    }
    auto f = [&](double t) { return model_resistance(model, t) - measured; };
    std::uintmax_t max_iter = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-7; };
    double t;
    if (measured == r_lo) {
        t = t_floor;
    } else if (measured == r_hi) {
        t = t_ceiling;
    } else {
        auto [a, b] = boost::math::tools::toms748_solve(f, t_floor, t_ceiling, r_lo - measured,
                                                        r_hi - measured, tol, max_iter);
        t = 0.5 * (a + b);
    }
    const double slope = model_slope(model, t);
    const double sigma = slope > 0.0 ? meter_resolution / slope
                                     : std::numeric_limits<double>::infinity();
    return {t, sigma};
}

double wafer_spread_projection(double room_std, double room_mean, double cryo_mean) {
    if (!(room_std >= 0.0) || !(room_mean > 0.0) || !(cryo_mean > 0.0)) {
        throw DomainError("spread projection needs std >= 0 and positive means");
    }
    return room_std * cryo_mean / room_mean;
}

RTModel calibrate_rt_model(double r300, double r10, double slope) {
    if (!(r300 > r10) || !(r10 > 0.0) || !(slope > 0.0)) {
        throw DomainError("calibration needs r300 > r10 > 0 and a positive slope");
    }
    // For a given Theta, the two resistance anchors fix R_res and A.
    auto model_for = [&](double theta) {
        const double g300 = std::pow(300.0 / theta, 5) * bloch_gruneisen_integral(theta / 300.0);
        const double g10 = std::pow(10.0 / theta, 5) * bloch_gruneisen_integral(theta / 10.0);
        const double a = (r300 - r10) / (g300 - g10);
        return RTModel{r10 - a * g10, a, theta};
    };
    auto f = [&](double theta) { return sensitivity(model_for(theta), 10.0, 15.0) - slope; };

    // Low-T sensitivity falls as Theta grows; scan for a sign change.
    double prev_t = 50.0, prev_f = f(prev_t);
    for (int k = 1; k <= 80; ++k) {
        const double t = 50.0 * std::pow(40.0, k / 80.0);
        const double ft = f(t);
        if ((prev_f > 0.0) != (ft > 0.0)) {
            std::uintmax_t max_iter = 200;
            auto tol = [](double a, double b) { return std::abs(b - a) < 1e-10 * std::abs(a); };
            auto [a, b] = boost::math::tools::toms748_solve(f, prev_t, t, prev_f, ft, tol, max_iter);
            RTModel m = model_for(0.5 * (a + b));
            if (!(m.residual_resistance > 0.0)) break;
            return m;
        }
        prev_t = t;
        prev_f = ft;
    }
    throw FitError("no Debye temperature reproduces the requested sensitivity");
}

}  // namespace trapqa
