#include "trapqa/electrostatics.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "trapqa/errors.hpp"
#include "trapqa/units.hpp"

namespace trapqa {

namespace {

constexpr double kInv2Pi = 1.0 / units::two_pi;

void require_above_plane(const Vec3& p) {
    if (!(p.z() > 0.0)) {
        throw DomainError("field point must lie above the electrode plane (z > 0)");
    }
}

// Corner term of the rectangle solid angle: atan(xi*eta / (z*r)).
double corner(double xi, double eta, double z) {
    const double r = std::sqrt(xi * xi + eta * eta + z * z);
    return std::atan2(xi * eta, z * r);
}

// Gradient of corner() with respect to (xi, eta, z).
Vec3 corner_gradient(double xi, double eta, double z) {
    const double xi2 = xi * xi, eta2 = eta * eta, z2 = z * z;
    const double r2 = xi2 + eta2 + z2;
    const double r = std::sqrt(r2);
    const double a = xi2 + z2;
    const double b = eta2 + z2;
    return {eta * z / (r * a), xi * z / (r * b), -xi * eta * (r2 + z2) / (r * a * b)};
}

template <class F>
void for_each_corner(const Rect& rect, const Vec3& p, F&& f) {
    const double xs[2] = {rect.x1 - p.x(), rect.x2 - p.x()};
    const double ys[2] = {rect.y1 - p.y(), rect.y2 - p.y()};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double sign = (i == j) ? 1.0 : -1.0;
            f(sign, xs[i], ys[j]);
        }
    }
}

bool overlaps(const Rect& a, const Rect& b) {
    return a.x1 < b.x2 && b.x1 < a.x2 && a.y1 < b.y2 && b.y1 < a.y2;
}

}  // namespace

std::string_view to_string(ElectrodeRole role) {
    switch (role) {
        case ElectrodeRole::Rf: return "RF";
        case ElectrodeRole::Dc: return "DC";
        case ElectrodeRole::Compensation: return "COMPENSATION";
        case ElectrodeRole::Ground: return "GROUND";
    }
    return "?";
}

ElectrodeRole parse_electrode_role(std::string_view text) {
    if (text == "RF") return ElectrodeRole::Rf;
    if (text == "DC") return ElectrodeRole::Dc;
    if (text == "COMPENSATION") return ElectrodeRole::Compensation;
    if (text == "GROUND" || text == "GND") return ElectrodeRole::Ground;
    throw ConfigError("unknown electrode role '" + std::string(text) + "'");
}

const ElectrodeShape& TrapGeometry::electrode(std::string_view id) const {
    for (const auto& e : electrodes) {
        if (e.id == id) return e;
    }
    throw LookupError("unknown electrode '" + std::string(id) + "'");
}

bool TrapGeometry::has_electrode(std::string_view id) const {
    return std::any_of(electrodes.begin(), electrodes.end(),
                       [&](const auto& e) { return e.id == id; });
}

void validate(const TrapGeometry& geometry) {
    std::set<std::string, std::less<>> ids;
    bool has_rf = false;
    for (const auto& e : geometry.electrodes) {
        if (!ids.insert(e.id).second) throw DomainError("duplicate electrode id '" + e.id + "'");
        if (e.rects.empty()) throw DomainError("electrode '" + e.id + "' has no rectangles");
        for (const auto& r : e.rects) {
            if (!(r.x2 > r.x1 && r.y2 > r.y1)) {
                throw DomainError("electrode '" + e.id + "' has a degenerate rectangle");
            }
        }
        has_rf = has_rf || e.role == ElectrodeRole::Rf;
    }
    if (!has_rf) throw DomainError("geometry has no RF electrode");
    for (std::size_t a = 0; a < geometry.electrodes.size(); ++a) {
        for (std::size_t b = a + 1; b < geometry.electrodes.size(); ++b) {
            for (const auto& ra : geometry.electrodes[a].rects) {
                for (const auto& rb : geometry.electrodes[b].rects) {
                    if (overlaps(ra, rb)) {
                        throw DomainError("electrodes '" + geometry.electrodes[a].id + "' and '" +
                                          geometry.electrodes[b].id + "' overlap");
                    }
                }
            }
        }
    }
}

double rect_potential(const Rect& rect, double voltage, const Vec3& point) {
    require_above_plane(point);
    double omega = 0.0;
    for_each_corner(rect, point,
                    [&](double s, double xi, double eta) { omega += s * corner(xi, eta, point.z()); });
    return voltage * omega * kInv2Pi;
}

Vec3 rect_field(const Rect& rect, double voltage, const Vec3& point) {
    require_above_plane(point);
    Vec3 g = Vec3::Zero();
    for_each_corner(rect, point, [&](double s, double xi, double eta) {
        g += s * corner_gradient(xi, eta, point.z());
    });
    // xi = x_k - x and eta = y_k - y flip the sign of the in-plane derivatives.
    return voltage * kInv2Pi * Vec3(g.x(), g.y(), -g.z());
}

double basis_potential(const TrapGeometry& geometry, std::string_view electrode_id,
                       const Vec3& point) {
    double phi = 0.0;
    for (const auto& r : geometry.electrode(electrode_id).rects) phi += rect_potential(r, 1.0, point);
    return phi;
}

Vec3 basis_field(const TrapGeometry& geometry, std::string_view electrode_id, const Vec3& point) {
    Vec3 e = Vec3::Zero();
    for (const auto& r : geometry.electrode(electrode_id).rects) e += rect_field(r, 1.0, point);
    return e;
}

FieldSample evaluate(const TrapGeometry& geometry, const VoltageMap& voltages, const Vec3& point) {
    require_above_plane(point);
    FieldSample s{point, 0.0, Vec3::Zero()};
    for (const auto& [id, v] : voltages) {
        if (v == 0.0) {
            geometry.electrode(id);  // still reject unknown ids
            continue;
        }
        s.potential += v * basis_potential(geometry, id, point);
        s.field += v * basis_field(geometry, id, point);
    }
    return s;
}

Vec3 rf_field(const TrapGeometry& geometry, const DriveParams& drive, const Vec3& point) {
    require_above_plane(point);
    Vec3 e = Vec3::Zero();
    for (const auto& el : geometry.electrodes) {
        if (el.role != ElectrodeRole::Rf) continue;
        for (const auto& r : el.rects) e += rect_field(r, 1.0, point);
    }
    return drive.rf_amplitude * e;
}

double pseudopotential(const TrapGeometry& geometry, const DriveParams& drive,
                       const IonSpecies& ion, const Vec3& point) {
    validate(drive);
    validate(ion);
    const Vec3 e = rf_field(geometry, drive, point);
    const double w = drive.rf_angular_frequency;
    return ion.charge * ion.charge * e.squaredNorm() / (4.0 * ion.mass * w * w);
}

namespace {

struct TransverseProblem {
    const TrapGeometry& geometry;
    const DriveParams& drive;
    double x;

    Vec3 residual(double y, double z) const { return rf_field(geometry, drive, Vec3(x, y, z)); }

    Eigen::Matrix<double, 3, 2> jacobian(double y, double z, double h) const {
        Eigen::Matrix<double, 3, 2> j;
        j.col(0) = (residual(y + h, z) - residual(y - h, z)) / (2.0 * h);
        j.col(1) = (residual(y, z + h) - residual(y, z - h)) / (2.0 * h);
        return j;
    }
};

// Levenberg-Marquardt on the RF field components; returns the converged (y, z).
Eigen::Vector2d descend(const TransverseProblem& problem, Eigen::Vector2d p, double scale,
                        const SearchWindow& w) {
    double lambda = 1e-3;
    Vec3 r = problem.residual(p.x(), p.y());
    double cost = r.squaredNorm();
    const double h = 1e-6 * scale;
    for (int iter = 0; iter < 300; ++iter) {
        const auto j = problem.jacobian(p.x(), p.y(), h);
        const Eigen::Matrix2d jtj = j.transpose() * j;
        const Eigen::Vector2d g = j.transpose() * r;
        bool accepted = false;
        Eigen::Vector2d step = Eigen::Vector2d::Zero();
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::Matrix2d a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            step = -a.ldlt().solve(g);
            // Never jump more than a quarter of the window per iteration.
            const double max_step = 0.25 * std::max(w.y_max - w.y_min, w.z_max - w.z_min);
            if (step.norm() > max_step) step *= max_step / step.norm();
            Eigen::Vector2d trial = p + step;
            trial.y() = std::max(trial.y(), 0.5 * w.z_min);
            const Vec3 rt = problem.residual(trial.x(), trial.y());
            const double ct = rt.squaredNorm();
            if (ct < cost) {
                p = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted || step.norm() < 1e-13 * scale) break;
        if (p.x() < w.y_min - scale || p.x() > w.y_max + scale || p.y() > w.z_max + scale) break;
    }
    return p;
}

}  // namespace

std::vector<RfMinimum> find_rf_minima(const TrapGeometry& geometry, const DriveParams& drive,
                                      const IonSpecies& ion, const SearchWindow& window) {
    validate(drive);
    validate(ion);
    if (!(window.z_min > 0.0) || !(window.z_max > window.z_min) ||
        !(window.y_max > window.y_min) || window.grid < 1) {
        throw DomainError("search window must be non-empty and lie above the plane");
    }
    const TransverseProblem problem{geometry, drive, window.x};
    const double scale = std::max(window.y_max - window.y_min, window.z_max - window.z_min);
    const double margin = 1e-3 * scale;
    auto psi = [&](double y, double z) {
        return pseudopotential(geometry, drive, ion, Vec3(window.x, y, z));
    };

    std::vector<RfMinimum> found;
    const int n = window.grid;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double y0 = window.y_min + (i + 0.5) * (window.y_max - window.y_min) / n;
            const double z0 = window.z_min + (k + 0.5) * (window.z_max - window.z_min) / n;
            const Eigen::Vector2d p = descend(problem, {y0, z0}, scale, window);
            const double y = p.x(), z = p.y();
            if (y < window.y_min + margin || y > window.y_max - margin ||
                z < window.z_min + margin || z > window.z_max - margin) {
                continue;
            }
            // Positive curvature of Psi in (y, z).
            const double hc = 1e-3 * scale;
            const double p0 = psi(y, z);
            const double pyy = psi(y + hc, z) - 2.0 * p0 + psi(y - hc, z);
            const double pzz = psi(y, z + hc) - 2.0 * p0 + psi(y, z - hc);
            const double pyz = 0.25 * (psi(y + hc, z + hc) - psi(y + hc, z - hc) -
                                       psi(y - hc, z + hc) + psi(y - hc, z - hc));
            if (!(pyy > 0.0 && pzz > 0.0 && pyy * pzz - pyz * pyz > 0.0)) continue;

            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const RfMinimum& m) {
                return std::hypot(m.position.y() - y, m.position.z() - z) < window.dedup_radius;
            });
            if (duplicate) continue;
            found.push_back({Vec3(window.x, y, z), z, 0.0});
        }
    }

    // Lowest Psi along the window boundary.
    double boundary = std::numeric_limits<double>::infinity();
    const int nb = 64;
    for (int i = 0; i <= nb; ++i) {
        const double t = static_cast<double>(i) / nb;
        const double y = window.y_min + t * (window.y_max - window.y_min);
        const double z = window.z_min + t * (window.z_max - window.z_min);
        boundary = std::min({boundary, psi(y, window.z_min), psi(y, window.z_max),
                             psi(window.y_min, z), psi(window.y_max, z)});
    }
    for (auto& m : found) m.depth = boundary - psi(m.position.y(), m.position.z());

    std::sort(found.begin(), found.end(),
              [](const RfMinimum& a, const RfMinimum& b) { return a.position.y() < b.position.y(); });
    return found;
}

namespace {

Eigen::Matrix3d hessian_fd(const EnergyFunction& u, const Vec3& site, double h) {
    Eigen::Matrix3d hess;
    const double u0 = u(site);
    for (int a = 0; a < 3; ++a) {
        Vec3 da = Vec3::Zero();
        da[a] = h;
        hess(a, a) = (u(site + da) - 2.0 * u0 + u(site - da)) / (h * h);
        for (int b = a + 1; b < 3; ++b) {
            Vec3 db = Vec3::Zero();
            db[b] = h;
            const double v = (u(site + da + db) - u(site + da - db) - u(site - da + db) +
                              u(site - da - db)) / (4.0 * h * h);
            hess(a, b) = v;
            hess(b, a) = v;
        }
    }
    return hess;
}

}  // namespace

SecularResult secular_frequencies(const EnergyFunction& energy, const Vec3& site, double mass,
                                  double step) {
    if (!(mass > 0.0)) throw DomainError("mass must be positive");
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    const Eigen::Matrix3d coarse = hessian_fd(energy, site, step);
    const Eigen::Matrix3d fine = hessian_fd(energy, site, 0.5 * step);

    SecularResult out;
    out.hessian = (4.0 * fine - coarse) / 3.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(out.hessian);
    for (int i = 0; i < 3; ++i) {
        const double k = eig.eigenvalues()[i];
        out.frequencies[i] = k >= 0.0 ? std::sqrt(k / mass) : -std::sqrt(-k / mass);
        out.unstable = out.unstable || k < 0.0;
    }
    out.axes = eig.eigenvectors();
    return out;
}

SecularResult secular_frequencies(const TrapGeometry& geometry, const DriveParams& drive,
                                  const VoltageMap& dc_voltages, const IonSpecies& ion,
                                  const Vec3& site) {
    validate(ion);
    auto energy = [&](const Vec3& p) {
        double u = pseudopotential(geometry, drive, ion, p);
        for (const auto& [id, v] : dc_voltages) {
            if (v != 0.0) u += ion.charge * v * basis_potential(geometry, id, p);
        }
        return u;
    };
    return secular_frequencies(energy, site, ion.mass);
}

Vec3 stray_field(const VoltageMap& applied, const VoltageMap& simulated,
                 const TrapGeometry& geometry, const Vec3& point) {
    if (applied.size() != simulated.size()) {
        throw ConfigError("applied and simulated voltage sets cover different electrodes");
    }
    Vec3 e = Vec3::Zero();
    for (const auto& [id, va] : applied) {
        auto it = simulated.find(id);
        if (it == simulated.end()) {
            throw ConfigError("electrode '" + id + "' missing from the simulated voltage set");
        }
        const double dv = va - it->second;
        if (dv != 0.0) e -= dv * basis_field(geometry, id, point);
    }
    return e;
}

double micromotion_index(double stray_field_magnitude, const DriveParams& drive,
                         const IonSpecies& ion, double radial_frequency,
                         double wavevector_projection) {
    validate(drive);
    validate(ion);
    if (!(radial_frequency > 0.0)) throw DomainError("radial frequency must be positive");
    const double displacement = std::abs(ion.charge * stray_field_magnitude) /
                                (ion.mass * radial_frequency * radial_frequency);
    const double q_mathieu = 2.0 * std::sqrt(2.0) * radial_frequency / drive.rf_angular_frequency;
    return std::abs(wavevector_projection) * 0.5 * q_mathieu * displacement;
}

TrapGeometry reference_rf_geometry(double rail_length) {
    using units::um;
    const double half = 0.5 * rail_length;
    TrapGeometry g;
    g.electrodes = {
        {"RF1", ElectrodeRole::Rf, {{-half, half, -388.0 * um, -143.0 * um}}},
        {"RF2", ElectrodeRole::Rf, {{-half, half, -32.0 * um, 32.0 * um}}},
        {"RF3", ElectrodeRole::Rf, {{-half, half, 143.0 * um, 388.0 * um}}},
    };
    g.axis_y = 40.75 * um;
    g.axis_z = 125.6 * um;
    return g;
}

TrapGeometry reference_trap_geometry() {
    using units::um;
    TrapGeometry g = reference_rf_geometry();
    constexpr int per_row = 35;
    constexpr double pitch = 103.0 * um;
    constexpr double pad = 95.0 * um;
    char id[8];
    for (int row = 0; row < 2; ++row) {
        const double y1 = row == 0 ? -135.0 * um : 40.0 * um;
        for (int k = 0; k < per_row; ++k) {
            const double xc = (k - per_row / 2) * pitch;
            std::snprintf(id, sizeof id, "DC%02d", row * per_row + k + 1);
            g.electrodes.push_back(
                {id, ElectrodeRole::Dc, {{xc - 0.5 * pad, xc + 0.5 * pad, y1, y1 + pad}}});
        }
    }
    constexpr double cmp_len = 1000.0 * um;
    constexpr double gap = 8.0 * um;
    for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < 3; ++k) {
            const double xc = (k - 1) * (cmp_len + gap);
            const double y1 = side == 0 ? -896.0 * um : 396.0 * um;
            std::snprintf(id, sizeof id, "CMP%d", side * 3 + k + 1);
            g.electrodes.push_back({id, ElectrodeRole::Compensation,
                                    {{xc - 0.5 * cmp_len, xc + 0.5 * cmp_len, y1, y1 + 500.0 * um}}});
        }
    }
    return g;
}

TrapGeometry five_wire_geometry(double rail_width, double centre_gap, double rail_length) {
    const double half = 0.5 * rail_length;
    const double g0 = 0.5 * centre_gap;
    TrapGeometry g;
    g.electrodes = {
        {"RF_A", ElectrodeRole::Rf, {{-half, half, -g0 - rail_width, -g0}}},
        {"RF_B", ElectrodeRole::Rf, {{-half, half, g0, g0 + rail_width}}},
    };
    return g;
}

}  // namespace trapqa
