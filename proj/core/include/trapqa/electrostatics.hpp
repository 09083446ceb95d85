#pragma once

// Planar-electrode electrostatics in the gapless plane approximation: the
// z = 0 plane is a perfect conductor, every electrode is a union of
// axis-aligned rectangles held at its own voltage, and everything else in the
// plane (including the gaps) is grounded. A rectangle at voltage V contributes
// V * Omega / (2 pi), Omega being the solid angle it subtends at the point.
//
// Coordinates: x runs along the trap axis, y is the in-plane radial direction
// and z is the surface normal. Distances are in metres.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "trapqa/materials.hpp"

namespace trapqa {

using Vec3 = Eigen::Vector3d;

enum class ElectrodeRole { Rf, Dc, Compensation, Ground };

std::string_view to_string(ElectrodeRole role);
ElectrodeRole parse_electrode_role(std::string_view text);

struct Rect {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;

    double area() const { return (x2 - x1) * (y2 - y1); }
    bool contains(double x, double y) const { return x > x1 && x < x2 && y > y1 && y < y2; }
};

struct ElectrodeShape {
    std::string id;
    ElectrodeRole role = ElectrodeRole::Dc;
    std::vector<Rect> rects;
};

struct TrapGeometry {
    std::vector<ElectrodeShape> electrodes;
    /// Axial scans run along x at this (y, z).
    double axis_y = 0.0;
    double axis_z = 0.0;

    /// Throws LookupError for an unknown id.
    const ElectrodeShape& electrode(std::string_view id) const;
    bool has_electrode(std::string_view id) const;
};

/// Degenerate rectangles, overlapping electrodes, duplicate ids or a missing
/// RF electrode raise DomainError.
void validate(const TrapGeometry& geometry);

using VoltageMap = std::map<std::string, double, std::less<>>;

struct FieldSample {
    Vec3 point;
    double potential = 0.0;  // V
    Vec3 field;              // V/m
};

/// Potential of one rectangle at `voltage`, z > 0 (DomainError otherwise).
double rect_potential(const Rect& rect, double voltage, const Vec3& point);
/// Analytic E = -grad(phi) of rect_potential.
Vec3 rect_field(const Rect& rect, double voltage, const Vec3& point);

/// Potential / field of one electrode at 1 V with all others grounded.
double basis_potential(const TrapGeometry& geometry, std::string_view electrode_id,
                       const Vec3& point);
Vec3 basis_field(const TrapGeometry& geometry, std::string_view electrode_id,
                 const Vec3& point);

/// Superposition over a voltage set. Ids absent from the map are grounded;
/// ids not in the geometry raise LookupError.
FieldSample evaluate(const TrapGeometry& geometry, const VoltageMap& voltages,
                     const Vec3& point);

/// RF field amplitude: rf_amplitude times the summed basis field of all RF electrodes.
Vec3 rf_field(const TrapGeometry& geometry, const DriveParams& drive, const Vec3& point);

/// Psi = q^2 |E_rf|^2 / (4 m Omega^2), in joules.
double pseudopotential(const TrapGeometry& geometry, const DriveParams& drive,
                       const IonSpecies& ion, const Vec3& point);

/// Transverse (y, z) search region at fixed axial position x.
struct SearchWindow {
    double x = 0.0;
    double y_min = 0.0, y_max = 0.0;
    double z_min = 0.0, z_max = 0.0;
    int grid = 11;                   // seeds per side
    double dedup_radius = 1e-6;      // m
};

struct RfMinimum {
    Vec3 position;
    double height = 0.0;  // z of the minimum
    /// Lowest pseudopotential on the window boundary minus the value at the
    /// minimum (J). A lower bound on the depth within the window.
    double depth = 0.0;
};

/// Multi-start Levenberg-Marquardt descent of |E_rf|^2 from a grid of seeds.
/// Minima that run into the window boundary or are not positive-curvature are
/// dropped. Sorted by y.
std::vector<RfMinimum> find_rf_minima(const TrapGeometry& geometry, const DriveParams& drive,
                                      const IonSpecies& ion, const SearchWindow& window);

struct SecularResult {
    /// Ascending. Negative entries mark anti-confining directions (-sqrt(|k|/m)).
    std::array<double, 3> frequencies{};  // rad/s
    Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns = mode directions
    Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();   // J/m^2
    bool unstable = false;
};

using EnergyFunction = std::function<double(const Vec3&)>;

/// Central-difference Hessian of an energy landscape (J) with one Richardson
/// refinement, then omega_i = sqrt(k_i / m).
SecularResult secular_frequencies(const EnergyFunction& energy, const Vec3& site, double mass,
                                  double step = 10e-9);

/// Total energy Psi + q * Phi_dc around `site`.
SecularResult secular_frequencies(const TrapGeometry& geometry, const DriveParams& drive,
                                  const VoltageMap& dc_voltages, const IonSpecies& ion,
                                  const Vec3& site);

/// E_stray = -sum_i (applied_i - simulated_i) * basis_field(i, point).
/// The two maps must hold the same ids (ConfigError otherwise).
Vec3 stray_field(const VoltageMap& applied, const VoltageMap& simulated,
                 const TrapGeometry& geometry, const Vec3& point);

/// Modulation index of excess micromotion from a residual field:
///   d = q E / (m w_r^2),  q_M = 2 sqrt(2) w_r / Omega,  beta = k * q_M d / 2.
double micromotion_index(double stray_field_magnitude, const DriveParams& drive,
                         const IonSpecies& ion, double radial_frequency,
                         double wavevector_projection);

/// Three RF rails: 245 um outer, 64 um inner, 111 um gaps, `rail_length` long,
/// centred on x = 0. Ids RF1 (y < 0), RF2 (centre), RF3.
TrapGeometry reference_rf_geometry(double rail_length = 10e-3);

/// reference_rf_geometry plus two rows of 35 DC pads (95 x 95 um, 103 um pitch,
/// 8 um gaps) filling the RF gaps, ids DC01..DC70, and three compensation
/// electrodes outside each outer rail, ids CMP1..CMP6. The ion axis sits above
/// the y > 0 RF null.
TrapGeometry reference_trap_geometry();

/// Two RF rails with a grounded centre strip: the canonical single-null layout.
TrapGeometry five_wire_geometry(double rail_width = 200e-6, double centre_gap = 100e-6,
                                double rail_length = 10e-3);

}  // namespace trapqa
