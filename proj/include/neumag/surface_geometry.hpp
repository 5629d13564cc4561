#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "neumag/periodic.hpp"
#include "neumag/surface.hpp"

namespace neumag::geometry {

/// Arclength parametrization of the planar contour {n . e3 = 0} of a
/// surface. The radius in the contour plane is found by root-finding along
/// rays from the origin; arclength is the Fourier integral of the speed.
class ContourCurve {
public:
    ContourCurve(const Surface& surface, const Vec3& plane_normal);

    double length() const { return length_; }
    /// Reverses the direction of travel; used to fix the orientation.
    void reverse();

    Vec3 point(double s) const;
    /// Unit tangent d gamma / ds.
    Vec3 tangent(double s) const;
    /// d^2 gamma / ds^2 by fourth-order differences of the tangent.
    Vec3 acceleration(double s) const;

private:
    double angle_of(double s) const;
    double radius(double theta) const;
    Vec3 direction(double theta) const;
    Vec3 velocity(double theta) const;  // d gamma / d theta
    double arclength(double theta) const;

    Surface surface_;
    Vec3 p_;
    Vec3 q_;
    double length_ = 0.0;
    double mean_speed_ = 0.0;
    std::vector<double> speed_cos_;
    std::vector<double> speed_sin_;
};

struct GammaSample {
    double s = 0.0;
    Vec3 gamma = Vec3::Zero();
    Vec3 dr_gamma = Vec3::Zero();
    Vec3 ds_gamma = Vec3::Zero();
    Vec3 normal = Vec3::Zero();
    /// Angle of e3 against dr_gamma, reported modulo pi in (-pi/2, pi/2].
    double phi = 0.0;
    /// Raw components <e3, dr_gamma> and <e3, ds_gamma>.
    double cos_phi_raw = 0.0;
    double sin_phi_raw = 0.0;
    double beta = 0.0;
    double kappa_g = 0.0;
    double E = 0.0;
    double K = 0.0;
};

/// Samples along the contour at s_j = j * 2L / (num_samples - 1); the last
/// sample closes the curve and repeats the first.
struct GammaFrame {
    int num_samples = 0;
    double half_length = 0.0;
    std::vector<GammaSample> samples;
    std::shared_ptr<const ContourCurve> curve;
    std::optional<Surface> surface;
    /// Set once E and K have been filled in.
    std::optional<double> alpha0;
    bool has_beta = false;

    double period() const { return 2.0 * half_length; }
    double spacing() const { return period() / (num_samples - 1); }
    /// Samples without the closing duplicate.
    std::size_t distinct() const { return samples.size() - 1; }

    /// Trigonometric interpolants of beta, E, K and phi in s.
    PeriodicInterpolant interpolant(double GammaSample::*field) const;
};

/// Positions, tangents, normals and phi along the contour. Requires a
/// surface whose contour is planar (z-symmetric, or an ellipsoid).
GammaFrame extract_gamma(const Surface& surface, int num_samples);

struct GeodesicChart {
    std::vector<double> r_grid;  // -r_max .. r_max, zero at zero_index
    std::vector<double> s_grid;
    int zero_index = 0;
    double r_step = 0.0;
    /// Node (i, j) with i the r index and j the s index is stored at
    /// j * r_grid.size() + i.
    std::vector<Vec3> gamma_rs;
    std::vector<Vec3> dr_gamma;
    std::vector<Vec3> ds_gamma;
    std::vector<Vec3> normal;
    std::vector<double> alpha;
    /// Components of e3 in the frame (dr_gamma, ds_gamma, -normal).
    std::vector<Vec3> b_frame;

    double max_speed_drift = 0.0;
    double max_surface_distance = 0.0;
    double max_tangency = 0.0;

    std::optional<Surface> surface;
    std::shared_ptr<const ContourCurve> curve;

    std::size_t index(std::size_t i, std::size_t j) const { return j * r_grid.size() + i; }
    std::size_t nr() const { return r_grid.size(); }
    std::size_t ns() const { return s_grid.size(); }

    /// d alpha / dr at r = 0 by a fourth-order stencil.
    double dr_alpha(std::size_t j) const;
};

/// Geodesics normal to the contour, integrated by RK4 with projection onto
/// the surface, on `steps` uniform steps each side of r = 0.
GeodesicChart geodesic_extend(const Surface& surface, const GammaFrame& frame, double r_max, int steps);

/// Full frame: beta (checked against a finite difference of n3 along the
/// transverse geodesic), kappa_g from d alpha / dr, and E, K when alpha0 is
/// given.
GammaFrame gamma_frame(const Surface& surface, int num_samples, std::optional<double> alpha0 = std::nullopt);

/// Fills E and K from phi, beta and alpha0.
void attach_alpha0(GammaFrame& frame, double alpha0);

/// kappa_g = <gamma''(s), dr_gamma>, the in-surface component of the
/// contour's acceleration along dr_gamma. With this sign d alpha/dr = -2 kappa_g.
double frenet_geodesic_curvature(const GammaFrame& frame, double s);

struct AssumptionsReport {
    bool linear_vanishing = false;
    bool K_unique_nondegenerate_min = false;
    double s_min = 0.0;
    double K_min = 0.0;
    double K_second_derivative = 0.0;
    double beta_min = 0.0;
    /// Number of sampled local minima whose K value ties the global one.
    int num_global_minima = 0;
    /// Distance from K_min to the next local minimum, or to max K when there
    /// is no other local minimum.
    double second_minimum_margin = 0.0;
    std::vector<double> minima_s;
};

AssumptionsReport verify_assumptions(const GammaFrame& frame);

struct CancellationTerms {
    double s = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double cos_phi = 0.0;
    double sin_phi = 0.0;
    double dr_inv_alpha = 0.0;
    double residual = 0.0;
};

/// Ingredients of the cancellation identity at the chart sample nearest s.
CancellationTerms cancellation_terms(const GeodesicChart& chart, double s);
double cancellation_residual(const GeodesicChart& chart, double s);

/// Flux of e3 through {n3 > 0} divided by the contour length, with
/// `quad_points` ~ (polar nodes) x (azimuthal nodes).
double mean_circulation(const Surface& surface, int quad_points = 128 * 128);

}  // namespace neumag::geometry
