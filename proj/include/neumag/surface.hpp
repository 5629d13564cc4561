#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace neumag::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class SurfaceKind { ellipsoid, implicit };

/// Boundary surface {F = 0} of a bounded domain {F < 0}, star-shaped with
/// respect to the origin. Ellipsoids carry analytic derivatives; implicit
/// surfaces supply F and its gradient, and the Hessian is taken by
/// fourth-order central differences of the gradient.
class Surface {
public:
    using ScalarField = std::function<double(const Vec3&)>;
    using VectorField = std::function<Vec3(const Vec3&)>;

    /// x^2/a^2 + y^2/b^2 + z^2/c^2 = 1, rotated by `rotation` (the surface is
    /// rotation * aligned ellipsoid).
    static Surface ellipsoid(double a, double b, double c, const Mat3& rotation = Mat3::Identity());
    static Surface sphere(double radius = 1.0) { return ellipsoid(radius, radius, radius); }

    /// `bounding_radius` bounds the surface; `length_scale` sets the
    /// finite-difference step of the Hessian (1e-4 * length_scale).
    static Surface implicit(std::string name, ScalarField F, VectorField gradient, bool z_symmetric,
                            double bounding_radius, double length_scale = 1.0);

    /// Built-in surfaces: "sphere", "ellipsoid" (2,1,1), "implicit_sphere",
    /// "egg", "tilted_ellipsoid". Throws InvalidArgument for unknown names.
    static Surface preset(const std::string& name);

    /// x^2/a^2 + y^2/b^2 + (1 + k y) z^2/c^2 = 1.
    static Surface egg(double a = 2.0, double b = 1.0, double c = 1.0, double k = 0.2);

    SurfaceKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool z_symmetric() const { return z_symmetric_; }
    double bounding_radius() const { return bounding_radius_; }
    double length_scale() const { return length_scale_; }
    /// Semi-axes before rotation; ellipsoids only.
    std::array<double, 3> axes() const;
    const Mat3& rotation() const { return rotation_; }

    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    Mat3 hessian(const Vec3& x) const;

    /// Outward unit normal.
    Vec3 normal(const Vec3& x) const;
    /// Differential of the Gauss map, (I - n n^T) Hess F / |grad F|, as a
    /// 3x3 matrix; on tangent vectors it is the shape operator.
    Mat3 shape_operator(const Vec3& x) const;
    /// Second fundamental form <dn(u), v>.
    double weingarten_form(const Vec3& x, const Vec3& u, const Vec3& v) const;

    /// First-order distance estimate |F| / |grad F|.
    double distance_estimate(const Vec3& x) const;
    /// Newton projection onto the surface along the gradient.
    Vec3 project(const Vec3& x) const;

    /// The surface dilated by lambda about the origin.
    Surface scaled(double lambda) const;

    /// Unit normal of the plane through the origin containing the contour
    /// {n . e3 = 0}, when that contour is known to be planar.
    std::optional<Vec3> contour_plane_normal() const;

private:
    SurfaceKind kind_ = SurfaceKind::ellipsoid;
    std::string name_;
    bool z_symmetric_ = true;
    double bounding_radius_ = 1.0;
    double length_scale_ = 1.0;
    std::array<double, 3> axes_{1.0, 1.0, 1.0};
    Mat3 rotation_ = Mat3::Identity();
    Mat3 quadric_ = Mat3::Identity();  // ellipsoid: F = x^T A x - 1
    ScalarField F_;
    VectorField grad_;
};

}  // namespace neumag::geometry
