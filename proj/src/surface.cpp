#include "neumag/surface.hpp"

#include <cmath>

#include "neumag/error.hpp"

namespace neumag::geometry {

Surface Surface::ellipsoid(double a, double b, double c, const Mat3& rotation) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidArgument("ellipsoid semi-axes must be positive");
    if ((rotation.transpose() * rotation - Mat3::Identity()).norm() > 1e-12 || rotation.determinant() < 0.0) {
        throw InvalidArgument("ellipsoid rotation must be a proper orthogonal matrix");
    }
    Surface s;
    s.kind_ = SurfaceKind::ellipsoid;
    s.axes_ = {a, b, c};
    s.rotation_ = rotation;
    const Eigen::Vector3d inv(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
    s.quadric_ = rotation * inv.asDiagonal() * rotation.transpose();
    s.bounding_radius_ = std::max({a, b, c});
    s.length_scale_ = std::min({a, b, c});
    const Vec3 ae3 = s.quadric_.col(2);
    s.z_symmetric_ = (ae3 - ae3.z() * Vec3::UnitZ()).norm() <= 1e-14 * s.quadric_.norm();
    s.name_ = (a == b && b == c) ? "sphere" : "ellipsoid";
    return s;
}

Surface Surface::implicit(std::string name, ScalarField F, VectorField gradient, bool z_symmetric,
                          double bounding_radius, double length_scale) {
    if (!F || !gradient) throw InvalidArgument("implicit surface needs F and its gradient");
    if (!(bounding_radius > 0.0 && length_scale > 0.0)) {
        throw InvalidArgument("implicit surface radii must be positive");
    }
    Surface s;
    s.kind_ = SurfaceKind::implicit;
    s.name_ = std::move(name);
    s.F_ = std::move(F);
    s.grad_ = std::move(gradient);
    s.z_symmetric_ = z_symmetric;
    s.bounding_radius_ = bounding_radius;
    s.length_scale_ = length_scale;
    if (!(s.F_(Vec3::Zero()) < 0.0)) throw InvalidArgument("implicit surface must enclose the origin");
    return s;
}

Surface Surface::egg(double a, double b, double c, double k) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0) || !(std::abs(k) * b < 1.0)) {
        throw InvalidArgument("egg parameters out of range");
    }
    auto F = [=](const Vec3& x) {
        return x.x() * x.x() / (a * a) + x.y() * x.y() / (b * b) + (1.0 + k * x.y()) * x.z() * x.z() / (c * c) - 1.0;
    };
    auto grad = [=](const Vec3& x) {
        return Vec3(2.0 * x.x() / (a * a), 2.0 * x.y() / (b * b) + k * x.z() * x.z() / (c * c),
                    2.0 * (1.0 + k * x.y()) * x.z() / (c * c));
    };
    const double reach = std::max({a, b, c / std::sqrt(1.0 - std::abs(k) * b)});
    return implicit("egg", F, grad, true, 1.5 * reach, std::min({a, b, c}));
}

Surface Surface::preset(const std::string& name) {
    if (name == "sphere") return sphere(1.0);
    if (name == "ellipsoid") return ellipsoid(2.0, 1.0, 1.0);
    if (name == "egg") return egg();
    if (name == "implicit_sphere") {
        return implicit(
            "implicit_sphere", [](const Vec3& x) { return x.squaredNorm() - 1.0; },
            [](const Vec3& x) { return Vec3(2.0 * x); }, true, 1.5, 1.0);
    }
    if (name == "tilted_ellipsoid") {
        const Mat3 rot = Eigen::AngleAxisd(0.4, Vec3(1.0, 2.0, 0.5).normalized()).toRotationMatrix();
        Surface s = ellipsoid(2.0, 1.2, 1.0, rot);
        s.name_ = "tilted_ellipsoid";
        return s;
    }
    throw InvalidArgument("unknown surface preset '" + name + "'");
}

std::array<double, 3> Surface::axes() const {
    if (kind_ != SurfaceKind::ellipsoid) throw InvalidArgument("axes() requires an ellipsoid");
    return axes_;
}

double Surface::value(const Vec3& x) const {
    if (kind_ == SurfaceKind::ellipsoid) return x.dot(quadric_ * x) - 1.0;
    return F_(x);
}

Vec3 Surface::gradient(const Vec3& x) const {
    if (kind_ == SurfaceKind::ellipsoid) return 2.0 * quadric_ * x;
    return grad_(x);
}

Mat3 Surface::hessian(const Vec3& x) const {
    if (kind_ == SurfaceKind::ellipsoid) return 2.0 * quadric_;
    const double d = 1e-4 * length_scale_;
    Mat3 H;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = d;
        H.col(j) = (8.0 * (grad_(x + e) - grad_(x - e)) - (grad_(x + 2.0 * e) - grad_(x - 2.0 * e))) / (12.0 * d);
    }
    return 0.5 * (H + H.transpose());
}

Vec3 Surface::normal(const Vec3& x) const { return gradient(x).normalized(); }

Mat3 Surface::shape_operator(const Vec3& x) const {
    const Vec3 g = gradient(x);
    const double norm = g.norm();
    const Vec3 n = g / norm;
    return (Mat3::Identity() - n * n.transpose()) * hessian(x) / norm;
}

double Surface::weingarten_form(const Vec3& x, const Vec3& u, const Vec3& v) const {
    return (shape_operator(x) * u).dot(v);
}

double Surface::distance_estimate(const Vec3& x) const { return std::abs(value(x)) / gradient(x).norm(); }

Vec3 Surface::project(const Vec3& x) const {
    Vec3 y = x;
    for (int it = 0; it < 8; ++it) {
        const Vec3 g = gradient(y);
        const double f = value(y);
        const Vec3 step = f * g / g.squaredNorm();
        y -= step;
        if (step.norm() <= 1e-16 * length_scale_) break;
    }
    return y;
}

Surface Surface::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidArgument("scale factor must be positive");
    if (kind_ == SurfaceKind::ellipsoid) {
        Surface s = ellipsoid(lambda * axes_[0], lambda * axes_[1], lambda * axes_[2], rotation_);
        s.name_ = name_;
        return s;
    }
    auto F = F_;
    auto grad = grad_;
    return implicit(
        name_, [F, lambda](const Vec3& x) { return F(x / lambda); },
        [grad, lambda](const Vec3& x) { return Vec3(grad(x / lambda) / lambda); }, z_symmetric_,
        lambda * bounding_radius_, lambda * length_scale_);
}

std::optional<Vec3> Surface::contour_plane_normal() const {
    // For a centred quadric, grad F . e3 = 2 (A e3) . x, so the contour is
    // the central section orthogonal to A e3.
    if (kind_ == SurfaceKind::ellipsoid) return Vec3(quadric_.col(2).normalized());
    if (z_symmetric_) return Vec3::UnitZ();
    return std::nullopt;
}

}  // namespace neumag::geometry
