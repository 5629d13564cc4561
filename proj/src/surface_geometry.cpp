#include "neumag/surface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "neumag/error.hpp"

namespace neumag::geometry {

namespace {

const std::string kModule = "surface_geometry";
const Vec3 kE3 = Vec3::UnitZ();

/// Distance from the origin to the surface along the unit direction d.
double radial_root(const Surface& surface, const Vec3& d) {
    const auto f = [&](double rho) { return surface.value(rho * d); };
    double hi = surface.bounding_radius();
    int guard = 0;
    while (!(f(hi) > 0.0)) {
        hi *= 2.0;
        if (++guard > 30) throw NumericalError(kModule, "surface is not bounded along a ray");
    }
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi), tol, iters);
    double rho = 0.5 * (a + b);
    for (int it = 0; it < 2; ++it) {
        const double slope = surface.gradient(rho * d).dot(d);
        if (!(slope > 0.0)) throw NumericalError(kModule, "surface is not star-shaped about the origin");
        rho -= f(rho) / slope;
    }
    return rho;
}

double fourth_order_derivative(double fm2, double fm1, double fp1, double fp2, double step) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
}

Vec3 fourth_order_derivative(const Vec3& fm2, const Vec3& fm1, const Vec3& fp1, const Vec3& fp2, double step) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
}

double wrap_half_turn(double angle) {
    double a = std::remainder(angle, std::numbers::pi);
    if (a <= -0.5 * std::numbers::pi) a += std::numbers::pi;
    return a;
}

struct Ray {
    std::vector<Vec3> x;
    std::vector<Vec3> v;
    double speed_drift = 0.0;
    double surface_distance = 0.0;
    double tangency = 0.0;
};

// Geodesic equation on a level set: x'' = -(v^T Hess F v / |grad F|) n.
Ray integrate_ray(const Surface& surface, const Vec3& x0, const Vec3& v0, double step, int steps) {
    const auto accel = [&](const Vec3& x, const Vec3& v) -> Vec3 {
        const Vec3 g = surface.gradient(x);
        const double norm = g.norm();
        return -(v.dot(surface.hessian(x) * v) / norm) * (g / norm);
    };
    Ray ray;
    ray.x.reserve(steps + 1);
    ray.v.reserve(steps + 1);
    Vec3 x = x0;
    Vec3 v = v0;
    ray.x.push_back(x);
    ray.v.push_back(v);
    for (int k = 0; k < steps; ++k) {
        const Vec3 k1x = v;
        const Vec3 k1v = accel(x, v);
        const Vec3 k2x = v + 0.5 * step * k1v;
        const Vec3 k2v = accel(x + 0.5 * step * k1x, k2x);
        const Vec3 k3x = v + 0.5 * step * k2v;
        const Vec3 k3v = accel(x + 0.5 * step * k2x, k3x);
        const Vec3 k4x = v + step * k3v;
        const Vec3 k4v = accel(x + step * k3x, k4x);
        x += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        x = surface.project(x);
        const Vec3 n = surface.normal(x);
        ray.tangency = std::max(ray.tangency, std::abs(v.dot(n)));
        v -= v.dot(n) * n;

        ray.speed_drift = std::max(ray.speed_drift, std::abs(v.norm() - 1.0));
        ray.surface_distance = std::max(ray.surface_distance, surface.distance_estimate(x));
        ray.x.push_back(x);
        ray.v.push_back(v);
    }
    return ray;
}

// Golub-Welsch nodes and weights of n-point Gauss-Legendre on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = solver.eigenvalues()[i];
        const double v0 = solver.eigenvectors()(0, i);
        weights[i] = 2.0 * v0 * v0;
    }
}

double upper_flux(const Surface& surface, int n_polar, int n_azimuth) {
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre(n_polar, nodes, weights);
    const double half = 0.25 * std::numbers::pi;  // polar angle in [0, pi/2]
    const double dphi = 2.0 * std::numbers::pi / n_azimuth;
    double total = 0.0;
    for (int i = 0; i < n_polar; ++i) {
        const double th = half * (nodes[i] + 1.0);
        double ring = 0.0;
        for (int j = 0; j < n_azimuth; ++j) {
            const double ph = j * dphi;
            const Vec3 d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
            const Vec3 d_th(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
            const Vec3 d_ph(-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0);
            const double rho = radial_root(surface, d);
            const Vec3 g = surface.gradient(rho * d);
            const double gd = g.dot(d);
            const Vec3 x_th = -rho * g.dot(d_th) / gd * d + rho * d_th;
            const Vec3 x_ph = -rho * g.dot(d_ph) / gd * d + rho * d_ph;
            ring += x_th.cross(x_ph).z();
        }
        total += half * weights[i] * ring * dphi;
    }
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------

ContourCurve::ContourCurve(const Surface& surface, const Vec3& plane_normal) : surface_(surface) {
    const Vec3 nu = plane_normal.normalized();
    Vec3 seed = Vec3::UnitX() - Vec3::UnitX().dot(nu) * nu;
    if (seed.norm() < 1e-6) seed = Vec3::UnitY() - Vec3::UnitY().dot(nu) * nu;
    p_ = seed.normalized();
    q_ = nu.cross(p_);

    // Fourier series of the speed |d gamma / d theta|, refined until the
    // total length is stable.
    double previous = -1.0;
    for (int m = 64; m <= 16384; m *= 2) {
        std::vector<double> speed(m);
        for (int j = 0; j < m; ++j) speed[j] = velocity(2.0 * std::numbers::pi * j / m).norm();
        double mean = 0.0;
        for (double v : speed) mean += v;
        mean /= m;
        const double length = 2.0 * std::numbers::pi * mean;
        if (previous > 0.0 && std::abs(length - previous) <= 1e-14 * length) {
            mean_speed_ = mean;
            length_ = length;
            const int kmax = m / 2;
            speed_cos_.assign(kmax, 0.0);
            speed_sin_.assign(kmax, 0.0);
            for (int k = 1; k < kmax; ++k) {
                double c = 0.0;
                double s = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * j) % m) / m;
                    c += speed[j] * std::cos(angle);
                    s += speed[j] * std::sin(angle);
                }
                speed_cos_[k - 1] = 2.0 * c / m;
                speed_sin_[k - 1] = 2.0 * s / m;
            }
            return;
        }
        previous = length;
    }
    throw NumericalError(kModule, "contour arclength quadrature did not converge");
}

void ContourCurve::reverse() {
    q_ = -q_;
    for (double& b : speed_sin_) b = -b;
}

Vec3 ContourCurve::direction(double theta) const { return std::cos(theta) * p_ + std::sin(theta) * q_; }

double ContourCurve::radius(double theta) const { return radial_root(surface_, direction(theta)); }

Vec3 ContourCurve::velocity(double theta) const {
    const Vec3 d = direction(theta);
    const Vec3 dd = -std::sin(theta) * p_ + std::cos(theta) * q_;
    const double rho = radius(theta);
    const Vec3 g = surface_.gradient(rho * d);
    const double drho = -rho * g.dot(dd) / g.dot(d);
    return drho * d + rho * dd;
}

double ContourCurve::arclength(double theta) const {
    double s = mean_speed_ * theta;
    for (std::size_t k = 1; k <= speed_cos_.size(); ++k) {
        const double kd = static_cast<double>(k);
        s += (speed_cos_[k - 1] * std::sin(kd * theta) + speed_sin_[k - 1] * (1.0 - std::cos(kd * theta))) / kd;
    }
    return s;
}

double ContourCurve::angle_of(double s) const {
    double theta = s / mean_speed_;
    for (int it = 0; it < 60; ++it) {
        const double delta = (arclength(theta) - s) / velocity(theta).norm();
        theta -= delta;
        if (std::abs(delta) <= 1e-15 * std::max(1.0, std::abs(theta))) return theta;
    }
    throw NumericalError(kModule, "arclength inversion did not converge");
}

Vec3 ContourCurve::point(double s) const {
    const double theta = angle_of(s);
    return radius(theta) * direction(theta);
}

Vec3 ContourCurve::tangent(double s) const { return velocity(angle_of(s)).normalized(); }

Vec3 ContourCurve::acceleration(double s) const {
    const double d = 2e-3 * length_ / (2.0 * std::numbers::pi);
    return fourth_order_derivative(tangent(s - 2.0 * d), tangent(s - d), tangent(s + d), tangent(s + 2.0 * d), d);
}

// ---------------------------------------------------------------------------

PeriodicInterpolant GammaFrame::interpolant(double GammaSample::*field) const {
    std::vector<double> values(distinct());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = samples[j].*field;
    return PeriodicInterpolant(values, period());
}

GammaFrame extract_gamma(const Surface& surface, int num_samples) {
    if (num_samples < 16) throw InvalidArgument("extract_gamma needs at least 16 samples");
    const auto plane = surface.contour_plane_normal();
    if (!plane) throw NumericalError(kModule, "general Γ tracing unsupported");

    auto curve = std::make_shared<ContourCurve>(surface, *plane);
    // Orientation: n3 must decrease across the contour in the direction of
    // dr_gamma = ds_gamma x n.
    {
        const Vec3 x = curve->point(0.0);
        const Vec3 dr = curve->tangent(0.0).cross(surface.normal(x));
        if ((surface.shape_operator(x) * dr).dot(kE3) > 0.0) curve->reverse();
    }

    GammaFrame frame;
    frame.num_samples = num_samples;
    frame.half_length = 0.5 * curve->length();
    frame.curve = curve;
    frame.surface = surface;
    frame.samples.resize(num_samples);
    const double ds = curve->length() / (num_samples - 1);
    for (int j = 0; j < num_samples; ++j) {
        GammaSample& g = frame.samples[j];
        g.s = j * ds;
        g.gamma = curve->point(g.s);
        g.ds_gamma = curve->tangent(g.s);
        g.normal = surface.normal(g.gamma);
        g.dr_gamma = g.ds_gamma.cross(g.normal);
        g.cos_phi_raw = kE3.dot(g.dr_gamma);
        g.sin_phi_raw = kE3.dot(g.ds_gamma);
        g.phi = wrap_half_turn(std::atan2(g.sin_phi_raw, g.cos_phi_raw));
        if (std::abs(g.normal.z()) > 1e-8) throw NumericalError(kModule, "traced contour is not tangent to the field");
    }
    return frame;
}

// ---------------------------------------------------------------------------

double GeodesicChart::dr_alpha(std::size_t j) const {
    if (zero_index < 2) throw NumericalError(kModule, "stencil underflow: chart needs two r steps each side");
    const auto i = static_cast<std::size_t>(zero_index);
    return fourth_order_derivative(alpha[index(i - 2, j)], alpha[index(i - 1, j)], alpha[index(i + 1, j)],
                                   alpha[index(i + 2, j)], r_step);
}

GeodesicChart geodesic_extend(const Surface& surface, const GammaFrame& frame, double r_max, int steps) {
    if (!frame.curve) throw InvalidArgument("geodesic_extend needs a traced frame");
    if (!(r_max > 0.0) || steps < 1) throw InvalidArgument("geodesic_extend needs r_max > 0 and steps >= 1");

    GeodesicChart chart;
    chart.surface = surface;
    chart.curve = frame.curve;
    chart.r_step = r_max / steps;
    chart.zero_index = steps;
    chart.r_grid.resize(2 * steps + 1);
    for (int i = 0; i <= 2 * steps; ++i) chart.r_grid[i] = (i - steps) * chart.r_step;
    for (const auto& g : frame.samples) chart.s_grid.push_back(g.s);

    const std::size_t nr = chart.nr();
    const std::size_t ns = chart.ns();
    chart.gamma_rs.resize(nr * ns);
    chart.dr_gamma.resize(nr * ns);
    chart.ds_gamma.resize(nr * ns);
    chart.normal.resize(nr * ns);
    chart.alpha.resize(nr * ns);
    chart.b_frame.resize(nr * ns);

    const double delta = 1e-3 * frame.half_length / std::numbers::pi;
    const ContourCurve& curve = *frame.curve;

    for (std::size_t j = 0; j < ns; ++j) {
        // Rays at s + o * delta, o = -2..2, each as a full r-line.
        std::array<std::vector<Vec3>, 5> x;
        std::array<std::vector<Vec3>, 5> v;
        for (int o = -2; o <= 2; ++o) {
            const double s = chart.s_grid[j] + o * delta;
            const Vec3 x0 = curve.point(s);
            const Vec3 v0 = curve.tangent(s).cross(surface.normal(x0));
            const Ray fwd = integrate_ray(surface, x0, v0, chart.r_step, steps);
            const Ray bwd = integrate_ray(surface, x0, v0, -chart.r_step, steps);
            for (const Ray* ray : {&fwd, &bwd}) {
                chart.max_speed_drift = std::max(chart.max_speed_drift, ray->speed_drift);
                chart.max_surface_distance = std::max(chart.max_surface_distance, ray->surface_distance);
                chart.max_tangency = std::max(chart.max_tangency, ray->tangency);
            }
            auto& xs = x[o + 2];
            auto& vs = v[o + 2];
            xs.resize(nr);
            vs.resize(nr);
            for (int k = 0; k <= steps; ++k) {
                xs[steps + k] = fwd.x[k];
                vs[steps + k] = fwd.v[k];
                xs[steps - k] = bwd.x[k];
                vs[steps - k] = bwd.v[k];
            }
        }
        for (std::size_t i = 0; i < nr; ++i) {
            const std::size_t idx = chart.index(i, j);
            const Vec3 dsg = fourth_order_derivative(x[0][i], x[1][i], x[3][i], x[4][i], delta);
            chart.gamma_rs[idx] = x[2][i];
            chart.dr_gamma[idx] = v[2][i];
            chart.ds_gamma[idx] = dsg;
            chart.normal[idx] = surface.normal(x[2][i]);
            chart.alpha[idx] = dsg.squaredNorm();
            chart.b_frame[idx] = Vec3(kE3.dot(v[2][i]), kE3.dot(dsg) / chart.alpha[idx], -kE3.dot(chart.normal[idx]));
        }
    }

    if (chart.max_speed_drift > 1e-9 * std::max(1.0, r_max)) {
        throw NumericalError(kModule, "step count too low for tolerance: measured speed drift " +
                                          std::to_string(chart.max_speed_drift));
    }
    return chart;
}

// ---------------------------------------------------------------------------

void attach_alpha0(GammaFrame& frame, double alpha0) {
    if (!(alpha0 > 0.0)) throw InvalidArgument("alpha0 must be positive");
    if (!frame.has_beta) throw InvalidArgument("attach_alpha0 needs a frame with beta");
    for (auto& g : frame.samples) {
        g.E = alpha0 * g.sin_phi_raw * g.sin_phi_raw + g.cos_phi_raw * g.cos_phi_raw;
        g.K = std::cbrt(alpha0) * std::cbrt(g.beta * g.beta) * std::cbrt(g.E);
    }
    frame.alpha0 = alpha0;
}

GammaFrame gamma_frame(const Surface& surface, int num_samples, std::optional<double> alpha0) {
    GammaFrame frame = extract_gamma(surface, num_samples);
    // A short chart: four steps each side resolve d n3/dr and d alpha/dr.
    const double step = 1e-3 * surface.length_scale();
    const GeodesicChart chart = geodesic_extend(surface, frame, 4.0 * step, 4);
    const auto i = static_cast<std::size_t>(chart.zero_index);
    for (std::size_t j = 0; j < frame.samples.size(); ++j) {
        GammaSample& g = frame.samples[j];
        const double weingarten = -(surface.shape_operator(g.gamma) * g.dr_gamma).dot(kE3);
        const double fd = -fourth_order_derivative(chart.normal[chart.index(i - 2, j)].z(),
                                                   chart.normal[chart.index(i - 1, j)].z(),
                                                   chart.normal[chart.index(i + 1, j)].z(),
                                                   chart.normal[chart.index(i + 2, j)].z(), chart.r_step);
        if (std::abs(fd - weingarten) > 1e-5 * std::max(1.0, std::abs(weingarten))) {
            throw NumericalError(kModule, "geometry inconsistency: beta " + std::to_string(weingarten) +
                                              " (Weingarten) vs " + std::to_string(fd) + " (finite difference)");
        }
        g.beta = weingarten;
        g.kappa_g = -0.5 * chart.dr_alpha(j);
    }
    frame.has_beta = true;
    if (alpha0) attach_alpha0(frame, *alpha0);
    return frame;
}

double frenet_geodesic_curvature(const GammaFrame& frame, double s) {
    if (!frame.curve || !frame.surface) throw InvalidArgument("frame has no curve");
    const Vec3 x = frame.curve->point(s);
    const Vec3 dr = frame.curve->tangent(s).cross(frame.surface->normal(x));
    return frame.curve->acceleration(s).dot(dr);
}

// ---------------------------------------------------------------------------

AssumptionsReport verify_assumptions(const GammaFrame& frame) {
    if (!frame.alpha0) throw InvalidArgument("verify_assumptions needs a frame with E and K");
    AssumptionsReport report;
    const std::size_t m = frame.distinct();
    const double h = frame.spacing();

    report.beta_min = frame.samples[0].beta;
    double k_max = frame.samples[0].K;
    std::size_t j_min = 0;
    for (std::size_t j = 0; j < m; ++j) {
        report.beta_min = std::min(report.beta_min, frame.samples[j].beta);
        k_max = std::max(k_max, frame.samples[j].K);
        if (frame.samples[j].K < frame.samples[j_min].K) j_min = j;
    }
    report.linear_vanishing = report.beta_min > 1e-8;
    const double k_low = frame.samples[j_min].K;
    const double tie = 1e-8 * std::abs(k_low);
    for (std::size_t j = 0; j < m; ++j) {
        if (frame.samples[j].K - k_low <= tie) {
            j_min = j;
            break;
        }
    }

    const auto K = [&](std::size_t j) { return frame.samples[j % m].K; };
    std::vector<double> minima;
    for (std::size_t j = 0; j < m; ++j) {
        const double prev = K(j + m - 1);
        if (K(j) < prev && K(j) <= K(j + 1)) {
            minima.push_back(K(j));
            if (K(j) - k_low <= tie) {
                ++report.num_global_minima;
                report.minima_s.push_back(frame.samples[j].s);
            }
        }
    }
    const bool constant = k_max - k_low <= tie;
    if (constant) report.num_global_minima = static_cast<int>(m);

    double margin = k_max - k_low;
    for (double v : minima) {
        if (v - k_low > tie) margin = std::min(margin, v - k_low);
    }
    if (report.num_global_minima > 1) margin = 0.0;
    report.second_minimum_margin = margin;

    // Refine the minimizer on the trigonometric interpolant of K.
    const PeriodicInterpolant k_interp = frame.interpolant(&GammaSample::K);
    const double s0 = frame.samples[j_min].s;
    double s_min = s0;
    const auto dk = [&](double s) { return k_interp(s, 1); };
    if (!constant && dk(s0 - h) < 0.0 && dk(s0 + h) > 0.0) {
        boost::math::tools::eps_tolerance<double> tol(50);
        std::uintmax_t iters = 100;
        auto [a, b] = boost::math::tools::toms748_solve(dk, s0 - h, s0 + h, tol, iters);
        s_min = 0.5 * (a + b);
    }
    s_min = std::fmod(s_min + frame.period(), frame.period());
    report.s_min = s_min;
    report.K_min = k_interp(s_min);
    report.K_second_derivative = k_interp(s_min, 2);
    const bool nondegenerate = report.K_second_derivative > 1e-6 * std::abs(report.K_min);
    report.K_unique_nondegenerate_min = !constant && report.num_global_minima == 1 && nondegenerate;
    return report;
}

// ---------------------------------------------------------------------------

CancellationTerms cancellation_terms(const GeodesicChart& chart, double s) {
    if (!chart.surface || !chart.curve) throw InvalidArgument("chart has no surface");
    if (chart.zero_index < 2) throw NumericalError(kModule, "stencil underflow: chart needs two r steps each side");
    const Surface& surface = *chart.surface;
    const ContourCurve& curve = *chart.curve;

    std::size_t j = 0;
    for (std::size_t k = 1; k < chart.ns(); ++k) {
        if (std::abs(chart.s_grid[k] - s) < std::abs(chart.s_grid[j] - s)) j = k;
    }
    const auto i0 = static_cast<std::size_t>(chart.zero_index);
    const std::size_t idx0 = chart.index(i0, j);

    CancellationTerms out;
    out.s = chart.s_grid[j];
    out.cos_phi = chart.b_frame[idx0].x();
    out.sin_phi = kE3.dot(chart.ds_gamma[idx0]) / std::sqrt(chart.alpha[idx0]);

    // |g|^{1/2} B2 = <e3, ds_gamma> / sqrt(alpha) on t = 0.
    const auto w2 = [&](std::size_t i) {
        const std::size_t idx = chart.index(i, j);
        return kE3.dot(chart.ds_gamma[idx]) / std::sqrt(chart.alpha[idx]);
    };
    const auto inv_alpha = [&](std::size_t i) { return 1.0 / chart.alpha[chart.index(i, j)]; };
    const double u1 = fourth_order_derivative(w2(i0 - 2), w2(i0 - 1), w2(i0 + 1), w2(i0 + 2), chart.r_step);
    out.dr_inv_alpha =
        fourth_order_derivative(inv_alpha(i0 - 2), inv_alpha(i0 - 1), inv_alpha(i0 + 1), inv_alpha(i0 + 2), chart.r_step);

    // On r = 0 the chart is the unit-speed contour, so W2 = <e3, gamma'(s)>.
    const double ds = 1e-3 * curve.length() / (2.0 * std::numbers::pi);
    const auto w2_curve = [&](double sv) { return kE3.dot(curve.tangent(sv)); };
    const double ds_w2 = fourth_order_derivative(w2_curve(out.s - 2.0 * ds), w2_curve(out.s - ds),
                                                 w2_curve(out.s + ds), w2_curve(out.s + 2.0 * ds), ds);

    // W3 along the normal line through gamma(s), from the tubular map.
    const Mat3 S = surface.shape_operator(chart.gamma_rs[idx0]);
    const Vec3 dr = chart.dr_gamma[idx0];
    const Vec3 dsg = chart.ds_gamma[idx0];
    const Vec3 n = chart.normal[idx0];
    const auto w3 = [&](double t) {
        Mat3 dphi;
        dphi.col(0) = dr - t * (S * dr);
        dphi.col(1) = dsg - t * (S * dsg);
        dphi.col(2) = -n;
        const Vec3 w = std::abs(dphi.determinant()) * dphi.partialPivLu().solve(kE3);
        return w.z();
    };
    const double dt = 1e-4 * surface.length_scale();
    const double dt_w3 = fourth_order_derivative(w3(-2.0 * dt), w3(-dt), w3(dt), w3(2.0 * dt), dt);

    out.u1 = u1;
    out.u2 = ds_w2 + dt_w3;
    out.residual = std::abs(-2.0 * out.u2 * out.cos_phi + 2.0 * out.u1 * out.sin_phi +
                            out.cos_phi * out.cos_phi * out.dr_inv_alpha);
    return out;
}

double cancellation_residual(const GeodesicChart& chart, double s) { return cancellation_terms(chart, s).residual; }

// ---------------------------------------------------------------------------

double mean_circulation(const Surface& surface, int quad_points) {
    if (!surface.z_symmetric()) throw InvalidArgument("mean_circulation requires a z-symmetric surface");
    if (quad_points < 64 * 64) throw InvalidArgument("mean_circulation needs at least 64^2 quadrature points");
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(quad_points))));
    const double coarse = upper_flux(surface, n, n);
    const double fine = upper_flux(surface, n + n / 2, n + n / 2);
    if (std::abs(fine - coarse) > 1e-10 * std::abs(fine)) {
        throw NumericalError(kModule, "flux quadrature did not converge: refinements differ by " +
                                          std::to_string(std::abs(fine - coarse)));
    }
    const ContourCurve contour(surface, Vec3::UnitZ());
    return fine / contour.length();
}

}  // namespace neumag::geometry
