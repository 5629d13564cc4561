#include "neumag/model_operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "neumag/error.hpp"
#include "neumag/tridiagonal.hpp"

namespace neumag::model {

namespace {

const std::string kModule = "model_operators";

template <typename Potential, typename PotentialSlope>
SpectralCurveSample solve_model(double xi, const Discretization& disc, Potential potential,
                                PotentialSlope potential_slope) {
    const double h = disc.step();
    const double inv_h2 = 1.0 / (h * h);

    SpectralCurveSample sample;
    sample.xi = xi;
    SymTridiagonal m;
    if (disc.domain_kind == DomainKind::half_line) {
        const auto n = static_cast<std::size_t>(disc.num_points);
        sample.grid.resize(n);
        for (std::size_t i = 0; i < n; ++i) sample.grid[i] = static_cast<double>(i) * h;
        sample.weights.assign(n, h);
        sample.weights[0] = 0.5 * h;
        m.diag.resize(n);
        m.off.assign(n - 1, -inv_h2);
        for (std::size_t i = 0; i < n; ++i) m.diag[i] = 2.0 * inv_h2 + potential(sample.grid[i]);
        // Ghost point u_{-1} = u_1 gives the row (2u_0 - 2u_1)/h^2; the
        // similarity u_0 = sqrt(2) v_0 makes it symmetric.
        m.off[0] = -std::numbers::sqrt2 * inv_h2;
    } else {
        const auto n = static_cast<std::size_t>(disc.num_points - 1);
        const double t0 = -disc.truncation_radius;
        sample.grid.resize(n);
        for (std::size_t i = 0; i < n; ++i) sample.grid[i] = t0 + static_cast<double>(i + 1) * h;
        sample.weights.assign(n, h);
        m.diag.resize(n);
        m.off.assign(n - 1, -inv_h2);
        for (std::size_t i = 0; i < n; ++i) m.diag[i] = 2.0 * inv_h2 + potential(sample.grid[i]);
    }

    Eigenpair pair = lowest_eigenpair(m);
    if (!std::isfinite(pair.value)) throw NumericalError(kModule, "eigensolver returned a non-finite value");

    // pair.vector has unit Euclidean norm in the symmetrized coordinates,
    // which equals sum w_i u_i^2 / h with the trapezoid weights above.
    double sum = 0.0;
    for (double v : pair.vector) sum += v;
    const double sign = sum < 0.0 ? -1.0 : 1.0;
    const double scale = sign / std::sqrt(h);
    sample.ground_state.resize(pair.vector.size());
    double slope = 0.0;
    for (std::size_t i = 0; i < pair.vector.size(); ++i) {
        slope += pair.vector[i] * pair.vector[i] * potential_slope(sample.grid[i]);
        sample.ground_state[i] = scale * pair.vector[i];
    }
    if (disc.domain_kind == DomainKind::half_line) sample.ground_state[0] *= std::numbers::sqrt2;
    for (double& u : sample.ground_state) u = std::max(u, 0.0);

    sample.mu1 = pair.value;
    sample.slope = slope;
    return sample;
}

CurveValue richardson(const SpectralCurveSample& coarse, const SpectralCurveSample& fine) {
    return {(4.0 * fine.mu1 - coarse.mu1) / 3.0, (4.0 * fine.slope - coarse.slope) / 3.0};
}

void check_isolated(const std::function<double(double)>& curve, double a, double b) {
    constexpr int kProbes = 16;
    std::vector<double> values(kProbes + 1);
    for (int i = 0; i <= kProbes; ++i) values[i] = curve(a + (b - a) * i / kProbes);
    const auto best = std::min_element(values.begin(), values.end()) - values.begin();
    if (best == 0 || best == kProbes) {
        throw NumericalError(kModule, "bracket does not isolate minimum");
    }
    const double noise = 1e-12 * (1.0 + std::abs(values[best]));
    for (long i = 1; i <= best; ++i) {
        if (values[i] > values[i - 1] + noise) throw NumericalError(kModule, "bracket does not isolate minimum");
    }
    for (long i = best + 1; i <= kProbes; ++i) {
        if (values[i] < values[i - 1] - noise) throw NumericalError(kModule, "bracket does not isolate minimum");
    }
}

std::pair<double, double> brent(const std::function<double(double)>& curve, double a, double b, double tol) {
    const int digits = std::min(std::numeric_limits<double>::digits / 2,
                                std::max(8, static_cast<int>(std::ceil(-std::log2(tol)))));
    boost::uintmax_t max_iter = 500;
    auto [x, f] = boost::math::tools::brent_find_minima(curve, a, b, digits, max_iter);
    if (max_iter >= 500) throw NumericalError(kModule, "Brent minimization did not converge");
    return {x, f};
}

}  // namespace

Discretization Discretization::de_gennes(int num_points, double truncation_radius) {
    return {DomainKind::half_line, truncation_radius, num_points, Boundary::neumann, Boundary::dirichlet};
}

Discretization Discretization::montgomery(int num_points, double truncation_radius) {
    return {DomainKind::full_line, truncation_radius, num_points, Boundary::dirichlet, Boundary::dirichlet};
}

double Discretization::step() const {
    const double length = domain_kind == DomainKind::half_line ? truncation_radius : 2.0 * truncation_radius;
    return length / num_points;
}

Discretization Discretization::refined() const {
    Discretization d = *this;
    d.num_points *= 2;
    return d;
}

void Discretization::validate() const {
    if (!(truncation_radius > 0.0)) throw InvalidArgument("discretization: truncation_radius must be positive");
    if (num_points < 3) throw InvalidArgument("discretization: num_points must be at least 3");
    if (boundary_right != Boundary::dirichlet) {
        throw InvalidArgument("discretization: right boundary must be dirichlet");
    }
    if (domain_kind == DomainKind::half_line && boundary_left != Boundary::neumann) {
        throw InvalidArgument("discretization: half_line requires a neumann left boundary");
    }
    if (domain_kind == DomainKind::full_line && boundary_left != Boundary::dirichlet) {
        throw InvalidArgument("discretization: full_line requires dirichlet at both ends");
    }
}

SpectralCurveSample mu1_de_gennes(double xi, const Discretization& disc) {
    disc.validate();
    if (disc.domain_kind != DomainKind::half_line) {
        throw InvalidArgument("mu1_de_gennes: requires a half_line discretization");
    }
    if (disc.truncation_radius < std::abs(xi) + 10.0) {
        throw NumericalError(kModule, "domain truncation unreliable");
    }
    return solve_model(
        xi, disc, [xi](double t) { return (xi - t) * (xi - t); },
        [xi](double t) { return 2.0 * (xi - t); });
}

SpectralCurveSample mu1_montgomery(double xi, const Discretization& disc) {
    disc.validate();
    if (disc.domain_kind != DomainKind::full_line) {
        throw InvalidArgument("mu1_montgomery: requires a full_line discretization");
    }
    if (disc.truncation_radius < std::sqrt(2.0 * std::abs(xi)) + 8.0) {
        throw NumericalError(kModule, "domain truncation unreliable");
    }
    return solve_model(
        xi, disc,
        [xi](double t) {
            const double p = xi - 0.5 * t * t;
            return p * p;
        },
        [xi](double t) { return 2.0 * (xi - 0.5 * t * t); });
}

CurveValue de_gennes_extrapolated(double xi, const Discretization& disc) {
    return richardson(mu1_de_gennes(xi, disc), mu1_de_gennes(xi, disc.refined()));
}

CurveValue montgomery_extrapolated(double xi, const Discretization& disc) {
    return richardson(mu1_montgomery(xi, disc), mu1_montgomery(xi, disc.refined()));
}

CurveMinimum minimize_spectral_curve(const std::function<double(double)>& curve,
                                     std::pair<double, double> bracket, double tol, double fd_step) {
    auto [a, b] = bracket;
    if (!(tol > 0.0) || !(a < b)) throw InvalidArgument("minimize_spectral_curve: invalid bracket or tolerance");
    check_isolated(curve, a, b);

    CurveMinimum result;
    std::tie(result.xi_star, result.mu_star) = brent(curve, a, b, tol);
    const double x = result.xi_star;
    result.second_derivative = (curve(x + fd_step) - 2.0 * result.mu_star + curve(x - fd_step)) / (fd_step * fd_step);
    if (!(result.second_derivative > 0.0)) {
        throw NumericalError(kModule, "bracket does not isolate minimum");
    }
    return result;
}

CurveMinimum minimize_spectral_curve(const std::function<CurveValue(double)>& curve,
                                     std::pair<double, double> bracket, double tol, double fd_step) {
    auto [a, b] = bracket;
    if (!(tol > 0.0) || !(a < b)) throw InvalidArgument("minimize_spectral_curve: invalid bracket or tolerance");
    const std::function<double(double)> value = [&curve](double x) { return curve(x).value; };
    check_isolated(value, a, b);

    auto [x, f] = brent(value, a, b, tol);
    (void)f;

    // The Brent stage resolves the minimizer only to ~sqrt(machine eps); the
    // exact slope pins it down as a root.
    const auto slope = [&curve](double t) { return curve(t).slope; };
    double lo = std::max(a, x - 1e-3);
    double hi = std::min(b, x + 1e-3);
    double slo = slope(lo);
    double shi = slope(hi);
    if (slo > 0.0 || shi < 0.0) {
        lo = a;
        hi = b;
        slo = slope(lo);
        shi = slope(hi);
        if (slo > 0.0 || shi < 0.0) throw NumericalError(kModule, "bracket does not isolate minimum");
    }
    boost::uintmax_t max_iter = 200;
    const auto stop = [tol](double l, double r) { return r - l <= tol; };
    auto root = boost::math::tools::toms748_solve(slope, lo, hi, slo, shi, stop, max_iter);
    x = 0.5 * (root.first + root.second);

    CurveMinimum result;
    result.xi_star = x;
    result.mu_star = curve(x).value;
    result.second_derivative = (slope(x + fd_step) - slope(x - fd_step)) / (2.0 * fd_step);
    if (!(result.second_derivative > 0.0)) {
        throw NumericalError(kModule, "bracket does not isolate minimum");
    }
    return result;
}

void ModelConstants::validate() const {
    if (!(theta0 > 0.0 && theta0 < 1.0)) throw NumericalError(kModule, "theta0 outside (0,1)");
    if (!(xi0 > 0.0)) throw NumericalError(kModule, "xi0 must be positive");
    if (!(alpha0 > 0.0)) throw NumericalError(kModule, "alpha0 must be positive");
    if (!(curv_m2 > 0.0)) throw NumericalError(kModule, "Montgomery minimum is degenerate");
}

ModelConstants model_constants(const Discretization& disc_dg, const Discretization& disc_m, double tol) {
    const auto dg = minimize_spectral_curve(
        std::function<CurveValue(double)>([&](double xi) { return de_gennes_extrapolated(xi, disc_dg); }),
        {0.2, 1.5}, tol);
    const auto mg = minimize_spectral_curve(
        std::function<CurveValue(double)>([&](double xi) { return montgomery_extrapolated(xi, disc_m); }),
        {0.05, 1.0}, tol);

    ModelConstants c;
    c.theta0 = dg.mu_star;
    c.xi0 = dg.xi_star;
    c.alpha0 = 0.5 * dg.second_derivative;
    c.theta0_m2 = mg.mu_star;
    c.xi0_m2 = mg.xi_star;
    c.curv_m2 = mg.second_derivative;
    c.validate();
    return c;
}

double hermite_function(int n, double x) {
    if (n < 0 || n > 50) throw InvalidArgument("hermite_function: order must lie in [0, 50]");
    const double h0 = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
    if (n == 0) return h0;
    double prev = h0;
    double cur = std::numbers::sqrt2 * x * h0;
    for (int k = 1; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace neumag::model
