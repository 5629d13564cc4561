#include "neumag/shooting.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "neumag/error.hpp"

namespace neumag::model {

namespace {

// Prufer angle for u'' = (V - lambda) u with u = R sin(theta), u' = R cos(theta).
double neumann_mismatch(double xi, double lambda, double far_end, double tol) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 1>;
    const auto rhs = [xi, lambda](const State& th, State& dth, double t) {
        const double s = std::sin(th[0]);
        const double c = std::cos(th[0]);
        dth[0] = c * c - ((xi - t) * (xi - t) - lambda) * s * s;
    };
    // Dirichlet at the far end, decaying outward: u = 0, u' < 0.
    State theta{std::numbers::pi};
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_adaptive(stepper, rhs, theta, far_end, 0.0, -1e-3);
    return theta[0] - 0.5 * std::numbers::pi;
}

}  // namespace

double mu1_de_gennes_shooting(double xi, double tol) {
    const double far_end = std::max(xi, 0.0) + 8.0;
    const auto mismatch = [&](double lambda) { return neumann_mismatch(xi, lambda, far_end, tol); };

    // For xi <= 0 the potential is bounded below by xi^2 on the half-line.
    double lo = xi < 0.0 ? xi * xi : 0.0;
    double flo = mismatch(lo);
    if (!(flo > 0.0)) throw NumericalError("shooting", "lower energy bound already past the ground state");
    constexpr double kScanStep = 0.05;
    double hi = lo + kScanStep;
    double fhi = mismatch(hi);
    int scans = 0;
    while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi += kScanStep;
        fhi = mismatch(hi);
        if (++scans > 4000) throw NumericalError("shooting", "no sign change of the Neumann mismatch");
    }

    boost::uintmax_t max_iter = 200;
    const auto stop = [](double a, double b) { return b - a <= 1e-15 * std::max(1.0, std::abs(b)); };
    const auto root = boost::math::tools::toms748_solve(mismatch, lo, hi, flo, fhi, stop, max_iter);
    return 0.5 * (root.first + root.second);
}

}  // namespace neumag::model
