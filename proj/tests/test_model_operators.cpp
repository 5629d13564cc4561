#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "neumag/error.hpp"
#include "neumag/model_operators.hpp"
#include "neumag/montgomery_table.hpp"
#include "neumag/shooting.hpp"
#include "support.hpp"

using namespace neumag;
using namespace neumag::model;

namespace {

// Lowest eigenvalue of -d^2 + t^4/4 by Rayleigh-Ritz in a Hermite basis.
double quartic_oracle(int basis) {
    const int big = basis + 8;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(big, big);
    Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(big, big);
    for (int n = 0; n < big; ++n) {
        p2(n, n) = n + 0.5;
        if (n + 1 < big) x(n, n + 1) = x(n + 1, n) = std::sqrt((n + 1) / 2.0);
        if (n + 2 < big) p2(n, n + 2) = p2(n + 2, n) = -std::sqrt((n + 1.0) * (n + 2.0)) / 2.0;
    }
    const Eigen::MatrixXd x2 = x * x;
    const Eigen::MatrixXd h = p2 + 0.25 * x2 * x2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(basis, basis), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("discretization invariants") {
    CHECK_NOTHROW(Discretization::de_gennes().validate());
    CHECK_NOTHROW(Discretization::montgomery().validate());
    auto d = Discretization::de_gennes();
    d.num_points = 2;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = Discretization::de_gennes();
    d.truncation_radius = 0.0;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = Discretization::de_gennes();
    d.boundary_left = Boundary::dirichlet;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = Discretization::montgomery();
    d.boundary_left = Boundary::neumann;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    CHECK(Discretization::de_gennes().refined().step() == doctest::Approx(Discretization::de_gennes().step() / 2));
    CHECK(Discretization::montgomery().refined().step() == doctest::Approx(Discretization::montgomery().step() / 2));
}

TEST_CASE("de Gennes at xi = 0 is the even oscillator ground energy") {
    const auto disc = Discretization::de_gennes();
    CHECK(std::abs(mu1_de_gennes(0.0, disc).mu1 - 1.0) < 2e-4);
    CHECK(std::abs(de_gennes_extrapolated(0.0, disc).value - 1.0) < 1e-9);
}

TEST_CASE("de Gennes at xi = -5 is above xi^2") {
    CHECK(mu1_de_gennes(-5.0, Discretization::de_gennes()).mu1 > 25.0);
}

TEST_CASE("de Gennes lower bound for xi <= 0") {
    const auto disc = Discretization::de_gennes(1000);
    for (double xi : {-3.0, -1.5, -0.5, 0.0}) CHECK(mu1_de_gennes(xi, disc).mu1 >= xi * xi);
}

TEST_CASE("ground states are positive and normalized") {
    const auto dg = Discretization::de_gennes(1000);
    const auto mg = Discretization::montgomery(1000);
    for (double xi : {-2.0, 0.0, 0.5, 0.768, 1.5, 3.0}) {
        for (const auto& s : {mu1_de_gennes(xi, dg), mu1_montgomery(xi, mg)}) {
            CHECK(s.mu1 > 0.0);
            double norm = 0.0;
            for (std::size_t i = 0; i < s.grid.size(); ++i) norm += s.weights[i] * s.ground_state[i] * s.ground_state[i];
            CHECK(std::abs(norm - 1.0) < 1e-12);
            CHECK(min_of(s.ground_state) >= 0.0);
        }
    }
}

TEST_CASE("finite differences agree with shooting") {
    const auto disc = Discretization::de_gennes();
    for (double xi : {0.3, 0.768183653130996, 1.2}) {
        CHECK(std::abs(de_gennes_extrapolated(xi, disc).value - mu1_de_gennes_shooting(xi)) < 1e-7);
    }
}

TEST_CASE("Montgomery at xi = 0 matches the quartic oscillator oracle") {
    const double oracle = quartic_oracle(160);
    CHECK(std::abs(oracle - quartic_oracle(120)) < 1e-10);
    CHECK(std::abs(montgomery_extrapolated(0.0, Discretization::montgomery()).value - oracle) < 1e-9);
}

TEST_CASE("refinement changes mu1 at second order") {
    const double xi = 0.4;
    for (bool montgomery : {false, true}) {
        const auto d1 = montgomery ? Discretization::montgomery(500) : Discretization::de_gennes(500);
        const auto f = [&](const Discretization& d) {
            return montgomery ? mu1_montgomery(xi, d).mu1 : mu1_de_gennes(xi, d).mu1;
        };
        const double a = f(d1);
        const double b = f(d1.refined());
        const double c = f(d1.refined().refined());
        CHECK((a - b) / (b - c) == doctest::Approx(4.0).epsilon(0.01));
    }
}

TEST_CASE("truncation too short for xi") {
    auto d = Discretization::de_gennes(400, 12.0);
    CHECK_THROWS_WITH_AS(mu1_de_gennes(3.0, d), "model_operators: domain truncation unreliable", NumericalError);
    auto m = Discretization::montgomery(400, 9.0);
    CHECK_THROWS_AS(mu1_montgomery(2.0, m), NumericalError);
    CHECK_THROWS_AS(mu1_de_gennes(0.0, Discretization::montgomery()), InvalidArgument);
}

TEST_CASE("Feynman-Hellmann slope matches a difference quotient") {
    const auto disc = Discretization::de_gennes(1000);
    const double d = 1e-5;
    const double fd = (mu1_de_gennes(1.1 + d, disc).mu1 - mu1_de_gennes(1.1 - d, disc).mu1) / (2 * d);
    CHECK(std::abs(mu1_de_gennes(1.1, disc).slope - fd) < 1e-7);
}

TEST_CASE("minimizer of a quadratic") {
    const auto m = minimize_spectral_curve([](double x) { return (x - 2) * (x - 2) + 3; }, {0.0, 5.0}, 1e-10);
    CHECK(m.xi_star == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.mu_star == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m.second_derivative == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("bracket that does not isolate a minimum") {
    CHECK_THROWS_WITH_AS(minimize_spectral_curve([](double x) { return x; }, {0.0, 5.0}, 1e-10),
                         "model_operators: bracket does not isolate minimum", NumericalError);
    CHECK_THROWS_AS(minimize_spectral_curve([](double x) { return x * x; }, {1.0, 0.0}, 1e-10), InvalidArgument);
}

TEST_CASE("model constants") {
    const auto c = model_constants();
    const auto f = test_support::frozen_constants();
    CHECK_NOTHROW(c.validate());
    CHECK(c.theta0 > 0.5);
    CHECK(c.theta0 < 0.7);
    CHECK(c.alpha0 > 0.0);
    CHECK(c.curv_m2 > 0.0);
    CHECK(std::abs(c.theta0 - f.theta0) < 1e-9);
    CHECK(std::abs(c.xi0 - f.xi0) < 1e-9);
    CHECK(std::abs(c.alpha0 - f.alpha0) < 1e-8);
    CHECK(std::abs(c.theta0_m2 - f.theta0_m2) < 1e-9);
    CHECK(std::abs(c.xi0_m2 - f.xi0_m2) < 1e-9);
    CHECK(std::abs(c.curv_m2 - f.curv_m2) < 1e-7);
    // stationarity cross-check
    CHECK(std::abs(de_gennes_extrapolated(c.xi0, Discretization::de_gennes()).value - c.xi0 * c.xi0) < 1e-6);
    CHECK(std::abs(c.theta0 - c.xi0 * c.xi0) < 1e-6);
    // mu1 at the minimizers
    CHECK(std::abs(de_gennes_extrapolated(c.xi0, Discretization::de_gennes()).value - c.theta0) < 1e-12);
    CHECK(std::abs(montgomery_extrapolated(c.xi0_m2, Discretization::montgomery()).value - c.theta0_m2) < 1e-12);
}

TEST_CASE("unextrapolated theta0 converges at second order") {
    const auto theta0_at = [](int n) {
        const auto disc = Discretization::de_gennes(n);
        return minimize_spectral_curve(
                   [&](double xi) {
                       const auto s = mu1_de_gennes(xi, disc);
                       return CurveValue{s.mu1, s.slope};
                   },
                   {0.2, 1.5}, 1e-10)
            .mu_star;
    };
    const double t1 = theta0_at(500);
    const double t2 = theta0_at(1000);
    const double t3 = theta0_at(2000);
    CHECK((t1 - t2) / (t2 - t3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("extrapolated constants converge faster than second order") {
    const double t1 = model_constants(Discretization::de_gennes(500), Discretization::montgomery(500)).theta0;
    const double t2 = model_constants(Discretization::de_gennes(1000), Discretization::montgomery(1000)).theta0;
    const double t3 = model_constants(Discretization::de_gennes(2000), Discretization::montgomery(2000)).theta0;
    CHECK(std::abs(t2 - t3) < std::abs(t1 - t2) / 4.0);
}

TEST_CASE("de Gennes curve is convex near its minimum") {
    const auto f = test_support::frozen_constants();
    const auto disc = Discretization::de_gennes();
    const double d = 1e-3;
    for (int k = -2; k <= 2; ++k) {
        const double xi = f.xi0 + 0.05 * k;
        const double second = (de_gennes_extrapolated(xi + d, disc).slope - de_gennes_extrapolated(xi - d, disc).slope) / (2 * d);
        CHECK(second > 0.0);
    }
}

TEST_CASE("model constants validation rejects bad values") {
    auto c = test_support::frozen_constants();
    c.theta0 = 1.2;
    CHECK_THROWS_AS(c.validate(), NumericalError);
    c = test_support::frozen_constants();
    c.alpha0 = -1.0;
    CHECK_THROWS_AS(c.validate(), NumericalError);
}

TEST_CASE("Hermite functions") {
    CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(hermite_function(1, 0.0) == 0.0);
    const double dx = 1e-3;
    double norm3 = 0.0;
    for (int k = -12000; k <= 12000; ++k) norm3 += dx * std::pow(hermite_function(3, k * dx), 2);
    CHECK(std::abs(norm3 - 1.0) < 1e-8);
    for (int m = 0; m <= 5; ++m) {
        for (int n = 0; n <= 5; ++n) {
            double ip = 0.0;
            for (int k = -15000; k <= 15000; ++k) ip += dx * hermite_function(m, k * dx) * hermite_function(n, k * dx);
            CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-7);
        }
    }
    CHECK_THROWS_AS(hermite_function(-1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(hermite_function(51, 0.0), InvalidArgument);
}

TEST_CASE("Montgomery table") {
    const auto table = MontgomeryTable::build(-2.0, 3.0);
    CHECK(table.max_probe_error() < 1e-9);
    CHECK(table.covers(-1.0, 2.0));
    const auto f = test_support::frozen_constants();
    CHECK(std::abs(table.value(f.xi0_m2) - f.theta0_m2) < 1e-9);
    CHECK(std::abs(table.derivative(f.xi0_m2)) < 1e-8);
    CHECK(std::abs(table.second_derivative(f.xi0_m2) - f.curv_m2) < 1e-7);
    for (double xi : {-1.7, 0.1, 2.9}) {
        const double direct = montgomery_extrapolated(xi, montgomery_discretization_for(xi, Discretization::montgomery())).value;
        CHECK(std::abs(table.value(xi) - direct) < 1e-9);
    }
    CHECK_THROWS_AS(table.value(3.5), NumericalError);
    const auto wider = table.extended(-2.0, 4.0);
    CHECK(wider.covers(-2.0, 4.0));
    CHECK(std::abs(wider.value(3.5) - montgomery_extrapolated(3.5, Discretization::montgomery()).value) < 1e-9);
    CHECK_THROWS_AS(MontgomeryTable::build(1.0, 0.0), InvalidArgument);
}
