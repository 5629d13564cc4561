#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neumag/band.hpp"
#include "neumag/error.hpp"
#include "support.hpp"

using namespace neumag;
using namespace neumag::band;
using test_support::frame_for;
using test_support::frozen_constants;
using test_support::shared_table;

namespace {

CurveFunction quadratic_curve() {
    CurveFunction mu;
    mu.value = [](double x) { return 1.0 + (x - 1.0) * (x - 1.0); };
    mu.derivative = [](double x) { return 2.0 * (x - 1.0); };
    mu.second_derivative = [](double) { return 2.0; };
    return mu;
}

CurveFunction centered_curve() {
    CurveFunction mu;
    mu.value = [](double x) { return 1.0 + x * x; };
    mu.derivative = [](double x) { return 2.0 * x; };
    mu.second_derivative = [](double) { return 2.0; };
    return mu;
}

// (1 + s^2)(1 + (sigma - 1)^2) near the well, periodized in s.
BandSymbol surrogate(double period = 16.0) {
    const double w = period / std::numbers::pi;
    return BandSymbol::from_parts(
        [w](double s) {
            const double v = w * std::sin(s / w);
            return 1.0 + v * v;
        },
        [](double) { return 1.0; }, quadratic_curve(), period, -period / 2, {-5.0, 5.0});
}

const BandSymbol& egg_symbol() {
    static const BandSymbol b = make_band_symbol(frame_for("egg"), frozen_constants(), shared_table());
    return b;
}

const BandAnalysis& egg_analysis() {
    static const BandAnalysis a = minimize_band(egg_symbol());
    return a;
}

// The frame with every transverse curvature multiplied by `factor`.
geometry::GammaFrame with_scaled_beta(const geometry::GammaFrame& fr, double factor) {
    auto out = fr;
    for (auto& g : out.samples) g.beta *= factor;
    geometry::attach_alpha0(out, *fr.alpha0);
    return out;
}

}  // namespace

TEST_CASE("band value at the pointwise minimizer") {
    const auto& fr = frame_for("ellipsoid");
    const auto c = frozen_constants();
    const auto b = make_band_symbol(fr, c, shared_table());
    for (double s : {0.0, 1.0, 2.5, 6.0}) {
        const double sigma = c.xi0_m2 / b.scale(s);
        CHECK(std::abs(b(s, sigma) - b.K(s) * c.theta0_m2) < 1e-9 * b.K(s));
        CHECK(std::abs(band_value(s, sigma, fr, c, shared_table()) - b(s, sigma)) < 1e-14);
        // strict convexity in sigma
        const double d = 1e-2;
        CHECK(b(s, sigma + d) + b(s, sigma - d) - 2.0 * b(s, sigma) > 0.0);
        CHECK(b(s, sigma + d) > b(s, sigma));
        CHECK(b(s, sigma - d) > b(s, sigma));
    }
}

TEST_CASE("band minimum on the reference ellipsoid") {
    const auto& fr = frame_for("ellipsoid");
    const auto c = frozen_constants();
    const auto a = minimize_band(fr, c, shared_table());
    const auto report = geometry::verify_assumptions(fr);
    CHECK(std::abs(a.s_min - report.s_min) < 1e-7);
    CHECK(std::abs(a.b_min - report.K_min * c.theta0_m2) < 1e-8);
    const auto& g = fr.samples[static_cast<std::size_t>(std::lround(a.s_min / fr.spacing()))];
    const double closed = std::cbrt(g.E * g.E) * std::cbrt(g.beta) * c.xi0_m2 / std::cbrt(c.alpha0);
    CHECK(std::abs(a.sigma_min - closed) < 1e-7);
    CHECK(a.hess(0, 0) > 0.0);
    CHECK(a.det_hess > 0.0);
    CHECK(std::abs(a.hess(0, 1)) < 1e-7);
    CHECK(a.uniqueness_margin < 1e-8);
}

TEST_CASE("band minimum on the egg") {
    const auto& a = egg_analysis();
    const auto c = frozen_constants();
    const auto report = geometry::verify_assumptions(frame_for("egg"));
    CHECK(std::abs(a.b_min - report.K_min * c.theta0_m2) < 1e-8);
    CHECK(std::abs(a.s_min - report.s_min) < 1e-7);
    CHECK(std::abs(a.sigma_min - c.xi0_m2 / egg_symbol().scale(a.s_min)) < 1e-7);
    CHECK(a.det_hess > 0.0);
    CHECK(a.uniqueness_margin > 0.0);
    CHECK(a.has_second_minimum);
}

TEST_CASE("mixed Hessian term on the tilted ellipsoid") {
    const auto a = minimize_band(frame_for("tilted_ellipsoid"), frozen_constants(), shared_table());
    CHECK(std::abs(a.mixed_term_predicted) > 1e-4);
    CHECK(std::abs(a.hess(0, 1) - a.mixed_term_predicted) < 1e-6);
    CHECK(std::abs(a.hess(0, 1) - a.hess(1, 0)) < 1e-12);
}

TEST_CASE("quadratic surrogate band") {
    const auto a = minimize_band(surrogate());
    CHECK(std::abs(a.s_min) < 1e-9);
    CHECK(std::abs(a.sigma_min - 1.0) < 1e-9);
    CHECK(std::abs(a.b_min - 1.0) < 1e-12);
    CHECK(std::abs(a.hess(0, 0) - 2.0) < 1e-9);
    CHECK(std::abs(a.hess(1, 1) - 2.0) < 1e-9);
    CHECK(std::abs(a.hess(0, 1)) < 1e-9);
    CHECK(std::abs(a.det_hess - 4.0) < 1e-8);
    // 2D oscillator s^2 + sigma^2 with [sigma, s] = i eps: levels 1 + (2n - 1) eps
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(harmonic_levels(a, 0.1, n) - (1.0 + (2 * n - 1) * 0.1)) < 1e-8);
}

TEST_CASE("degenerate band minimum") {
    const auto flat = BandSymbol::from_parts([](double) { return 1.0; }, [](double) { return 1.0; }, quadratic_curve(),
                                             6.0, 0.0, {-5.0, 5.0});
    CHECK_THROWS_WITH_AS(minimize_band(flat), "reduced_operators: degenerate band minimum", NumericalError);
    CHECK_THROWS_AS(BandSymbol::from_parts([](double) { return 1.0; }, [](double) { return 1.0; }, quadratic_curve(),
                                           6.0, 0.0, {2.0, 5.0}),
                    NumericalError);
}

TEST_CASE("harmonic levels") {
    const auto& a = egg_analysis();
    CHECK(harmonic_levels(a, 0.0, 1) == a.b_min);
    for (int n = 1; n <= 5; ++n) {
        CHECK(std::abs(harmonic_levels(a, 0.02, n + 1) - harmonic_levels(a, 0.02, n) - 0.02 * std::sqrt(a.det_hess)) < 1e-15);
    }
    CHECK_THROWS_AS(harmonic_levels(a, 0.02, 0), InvalidArgument);
}

TEST_CASE("direct reduced operator reproduces the band") {
    const auto& fr = frame_for("ellipsoid");
    const auto c = frozen_constants();
    const auto b = make_band_symbol(fr, c, shared_table());
    for (int i = 0; i < 5; ++i) {
        const double s = fr.period() * (0.05 + 0.19 * i);
        for (int j = 0; j < 5; ++j) {
            const double sigma = c.xi0_m2 / b.scale(s) - 1.0 + 0.5 * j;
            const auto disc = reduced_discretization(s, sigma, fr, c);
            const double direct = reduced_ground_energy_direct(s, sigma, fr, c, disc);
            CHECK(std::abs(direct - b(s, sigma)) / b(s, sigma) < 1e-6);
        }
    }
}

TEST_CASE("direct reduced operator with phi != 0") {
    const auto& fr = frame_for("tilted_ellipsoid");
    const auto c = frozen_constants();
    const auto b = make_band_symbol(fr, c, shared_table());
    for (double s : {0.7, 2.9, 5.3}) {
        const double sigma = c.xi0_m2 / b.scale(s) + 0.4;
        const auto disc = reduced_discretization(s, sigma, fr, c);
        const double peierls = reduced_ground_energy_direct(s, sigma, fr, c, disc);
        ReducedOptions expanded;
        expanded.expand_cross_term = true;
        const double weyl = reduced_ground_energy_direct(s, sigma, fr, c, disc, expanded);
        CHECK(std::abs(peierls - b(s, sigma)) / b(s, sigma) < 1e-6);
        CHECK(std::abs(weyl - b(s, sigma)) / b(s, sigma) < 1e-6);
    }
}

TEST_CASE("gauge invariance") {
    const auto& fr = frame_for("tilted_ellipsoid");
    const auto c = frozen_constants();
    const double s = 1.3;
    const double sigma = 0.5;
    const auto disc = reduced_discretization(s, sigma, fr, c, 2000);
    const double plain = reduced_ground_energy_direct(s, sigma, fr, c, disc);
    ReducedOptions shifted;
    shifted.gauge = [](double) { return 0.731; };
    CHECK(std::abs(reduced_ground_energy_direct(s, sigma, fr, c, disc, shifted) - plain) < 1e-12);
    ReducedOptions varying;
    varying.gauge = [](double r) { return 0.4 * r * r * r - std::sin(r); };
    CHECK(std::abs(reduced_ground_energy_direct(s, sigma, fr, c, disc, varying) - plain) < 1e-9);
}

TEST_CASE("reduced operator at unit beta and E") {
    const auto c = frozen_constants();
    const auto fr = with_scaled_beta(frame_for("sphere"), 1.0);
    const double sigma = c.xi0_m2 / std::cbrt(c.alpha0);
    for (double s : {0.0, 2.0}) {
        const auto disc = reduced_discretization(s, sigma, fr, c);
        CHECK(std::abs(reduced_ground_energy_direct(s, sigma, fr, c, disc) - std::cbrt(c.alpha0) * c.theta0_m2) < 1e-9);
    }
}

TEST_CASE("beta rescaling") {
    const auto c = frozen_constants();
    const auto& fr = frame_for("egg");
    const double lambda = 1.3;
    const auto scaled = with_scaled_beta(fr, lambda * lambda * lambda);
    const double s = 4.0;
    const double sigma = 0.6;
    const double e1 = reduced_ground_energy_direct(s, sigma, fr, c, reduced_discretization(s, sigma, fr, c));
    const double e2 = reduced_ground_energy_direct(s, lambda * sigma, scaled, c,
                                                   reduced_discretization(s, lambda * sigma, scaled, c));
    CHECK(std::abs(e2 / e1 - lambda * lambda) < 1e-8);
}

TEST_CASE("reduced operator truncation") {
    const auto c = frozen_constants();
    const auto& fr = frame_for("ellipsoid");
    auto disc = reduced_discretization(1.0, 0.5, fr, c, 800);
    disc.truncation_radius = 1.5;
    CHECK_THROWS_WITH_AS(reduced_ground_energy_direct(1.0, 0.5, fr, c, disc), doctest::Contains("truncation insufficient"),
                         NumericalError);
    CHECK_THROWS_AS(reduced_ground_energy_direct(1.0, 0.5, fr, c, model::Discretization::de_gennes()), InvalidArgument);
}

TEST_CASE("constant symbol quantizes to a multiple of identity") {
    const auto b = BandSymbol::from_parts([](double) { return 1.5; }, [](double) { return 0.0; }, quadratic_curve(), 5.0,
                                          0.0, {-5.0, 5.0});
    const auto q = quantize_band(b, 0.05, 128);
    for (double v : q.eigenvalues) CHECK(std::abs(v - 3.0) < 1e-12);
}

TEST_CASE("quantized harmonic oscillator") {
    // (1 + s^2)(1 + sigma^2) near the well
    const double w = 8.0 / std::numbers::pi;
    const auto b = BandSymbol::from_parts(
        [w](double s) {
            const double v = w * std::sin(s / w);
            return 1.0 + v * v;
        },
        [](double) { return 1.0; }, centered_curve(), 8.0, -4.0, {-5.0, 5.0});
    std::array<double, 4> err_prev{};
    for (double eps : {0.04, 0.02, 0.01}) {
        const auto q = quantize_band(b, eps, 512);
        for (int n = 1; n <= 4; ++n) {
            const double err = std::abs(q.eigenvalues[n - 1] - 1.0 - (2 * n - 1) * eps);
            CHECK(err < 4.0 * n * n * eps * eps);
            if (eps < 0.04) CHECK(err_prev[n - 1] / err == doctest::Approx(4.0).epsilon(0.15));
            err_prev[n - 1] = err;
        }
    }
}

TEST_CASE("quantized band matrix structure") {
    const auto q = quantize_band(egg_symbol(), 0.02, 256);
    CHECK((q.matrix - q.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::is_sorted(q.eigenvalues.begin(), q.eigenvalues.end()));
    CHECK(q.eigenvalues.size() == 256);
    CHECK(q.eigenvalues.front() > egg_analysis().b_min);
}

TEST_CASE("quantized band converges to harmonic levels") {
    const auto& a = egg_analysis();
    std::array<double, 4> defect_prev{};
    std::vector<double> last;
    for (double eps : {0.04, 0.02, 0.01}) {
        last = quantize_band(egg_symbol(), eps, 512).eigenvalues;
        for (int n = 1; n <= 4; ++n) {
            const double target = (2 * n - 1) * std::sqrt(a.det_hess) / 2;
            const double defect = std::abs((last[n - 1] - a.b_min) / eps - target);
            if (eps < 0.04) {
                const double ratio = defect_prev[n - 1] / defect;
                CHECK(ratio >= 1.7);
                CHECK(ratio <= 2.3);
            }
            defect_prev[n - 1] = defect;
        }
    }
    for (int n = 1; n <= 3; ++n) {
        CHECK(std::abs((last[n] - last[n - 1]) / (0.01 * std::sqrt(a.det_hess)) - 1.0) < 0.05);
    }
}

TEST_CASE("quantized band on the two-well ellipsoid") {
    const auto& fr = frame_for("ellipsoid");
    const auto b = make_band_symbol(fr, frozen_constants(), shared_table());
    const auto a = minimize_band(b);
    double err_prev = 0.0;
    for (double eps : {0.02, 0.01}) {
        const auto q = quantize_band(b, eps, 512);
        const double target = harmonic_levels(a, eps, 1) - a.b_min;
        const double err = std::abs(q.eigenvalues[0] - a.b_min - target) / target;
        CHECK(err < 0.1);
        if (eps < 0.02) CHECK(err_prev / err == doctest::Approx(2.0).epsilon(0.15));
        err_prev = err;
    }
}

TEST_CASE("quantization input checks") {
    const auto b = surrogate();
    CHECK_THROWS_AS(quantize_band(b, 0.0, 256), InvalidArgument);
    CHECK_THROWS_AS(quantize_band(b, 0.5, 256), InvalidArgument);
    CHECK_THROWS_AS(quantize_band(b, 0.02, 200), InvalidArgument);
    const auto narrow = std::make_shared<const model::MontgomeryTable>(model::MontgomeryTable::build(-1.0, 2.0));
    const auto egg_narrow = make_band_symbol(frame_for("egg"), frozen_constants(), narrow);
    CHECK_THROWS_WITH_AS(quantize_band(egg_narrow, 0.04, 512), doctest::Contains("band table range exceeded"),
                         NumericalError);
    const auto [lo, hi] = quantization_curve_range(egg_symbol(), 0.04, 512);
    CHECK(lo < -1.0);
    CHECK(hi > 2.0);
    CHECK(shared_table()->covers(lo, hi));
}
