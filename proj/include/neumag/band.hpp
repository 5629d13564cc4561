#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "neumag/model_operators.hpp"
#include "neumag/montgomery_table.hpp"
#include "neumag/surface_geometry.hpp"

namespace neumag::band {

/// A scalar curve with its first two derivatives, and the interval where it
/// may be evaluated.
struct CurveFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> second_derivative;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

CurveFunction montgomery_curve(std::shared_ptr<const model::MontgomeryTable> table);

/// b(s, sigma) = K(s) mu(g(s) sigma), periodic in s.
struct BandSymbol {
    std::function<double(double)> K;
    std::function<double(double)> scale;  // g(s)
    CurveFunction mu;
    double period = 0.0;
    double s_origin = 0.0;
    double xi_star = 0.0;  // minimizer of mu
    double mu_star = 0.0;

    /// Locates the minimizer of mu inside `bracket` as a root of mu'.
    static BandSymbol from_parts(std::function<double(double)> K, std::function<double(double)> scale,
                                 CurveFunction mu, double period, double s_origin,
                                 std::pair<double, double> bracket);

    double operator()(double s, double sigma) const { return K(s) * mu.value(scale(s) * sigma); }
};

/// g(s) = alpha0^{1/3} / (E^{2/3} beta^{1/3}) and K(s) = alpha0^{1/3}
/// beta^{2/3} E^{1/3}, from trigonometric interpolation of beta and E.
BandSymbol make_band_symbol(const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                            std::shared_ptr<const model::MontgomeryTable> table);

double band_value(double s, double sigma, const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                  std::shared_ptr<const model::MontgomeryTable> table);

struct BandAnalysis {
    double s_min = 0.0;
    double sigma_min = 0.0;
    double b_min = 0.0;
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();  // (s, sigma) order
    double det_hess = 0.0;
    double harmonic_gap_coefficient = 0.0;  // sqrt(det_hess)

    // Diagnostics.
    double K_min = 0.0;
    double K_second_derivative = 0.0;
    double mu_second_derivative = 0.0;  // at xi_star
    double scale_at_min = 0.0;
    double scale_derivative_at_min = 0.0;
    /// K g' xi_star mu'': the mixed partial predicted at the minimizer.
    double mixed_term_predicted = 0.0;
    /// Gap from b_min to the next local minimum of s -> min_sigma b on the
    /// sampled torus (0 when the global minimum is attained twice).
    double uniqueness_margin = 0.0;
    bool has_second_minimum = false;
};

/// Nested minimization: sigma in closed form, s by Brent from the lowest
/// sample, then a root polish of dK/ds. Hessian by Richardson-extrapolated
/// central differences.
BandAnalysis minimize_band(const BandSymbol& symbol, int num_scan = 1024);
BandAnalysis minimize_band(const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                           std::shared_ptr<const model::MontgomeryTable> table);

struct ReducedOptions {
    /// Discretize the Weyl form E rho^2 + 2 c s (1 - alpha0) rho p + (alpha0
    /// c^2 + s^2) p^2 directly instead of the completed square.
    bool expand_cross_term = false;
    /// Extra gauge phase chi(r); the link phases gain chi(r_{k+1}) - chi(r_k).
    std::function<double(double)> gauge;
};

/// Lowest eigenvalue of E (D_r + A)^2 + (alpha0/E)(sigma - beta r^2/2)^2 on a
/// truncated r-line, Richardson-extrapolated over (N, 2N). The discretization
/// gives the half-width of the r-interval and N.
double reduced_ground_energy_direct(double s, double sigma, const geometry::GammaFrame& frame,
                                    const model::ModelConstants& consts, const model::Discretization& disc,
                                    const ReducedOptions& options = {});

/// A full-line discretization whose interval covers the well of the reduced
/// operator at (s, sigma) with a wide margin.
model::Discretization reduced_discretization(double s, double sigma, const geometry::GammaFrame& frame,
                                             const model::ModelConstants& consts, int num_points = 4000);

struct QuantizedBand {
    double epsilon = 0.0;
    int num_points = 0;
    Eigen::MatrixXcd matrix;
    std::vector<double> eigenvalues;  // ascending
};

/// Range of mu-arguments g(s) * epsilon * omega touched by quantize_band.
std::pair<double, double> quantization_curve_range(const BandSymbol& symbol, double epsilon, int num_points);

/// Midpoint quantization of the symbol on the periodic grid s_j = s_origin +
/// j * period / N with frequencies omega_m = 2 pi m / period.
QuantizedBand quantize_band(const BandSymbol& symbol, double epsilon, int num_points);

/// b_min + (2n - 1)(epsilon / 2) sqrt(det_hess).
double harmonic_levels(const BandAnalysis& analysis, double epsilon, int n);

}  // namespace neumag::band
