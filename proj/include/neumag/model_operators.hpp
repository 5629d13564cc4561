#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace neumag::model {

enum class DomainKind { half_line, full_line };
enum class Boundary { neumann, dirichlet };

/// Grid and boundary conditions for a 1D Schrodinger eigenproblem.
///
/// Half line: unknowns at t_i = i*h, i = 0..N-1, h = T/N, ghost-point
/// Neumann at t = 0 and Dirichlet at t = T.
/// Full line: unknowns at t_i = -T + i*h, i = 1..N-1, h = 2T/N, Dirichlet
/// at both ends. Doubling N halves h in both cases.
struct Discretization {
    DomainKind domain_kind = DomainKind::half_line;
    double truncation_radius = 20.0;
    int num_points = 4000;
    Boundary boundary_left = Boundary::neumann;
    Boundary boundary_right = Boundary::dirichlet;

    static Discretization de_gennes(int num_points = 4000, double truncation_radius = 20.0);
    static Discretization montgomery(int num_points = 4000, double truncation_radius = 16.0);

    double step() const;
    Discretization refined() const;  // same domain, twice the points
    void validate() const;           // throws InvalidArgument
};

/// Lowest eigenpair of a model operator at one Fourier parameter.
struct SpectralCurveSample {
    double xi = 0.0;
    double mu1 = 0.0;
    /// d(mu1)/d(xi) of the discrete eigenvalue (Feynman-Hellmann).
    double slope = 0.0;
    std::vector<double> grid;
    /// Quadrature weights defining the discrete L2 inner product.
    std::vector<double> weights;
    /// Nonnegative, unit norm in the weighted inner product.
    std::vector<double> ground_state;
};

SpectralCurveSample mu1_de_gennes(double xi, const Discretization& disc);
SpectralCurveSample mu1_montgomery(double xi, const Discretization& disc);

/// Curve value and slope, Richardson-extrapolated over (N, 2N).
struct CurveValue {
    double value = 0.0;
    double slope = 0.0;
};

CurveValue de_gennes_extrapolated(double xi, const Discretization& disc);
CurveValue montgomery_extrapolated(double xi, const Discretization& disc);

struct CurveMinimum {
    double xi_star = 0.0;
    double mu_star = 0.0;
    double second_derivative = 0.0;
};

/// Brent minimization of a scalar curve on a bracket that must isolate a
/// single local minimum; the second derivative is a central difference.
CurveMinimum minimize_spectral_curve(const std::function<double(double)>& curve,
                                     std::pair<double, double> bracket, double tol,
                                     double fd_step = 1e-4);

/// Same, for a curve that also reports its exact slope. After the Brent
/// stage the minimizer is polished as the root of the slope, and the second
/// derivative is a central difference of slopes.
CurveMinimum minimize_spectral_curve(const std::function<CurveValue(double)>& curve,
                                     std::pair<double, double> bracket, double tol,
                                     double fd_step = 1e-4);

struct ModelConstants {
    double theta0 = 0.0;     // min of the de Gennes curve
    double xi0 = 0.0;        // its minimizer
    double alpha0 = 0.0;     // half the curvature there
    double theta0_m2 = 0.0;  // min of the Montgomery curve
    double xi0_m2 = 0.0;
    double curv_m2 = 0.0;    // second derivative of the Montgomery curve at xi0_m2

    void validate() const;  // throws NumericalError when an invariant fails
};

ModelConstants model_constants(const Discretization& disc_dg = Discretization::de_gennes(),
                               const Discretization& disc_m = Discretization::montgomery(),
                               double tol = 1e-10);

/// L2(R)-normalized Hermite function of order n (0-based), 0 <= n <= 50.
double hermite_function(int n, double x);

}  // namespace neumag::model
