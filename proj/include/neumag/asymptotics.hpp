#pragma once

#include <string>
#include <vector>

#include "neumag/band.hpp"
#include "neumag/model_operators.hpp"
#include "neumag/surface_geometry.hpp"

namespace neumag::asymptotics {

/// Computable terms of the low-lying eigenvalue expansion. The h^{3/2}
/// coefficient and the n-independent part of the h^{5/3} coefficient have
/// no known formula; they are flagged and never filled in.
struct EigenvaluePrediction {
    int n = 1;
    double h = 0.0;
    double term_h = 0.0;    // Theta0 h
    double term_h43 = 0.0;  // K_min Theta0^[2] h^{4/3}
    bool term_h32_coeff_unknown = true;
    bool term_h53_shift_unknown = true;
    double term_h53 = 0.0;     // (n - 1/2) sqrt(det Hess) h^{5/3}
    double gap_to_next = 0.0;  // sqrt(det Hess) h^{5/3}
    std::string remainder_order = "o(h^{5/3})";

    /// term_h + term_h43 + term_h53, excluding the unknown terms.
    double computable_sum() const { return term_h + term_h43 + term_h53; }
};

/// Throws NumericalError("expansion hypotheses violated") unless beta > 0
/// along the contour and K has a unique non-degenerate minimum.
EigenvaluePrediction predict_eigenvalue(int n, double h, const model::ModelConstants& consts,
                                        const geometry::GammaFrame& frame, const band::BandAnalysis& band);

struct ProfileGrids {
    std::vector<double> t;  // t >= 0
    std::vector<double> r;
    std::vector<double> s;  // absolute arclength values
};

/// Uniform grids spanning the decay of each factor at this h.
ProfileGrids default_profile_grids(int n, double h, const model::ModelConstants& consts,
                                   const geometry::GammaFrame& frame, const band::BandAnalysis& band,
                                   int nt = 64, int nr = 64, int ns = 128);

struct EigenfunctionProfile {
    int n = 1;
    double h = 0.0;
    std::vector<double> t_samples;
    std::vector<double> r_samples;
    std::vector<double> s_samples;
    /// The three factors, each normalized on its grid.
    std::vector<double> u_t;
    std::vector<double> v_r;
    std::vector<double> w_s;
    /// values[(i * nr + j) * ns + k] = u_t[i] v_r[j] w_s[k], normalized.
    std::vector<double> values;

    double r_scale = 0.0;  // alpha0^{1/6} beta^{1/3} / E^{1/3} at s_min
    /// [K'' / (K mu'')]^{1/4}, used for w_n.
    double s_scale = 0.0;
    /// (d_ss b / d_sigma,sigma b)^{1/4} from the band Hessian.
    double s_scale_hessian = 0.0;
    double s_scale_relative_difference = 0.0;
};

/// u_{xi0}(t / h^{1/2}) v(r / h^{1/3}) w_n((s - s_min) / h^{1/6}), with w_n
/// the Hermite function of order n - 1.
EigenfunctionProfile eigenfunction_profile(int n, double h, const model::ModelConstants& consts,
                                           const geometry::GammaFrame& frame, const band::BandAnalysis& band,
                                           const ProfileGrids& grids,
                                           const model::Discretization& disc_dg = model::Discretization::de_gennes(),
                                           const model::Discretization& disc_m = model::Discretization::montgomery());

/// Sign changes of a sampled function, ignoring samples below
/// `floor * max|f|`.
int count_sign_changes(const std::vector<double>& f, double floor = 1e-10);

/// Trapezoid-rule L2 norm of samples on a grid.
double grid_norm(const std::vector<double>& grid, const std::vector<double>& f);

/// Second moment in t of the t-marginal of the profile density.
double t_second_moment(const EigenfunctionProfile& profile);

}  // namespace neumag::asymptotics
