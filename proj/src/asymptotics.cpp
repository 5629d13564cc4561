#include "neumag/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "neumag/error.hpp"

namespace neumag::asymptotics {

namespace {

const std::string kModule = "asymptotics";

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += d;
        w[i + 1] += d;
    }
    return w;
}

void normalize(const std::vector<double>& grid, std::vector<double>& f) {
    const double norm = grid_norm(grid, f);
    if (!(norm > 0.0)) throw NumericalError(kModule, "profile factor vanishes on its grid");
    for (double& v : f) v /= norm;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    return x;
}

struct ScaleData {
    double r_scale = 0.0;
    double s_scale = 0.0;
    double s_scale_hessian = 0.0;
};

ScaleData scales(const model::ModelConstants& consts, const geometry::GammaFrame& frame,
                 const band::BandAnalysis& band) {
    if (!frame.alpha0) throw InvalidArgument("profile needs a frame with E and K");
    const double beta = frame.interpolant(&geometry::GammaSample::beta)(band.s_min);
    const double E = frame.interpolant(&geometry::GammaSample::E)(band.s_min);
    ScaleData d;
    d.r_scale = std::pow(consts.alpha0, 1.0 / 6.0) * std::cbrt(beta) / std::cbrt(E);
    if (!(band.K_second_derivative > 0.0)) {
        throw NumericalError(kModule, "K'' at s_min is not positive; the minimum is degenerate");
    }
    d.s_scale = std::pow(band.K_second_derivative / (band.K_min * consts.curv_m2), 0.25);
    d.s_scale_hessian = std::pow(band.hess(0, 0) / band.hess(1, 1), 0.25);
    return d;
}

}  // namespace

EigenvaluePrediction predict_eigenvalue(int n, double h, const model::ModelConstants& consts,
                                        const geometry::GammaFrame& frame, const band::BandAnalysis& band) {
    if (n < 1) throw InvalidArgument("eigenvalue index must be >= 1");
    if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("h must lie in (0, 1)");
    const geometry::AssumptionsReport report = geometry::verify_assumptions(frame);
    if (!report.linear_vanishing || !report.K_unique_nondegenerate_min) {
        throw NumericalError(kModule, "expansion hypotheses violated");
    }
    EigenvaluePrediction p;
    p.n = n;
    p.h = h;
    p.term_h = consts.theta0 * h;
    p.term_h43 = report.K_min * consts.theta0_m2 * std::pow(h, 4.0 / 3.0);
    p.gap_to_next = band.harmonic_gap_coefficient * std::pow(h, 5.0 / 3.0);
    p.term_h53 = (n - 0.5) * p.gap_to_next;
    return p;
}

ProfileGrids default_profile_grids(int n, double h, const model::ModelConstants& consts,
                                   const geometry::GammaFrame& frame, const band::BandAnalysis& band, int nt, int nr,
                                   int ns) {
    if (nt < 8 || nr < 8 || ns < 8) throw InvalidArgument("profile grids need at least 8 points");
    const ScaleData d = scales(consts, frame, band);
    ProfileGrids g;
    g.t = linspace(0.0, 10.0 * std::sqrt(h), nt);
    const double r_reach = (std::sqrt(2.0 * std::abs(consts.xi0_m2)) + 6.0) * std::cbrt(h) / d.r_scale;
    g.r = linspace(-r_reach, r_reach, nr);
    const double s_reach = (std::sqrt(2.0 * n + 1.0) + 6.0) * std::pow(h, 1.0 / 6.0) / d.s_scale;
    g.s = linspace(band.s_min - s_reach, band.s_min + s_reach, ns);
    return g;
}

EigenfunctionProfile eigenfunction_profile(int n, double h, const model::ModelConstants& consts,
                                           const geometry::GammaFrame& frame, const band::BandAnalysis& band,
                                           const ProfileGrids& grids, const model::Discretization& disc_dg,
                                           const model::Discretization& disc_m) {
    if (n < 1 || n > 10) throw InvalidArgument("profile index must lie in [1, 10]");
    if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("h must lie in (0, 1)");
    if (grids.t.size() < 2 || grids.r.size() < 2 || grids.s.size() < 2) {
        throw InvalidArgument("profile grids need at least two points each");
    }
    const ScaleData d = scales(consts, frame, band);

    EigenfunctionProfile p;
    p.n = n;
    p.h = h;
    p.t_samples = grids.t;
    p.r_samples = grids.r;
    p.s_samples = grids.s;
    p.r_scale = d.r_scale;
    p.s_scale = d.s_scale;
    p.s_scale_hessian = d.s_scale_hessian;
    p.s_scale_relative_difference = std::abs(d.s_scale_hessian - d.s_scale) / d.s_scale;

    const model::SpectralCurveSample dg = model::mu1_de_gennes(consts.xi0, disc_dg);
    const model::SpectralCurveSample mg = model::mu1_montgomery(consts.xi0_m2, disc_m);
    const double hdg = disc_dg.step();
    const double hm = disc_m.step();
    // Splines of log u keep the interpolated tails positive.
    const auto log_of = [](const std::vector<double>& f) {
        std::vector<double> out;
        out.reserve(f.size());
        for (double v : f) out.push_back(std::log(std::max(v, 1e-300)));
        return out;
    };
    const auto log_u = log_of(dg.ground_state);
    const auto log_v = log_of(mg.ground_state);
    boost::math::interpolators::cardinal_cubic_b_spline<double> u_spline(log_u.begin(), log_u.end(), 0.0, hdg,
                                                                        0.0);
    boost::math::interpolators::cardinal_cubic_b_spline<double> v_spline(log_v.begin(), log_v.end(), mg.grid.front(),
                                                                        hm);
    const double t_end = dg.grid.back();
    const double m_lo = mg.grid.front();
    const double m_hi = mg.grid.back();

    const double sh = std::sqrt(h);
    const double ch = std::cbrt(h);
    const double h16 = std::pow(h, 1.0 / 6.0);
    for (double t : p.t_samples) {
        const double tau = t / sh;
        p.u_t.push_back(tau >= 0.0 && tau <= t_end ? std::exp(u_spline(tau)) : 0.0);
    }
    for (double r : p.r_samples) {
        const double x = d.r_scale * r / ch;
        p.v_r.push_back(x >= m_lo && x <= m_hi ? std::exp(v_spline(x)) : 0.0);
    }
    for (double s : p.s_samples) p.w_s.push_back(model::hermite_function(n - 1, d.s_scale * (s - band.s_min) / h16));

    normalize(p.t_samples, p.u_t);
    normalize(p.r_samples, p.v_r);
    normalize(p.s_samples, p.w_s);

    const std::size_t nt = p.t_samples.size();
    const std::size_t nr = p.r_samples.size();
    const std::size_t ns = p.s_samples.size();
    p.values.resize(nt * nr * ns);
    for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t j = 0; j < nr; ++j) {
            const double uv = p.u_t[i] * p.v_r[j];
            for (std::size_t k = 0; k < ns; ++k) p.values[(i * nr + j) * ns + k] = uv * p.w_s[k];
        }
    }
    const auto wt = trapezoid_weights(p.t_samples);
    const auto wr = trapezoid_weights(p.r_samples);
    const auto ws = trapezoid_weights(p.s_samples);
    double total = 0.0;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            for (std::size_t k = 0; k < ns; ++k) {
                const double v = p.values[(i * nr + j) * ns + k];
                total += wt[i] * wr[j] * ws[k] * v * v;
            }
    const double scale = 1.0 / std::sqrt(total);
    for (double& v : p.values) v *= scale;
    return p;
}

int count_sign_changes(const std::vector<double>& f, double floor) {
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    int changes = 0;
    int last = 0;
    for (double v : f) {
        if (std::abs(v) <= floor * peak) continue;
        const int sign = v > 0.0 ? 1 : -1;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

double grid_norm(const std::vector<double>& grid, const std::vector<double>& f) {
    if (grid.size() != f.size()) throw InvalidArgument("grid and samples differ in size");
    const auto w = trapezoid_weights(grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i] * f[i];
    return std::sqrt(sum);
}

double t_second_moment(const EigenfunctionProfile& profile) {
    const std::size_t nt = profile.t_samples.size();
    const std::size_t nr = profile.r_samples.size();
    const std::size_t ns = profile.s_samples.size();
    const auto wt = trapezoid_weights(profile.t_samples);
    const auto wr = trapezoid_weights(profile.r_samples);
    const auto ws = trapezoid_weights(profile.s_samples);
    double moment = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        double marginal = 0.0;
        for (std::size_t j = 0; j < nr; ++j)
            for (std::size_t k = 0; k < ns; ++k) {
                const double v = profile.values[(i * nr + j) * ns + k];
                marginal += wr[j] * ws[k] * v * v;
            }
        const double t = profile.t_samples[i];
        moment += wt[i] * t * t * marginal;
        mass += wt[i] * marginal;
    }
    return moment / mass;
}

}  // namespace neumag::asymptotics
